"""Batch experiment runner: seed-stable sweeps over algorithms and sizes.

A sweep executes `runs_per_cell` independent runs for every (algorithm,
swarm size) cell of a grid and aggregates them into per-cell means. Each
run's seed is a pure function of (base seed, algorithm index, swarm size,
run index), so any cell, or any single run, can be reproduced in isolation
and the results are identical no matter how many workers execute the grid.

Runs that miss a goal contribute `max_ticks` to the mean tick count; the
success-rate column makes their share visible. Crash statistics include
every run.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .fields import FieldSpec, kernel_magnitude
from .world import Algorithm, ConfigError, RunResult, WorldConfig, run

STATS_HEADER = [
    "algorithm",
    "swarm_size",
    "runs",
    "mean_crashes",
    "sd_crashes",
    "mean_ticks",
    "sd_ticks",
    "success_rate",
]

TRAJECTORY_HEADER = ["tick", "particle", "x", "y", "z", "vx", "vy", "vz"]


@dataclass
class SweepSpec:
    """The grid to sweep and the template config every cell is built from."""

    algorithms: list[Algorithm]
    swarm_sizes: list[int]
    runs_per_cell: int
    base_config: WorldConfig
    base_seed: int = 0

    def validate(self) -> None:
        if not self.algorithms:
            raise ConfigError("algorithms must be a non-empty list")
        if not self.swarm_sizes:
            raise ConfigError("swarm_sizes must be a non-empty list")
        if self.runs_per_cell < 1:
            raise ConfigError(f"runs_per_cell must be >= 1, got {self.runs_per_cell}")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ConfigError(f"base_seed must be an unsigned 64-bit integer, got {self.base_seed!r}")
        for algorithm in self.algorithms:
            for size in self.swarm_sizes:
                try:
                    self.cell_config(algorithm, size, 0).validate()
                except ConfigError as exc:
                    raise ConfigError(
                        f"cell (algorithm={Algorithm(algorithm).value}, swarm_size={size}): {exc}"
                    ) from exc
        seeds = [
            per_run_seed(self.base_seed, ai, size, r)
            for ai in range(len(self.algorithms))
            for size in self.swarm_sizes
            for r in range(self.runs_per_cell)
        ]
        if len(set(seeds)) != len(seeds):
            raise ConfigError("per-run seed mixing collided; change base_seed")

    def cell_config(self, algorithm: Algorithm, size: int, run_index: int) -> WorldConfig:
        seed = per_run_seed(self.base_seed, self.algorithms.index(algorithm), size, run_index)
        return replace(self.base_config, algorithm=algorithm, swarm_size=size, seed=seed)


def per_run_seed(base_seed: int, algorithm_index: int, swarm_size: int, run_index: int) -> int:
    """Mix a sweep coordinate into an independent 64-bit run seed.

    The mixing function is the first output word of numpy's SeedSequence
    entropy pool keyed on (base_seed, algorithm_index, swarm_size,
    run_index); it is stable across platforms and numpy releases.
    """
    ss = np.random.SeedSequence([base_seed, algorithm_index, swarm_size, run_index])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class CellStats:
    """Aggregates of one (algorithm, swarm size) cell."""

    algorithm: Algorithm
    swarm_size: int
    run_count: int
    mean_crash_episodes: float
    sd_crash_episodes: float
    mean_ticks_both_goals: float
    sd_ticks_both_goals: float
    success_rate: float


@dataclass
class SweepStats:
    """All cells of a sweep, in algorithm-major, size-minor order."""

    cells: list[CellStats]

    def cell(self, algorithm: Algorithm, swarm_size: int) -> CellStats:
        for c in self.cells:
            if c.algorithm is Algorithm(algorithm) and c.swarm_size == swarm_size:
                return c
        raise KeyError(f"no cell for ({algorithm}, {swarm_size})")


def run_ticks_value(result: RunResult, max_ticks: int) -> int:
    """Tick count a run contributes to the mean: last goal's tick, or the cap."""
    if result.both_goals_found:
        return result.ticks_to_goal[-1]
    return max_ticks


def _run_cell(args: tuple[SweepSpec, Algorithm, int]) -> list[tuple[int, int, bool]]:
    spec, algorithm, size = args
    out = []
    for r in range(spec.runs_per_cell):
        result = run(spec.cell_config(algorithm, size, r))
        out.append(
            (
                run_ticks_value(result, spec.base_config.max_ticks),
                result.total_crash_episodes,
                result.both_goals_found,
            )
        )
    return out


def run_sweep(spec: SweepSpec, parallelism: int = 1) -> SweepStats:
    """Execute the whole grid and aggregate per cell.

    `parallelism` only chooses how many worker processes execute cells; the
    per-run seeding makes the result identical for any value.
    """
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}")
    spec.validate()
    grid = [(spec, algorithm, size) for algorithm in spec.algorithms for size in spec.swarm_sizes]
    if parallelism == 1:
        per_cell = [_run_cell(cell) for cell in grid]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            per_cell = list(pool.map(_run_cell, grid))
    cells = []
    for (_, algorithm, size), rows in zip(grid, per_cell):
        ticks = np.array([row[0] for row in rows], dtype=float)
        crashes = np.array([row[1] for row in rows], dtype=float)
        successes = np.array([row[2] for row in rows], dtype=float)
        cells.append(
            CellStats(
                algorithm=algorithm,
                swarm_size=size,
                run_count=len(rows),
                mean_crash_episodes=float(crashes.mean()),
                sd_crash_episodes=float(crashes.std()),
                mean_ticks_both_goals=float(ticks.mean()),
                sd_ticks_both_goals=float(ticks.std()),
                success_rate=float(successes.mean()),
            )
        )
    return SweepStats(cells=cells)


def write_stats_csv(stats: SweepStats, path) -> None:
    """Write a sweep's cells as CSV, one row per cell, grid order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_HEADER)
        for c in stats.cells:
            writer.writerow(
                [
                    c.algorithm.value,
                    c.swarm_size,
                    c.run_count,
                    repr(c.mean_crash_episodes),
                    repr(c.sd_crash_episodes),
                    repr(c.mean_ticks_both_goals),
                    repr(c.sd_ticks_both_goals),
                    repr(c.success_rate),
                ]
            )


def read_stats_csv(path) -> SweepStats:
    """Parse a stats CSV back into SweepStats (exact float round-trip)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != STATS_HEADER:
            raise ConfigError(f"unexpected stats header in {path}: {header}")
        cells = [
            CellStats(
                algorithm=Algorithm(row[0]),
                swarm_size=int(row[1]),
                run_count=int(row[2]),
                mean_crash_episodes=float(row[3]),
                sd_crash_episodes=float(row[4]),
                mean_ticks_both_goals=float(row[5]),
                sd_ticks_both_goals=float(row[6]),
                success_rate=float(row[7]),
            )
            for row in reader
        ]
    return SweepStats(cells=cells)


def field_curve(
    spec: FieldSpec,
    d_min: float,
    d_max: float,
    samples: int,
    path,
    radius_sum: float = 0.0,
) -> None:
    """Sample the kernel magnitude on [d_min, d_max] and write distance,magnitude CSV."""
    if not 0 < d_min < d_max:
        raise ConfigError(f"need 0 < d_min < d_max, got {d_min} .. {d_max}")
    if samples < 2:
        raise ConfigError(f"samples must be >= 2, got {samples}")
    distances = np.linspace(d_min, d_max, samples)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["distance", "magnitude"])
        for d in distances:
            writer.writerow([repr(float(d)), repr(kernel_magnitude(float(d), spec, radius_sum))])


def write_trajectory_csv(result: RunResult, path) -> None:
    """Dump a recorded trajectory: tick,particle,x,y,z,vx,vy,vz rows."""
    if result.trajectory is None:
        raise ValueError("run was not recorded; pass record_trajectory=True")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_HEADER)
        ticks, n, _ = result.trajectory.shape
        for t in range(ticks):
            for i in range(n):
                row = result.trajectory[t, i]
                writer.writerow([t, i] + [f"{value:.6f}" for value in row])

"""The simulated world: a bounded 3-D arena, a swarm, and a goal protocol.

A run places `swarm_size` particles uniformly at random in the arena with
random initial velocities, then steps the whole swarm synchronously (every
velocity is computed from the tick-start snapshot) under the configured
algorithm until every goal in the sequence has been detected or the tick
cap is hit. Goals are presented one at a time: the next goal appears only
once any single particle comes within the detection radius of the active
one, at which point all bests are re-seeded because the fitness landscape
changed.

Crashes are counted as episodes: a pair of particles closer than the crash
radius contributes one crash when it first overlaps and nothing further
until it separates and overlaps again. Crashes are non-destructive; the
particles fly on.

Randomness is fully determined by the config seed. Each particle draws from
its own substream, derived from (seed, particle index), so particle i sees
the same randomness regardless of how many other particles exist.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .avoidance import RESUME_MODES, ca_velocities
from .core import (
    FitnessFn,
    Hyperparameters,
    SwarmState,
    Vec3,
    reset_bests,
    swarm_fitness,
    update_bests,
    vec3,
)
from .fields import FieldKind, FieldSpec, field_forces

RANDOM_MODES = ("per_dimension", "scalar")


class ConfigError(ValueError):
    """A configuration violates one of its stated invariants."""


class Algorithm(str, enum.Enum):
    PSO = "pso"
    PSO_CA = "pso-ca"
    FFPSO_LIN = "ffpso-lin"
    FFPSO_GRAV = "ffpso-grav"


_FIELD_KIND = {
    Algorithm.FFPSO_LIN: FieldKind.LINEAR,
    Algorithm.FFPSO_GRAV: FieldKind.GRAVITATIONAL,
}


@dataclass
class WorldConfig:
    """Everything a run depends on; two runs with equal configs are identical.

    Distances are metres, speeds metres per tick. `max_speed` of None leaves
    velocities unbounded, exactly as the update equations produce them.
    """

    swarm_size: int
    algorithm: Algorithm
    seed: int = 0
    arena_min: Vec3 = field(default_factory=lambda: vec3(0.0, 0.0, 0.0))
    arena_max: Vec3 = field(default_factory=lambda: vec3(10.0, 10.0, 5.0))
    goals: tuple[Vec3, ...] = field(
        default_factory=lambda: (vec3(3.0, 5.0, 2.5), vec3(7.0, 5.0, 2.5))
    )
    detection_radius: float = 0.2
    crash_radius: float = 0.1
    safety_distance: float = 0.4
    max_ticks: int = 1200
    omega: float = 1.0
    theta1: float = 1.0
    theta2: float = 1.0
    theta3: float = 1.0
    max_speed: Optional[float] = None
    init_speed: float = 1.0
    exponent: float = 1.5
    magnitude_cap: float = 1e3
    particle_radius: float = 0.0
    ca_speed: float = 0.5
    ca_resume: str = "frozen"
    random_mode: str = "per_dimension"

    def __post_init__(self) -> None:
        self.algorithm = Algorithm(self.algorithm)
        self.arena_min = np.asarray(self.arena_min, dtype=float)
        self.arena_max = np.asarray(self.arena_max, dtype=float)
        self.goals = tuple(np.asarray(g, dtype=float) for g in self.goals)

    def validate(self) -> None:
        """Raise ConfigError naming the first violated invariant."""
        if self.swarm_size < 2:
            raise ConfigError(f"swarm_size must be >= 2, got {self.swarm_size}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.arena_min.shape != (3,) or self.arena_max.shape != (3,):
            raise ConfigError("arena_min and arena_max must be 3-vectors")
        if not np.all(np.isfinite(self.arena_min)) or not np.all(np.isfinite(self.arena_max)):
            raise ConfigError("arena bounds must be finite")
        if not np.all(self.arena_min < self.arena_max):
            raise ConfigError(
                f"arena_min must be < arena_max componentwise, got {self.arena_min} vs {self.arena_max}"
            )
        if not self.goals:
            raise ConfigError("goals must be a non-empty sequence")
        for idx, g in enumerate(self.goals):
            if g.shape != (3,) or not np.all(np.isfinite(g)):
                raise ConfigError(f"goal {idx} must be a finite 3-vector, got {g!r}")
            if not (np.all(self.arena_min <= g) and np.all(g <= self.arena_max)):
                raise ConfigError(f"goal {idx} at {g} lies outside the arena")
        if not self.detection_radius > 0:
            raise ConfigError(f"detection_radius must be > 0, got {self.detection_radius}")
        if not self.crash_radius > 0:
            raise ConfigError(f"crash_radius must be > 0, got {self.crash_radius}")
        if not self.safety_distance > 0:
            raise ConfigError(f"safety_distance must be > 0, got {self.safety_distance}")
        if not self.crash_radius < self.safety_distance:
            raise ConfigError(
                f"crash_radius ({self.crash_radius}) must be < safety_distance ({self.safety_distance})"
            )
        if self.max_ticks < 1:
            raise ConfigError(f"max_ticks must be >= 1, got {self.max_ticks}")
        for name in ("omega", "theta1", "theta2", "theta3"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be finite and >= 0, got {value!r}")
        if self.max_speed is not None and not self.max_speed > 0:
            raise ConfigError(f"max_speed must be > 0 or unset, got {self.max_speed}")
        if not self.init_speed > 0:
            raise ConfigError(f"init_speed must be > 0, got {self.init_speed}")
        if not (math.isfinite(self.exponent) and self.exponent > 0):
            raise ConfigError(f"exponent must be > 0, got {self.exponent}")
        if not (math.isfinite(self.magnitude_cap) and self.magnitude_cap > 0):
            raise ConfigError(f"magnitude_cap must be finite and > 0, got {self.magnitude_cap}")
        if self.particle_radius < 0:
            raise ConfigError(f"particle_radius must be >= 0, got {self.particle_radius}")
        if not self.ca_speed > 0:
            raise ConfigError(f"ca_speed must be > 0, got {self.ca_speed}")
        if self.ca_resume not in RESUME_MODES:
            raise ConfigError(f"ca_resume must be one of {RESUME_MODES}, got {self.ca_resume!r}")
        if self.random_mode not in RANDOM_MODES:
            raise ConfigError(f"random_mode must be one of {RANDOM_MODES}, got {self.random_mode!r}")

    @property
    def hyper(self) -> Hyperparameters:
        return Hyperparameters(self.omega, self.theta1, self.theta2, self.theta3)

    def field_spec(self) -> Optional[FieldSpec]:
        kind = _FIELD_KIND.get(self.algorithm)
        if kind is None:
            return None
        return FieldSpec(
            kind=kind,
            safety_distance=self.safety_distance,
            exponent=self.exponent,
            magnitude_cap=self.magnitude_cap,
        )


@dataclass
class CrashTracker:
    """Counts crash episodes: enter events of pairs below the crash radius.

    `overlap_ticks` additionally counts every (pair, tick) with the pair
    overlapped, for comparisons against per-tick crash conventions.
    """

    crash_radius: float
    episode_count: int = 0
    overlap_ticks: int = 0
    _prev: Optional[np.ndarray] = None  # (N, N) bool, upper triangle

    @property
    def overlapping(self) -> set[tuple[int, int]]:
        if self._prev is None:
            return set()
        return {(int(i), int(k)) for i, k in np.argwhere(self._prev)}

    def observe(self, positions: np.ndarray) -> None:
        """Fold one tick's positions into the episode count."""
        n = positions.shape[0]
        dist = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=2)
        over = (dist < self.crash_radius) & np.triu(np.ones((n, n), dtype=bool), k=1)
        if self._prev is None:
            entered = over
        else:
            entered = over & ~self._prev
        self.episode_count += int(entered.sum())
        self.overlap_ticks += int(over.sum())
        self._prev = over


@dataclass
class RunResult:
    """Outcome of one run.

    ticks_to_goal holds, per goal, the tick at which it was detected, or
    None if the run ended first. Failed goals leave both_goals_found False.
    """

    ticks_to_goal: list[Optional[int]]
    total_crash_episodes: int
    total_overlap_ticks: int
    both_goals_found: bool
    trajectory: Optional[np.ndarray] = None  # (ticks+1, N, 6): x y z vx vy vz

    def to_json_dict(self) -> dict:
        return {
            "ticks_to_goal": self.ticks_to_goal,
            "total_crash_episodes": self.total_crash_episodes,
            "total_overlap_ticks": self.total_overlap_ticks,
            "both_goals_found": self.both_goals_found,
        }


def check_goal(swarm: SwarmState, goal: Vec3, detection_radius: float) -> bool:
    """True iff any particle is within the detection radius of the goal."""
    if not detection_radius > 0:
        raise ConfigError(f"detection_radius must be > 0, got {detection_radius}")
    dist = np.linalg.norm(swarm.positions - goal, axis=1)
    return bool((dist <= detection_radius).any())


class Simulation:
    """One mutable world: the swarm, its randomness, and the crash tally.

    Strictly single-threaded; distinct Simulations are independent.
    """

    def __init__(
        self,
        config: WorldConfig,
        record_trajectory: bool = False,
        fitness_fn: FitnessFn = swarm_fitness,
    ):
        config.validate()
        self.config = config
        self.fitness_fn = fitness_fn
        n = config.swarm_size
        streams = [
            np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(i,)))
            for i in range(n)
        ]
        span = config.arena_max - config.arena_min
        positions = np.empty((n, 3))
        velocities = np.empty((n, 3))
        for i, rng in enumerate(streams):
            positions[i] = config.arena_min + rng.random(3) * span
            direction = rng.standard_normal(3)
            dnorm = np.linalg.norm(direction)
            if dnorm < 1e-12:
                direction, dnorm = np.array([1.0, 0.0, 0.0]), 1.0
            speed = (1.0 - rng.random()) * config.init_speed  # uniform on (0, init_speed]
            velocities[i] = direction / dnorm * speed
        draws = 6 if config.random_mode == "per_dimension" else 2
        # Pre-drawn per-tick randomness, one block per particle substream.
        self._rand = np.stack([rng.random((config.max_ticks, draws)) for rng in streams])
        fit = fitness_fn(positions, config.goals[0])
        best = int(np.argmax(fit))
        self.swarm = SwarmState(
            positions=positions,
            velocities=velocities,
            personal_best_pos=positions.copy(),
            personal_best_fitness=fit,
            radii=np.full(n, config.particle_radius, dtype=float),
            global_best_pos=positions[best].copy(),
            global_best_fitness=float(fit[best]),
            tick=0,
        )
        self.tracker = CrashTracker(crash_radius=config.crash_radius)
        self.tracker.observe(positions)
        self._field_spec = config.field_spec()
        self._ca_partners = np.full(n, -1, dtype=int)
        self._ca_frozen = np.zeros((n, 3))
        self._trajectory: Optional[list[np.ndarray]] = [] if record_trajectory else None
        if self._trajectory is not None:
            self._trajectory.append(np.hstack([positions, velocities]))

    def step(self, active_goal: Vec3) -> None:
        """Advance the whole swarm by one synchronous tick toward `active_goal`."""
        cfg = self.config
        sw = self.swarm
        t = sw.tick
        if t >= cfg.max_ticks:
            raise RuntimeError(f"cannot step past max_ticks ({cfg.max_ticks})")
        block = self._rand[:, t, :]
        if cfg.random_mode == "per_dimension":
            r1, r2 = block[:, 0:3], block[:, 3:6]
        else:
            r1, r2 = block[:, 0:1], block[:, 1:2]
        base = (
            cfg.omega * sw.velocities
            + cfg.theta1 * r1 * (sw.personal_best_pos - sw.positions)
            + cfg.theta2 * r2 * (sw.global_best_pos - sw.positions)
        )
        if self._field_spec is not None:
            base = base + cfg.theta3 * field_forces(sw.positions, sw.radii, self._field_spec)
        if cfg.algorithm is Algorithm.PSO_CA:
            diff = sw.positions[:, None, :] - sw.positions[None, :, :]
            dist = np.linalg.norm(diff, axis=2)
            v_next = ca_velocities(
                diff,
                dist,
                sw.velocities,
                self._ca_partners,
                self._ca_frozen,
                cfg.safety_distance,
                cfg.ca_speed,
                base,
                cfg.ca_resume,
            )
        else:
            v_next = base
        if cfg.max_speed is not None:
            speeds = np.linalg.norm(v_next, axis=1)
            over = speeds > cfg.max_speed
            if over.any():
                v_next[over] *= (cfg.max_speed / speeds[over])[:, None]
        raw = sw.positions + v_next
        positions = np.clip(raw, cfg.arena_min, cfg.arena_max)
        v_next[positions != raw] = 0.0  # kill the component that hit a wall
        moved = replace(sw, positions=positions, velocities=v_next, tick=t + 1)
        self.swarm = update_bests(moved, active_goal, self.fitness_fn)
        self.tracker.observe(positions)
        if self._trajectory is not None:
            self._trajectory.append(np.hstack([positions, v_next]))

    def run(self) -> RunResult:
        """Drive the full sequential-goal protocol and return the outcome."""
        cfg = self.config
        goals = cfg.goals
        found: list[Optional[int]] = [None] * len(goals)
        active = 0
        while True:
            while active < len(goals) and check_goal(
                self.swarm, goals[active], cfg.detection_radius
            ):
                found[active] = self.swarm.tick
                active += 1
                if active < len(goals):
                    self.swarm = reset_bests(self.swarm, goals[active], self.fitness_fn)
            if active == len(goals) or self.swarm.tick >= cfg.max_ticks:
                break
            self.step(goals[active])
        trajectory = None
        if self._trajectory is not None:
            trajectory = np.stack(self._trajectory)
        return RunResult(
            ticks_to_goal=found,
            total_crash_episodes=self.tracker.episode_count,
            total_overlap_ticks=self.tracker.overlap_ticks,
            both_goals_found=all(x is not None for x in found),
            trajectory=trajectory,
        )


def init_run(config: WorldConfig) -> SwarmState:
    """Validated, seeded initial swarm for `config`; bit-identical per seed."""
    return Simulation(config).swarm


def run(config: WorldConfig, record_trajectory: bool = False) -> RunResult:
    """Execute one full run of the configured world."""
    return Simulation(config, record_trajectory=record_trajectory).run()

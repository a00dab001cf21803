"""Vanilla particle-swarm primitives in 3-D.

A particle's next velocity blends three weighted pulls: inertia on its
current velocity, attraction to the best point it has personally visited,
and attraction to the best point any swarm member has visited. For goal
search the fitness of a position is the negative Euclidean distance to the
goal, so maximising fitness means closing on the goal.

Everything here is a pure function of its inputs; the random factors r1 and
r2 are supplied by the caller, one uniform draw in [0, 1] per component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

# 3-component float64 array: metres for positions, metres/tick for velocities.
Vec3 = np.ndarray

#: Below this separation two positions are treated as coincident.
COINCIDENT_EPS = 1e-9

_MASK64 = (1 << 64) - 1


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=float)


def norm(v: Vec3) -> float:
    """Euclidean length of a 3-vector."""
    return float(np.linalg.norm(v))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def pair_fallback_unit(i: int, k: int) -> Vec3:
    """Deterministic unit vector standing in for the separation direction of
    a coincident particle pair.

    The direction is a pure function of the index pair, antisymmetric in its
    arguments (swapping i and k flips the sign), so repulsion kernels keep
    their action/reaction symmetry even in the degenerate case.
    """
    if i == k:
        raise ValueError("fallback direction needs two distinct particle indices")
    if i > k:
        return -pair_fallback_unit(k, i)
    state = ((i & 0xFFFFFFFF) << 32) | (k & 0xFFFFFFFF)
    comps = []
    for _ in range(3):
        state = _splitmix64(state)
        comps.append(state / float(1 << 63) - 1.0)
    v = np.array(comps)
    n = np.linalg.norm(v)
    if n < 1e-12:  # all three hashes landed on ~0; pick an axis
        return vec3(1.0, 0.0, 0.0)
    return v / n


def unit_separation(xi: Vec3, xk: Vec3, i: int = 0, k: int = 1) -> Vec3:
    """Unit vector pointing from particle k toward particle i.

    Coincident inputs (separation below COINCIDENT_EPS) fall back to
    `pair_fallback_unit(i, k)` so callers never see a zero or NaN direction.
    """
    r = xi - xk
    d = float(np.linalg.norm(r))
    if d < COINCIDENT_EPS:
        return pair_fallback_unit(i, k)
    return r / d


def fitness(x: Vec3, goal: Vec3) -> float:
    """Negative distance to the goal: 0 at the goal, negative elsewhere."""
    return -float(np.linalg.norm(goal - x))


def swarm_fitness(positions: np.ndarray, goal: Vec3) -> np.ndarray:
    """Vectorised `fitness` over an (N, 3) position array."""
    return -np.linalg.norm(positions - goal, axis=1)


#: Signature of an injectable fitness: (positions (N,3), goal) -> (N,) scores.
FitnessFn = Callable[[np.ndarray, Vec3], np.ndarray]


@dataclass(frozen=True)
class Hyperparameters:
    """Weights of the velocity update.

    omega scales the carried-over velocity, theta1 the pull toward the
    personal best, theta2 the pull toward the global best, and theta3 the
    force-field contribution (ignored by plain PSO).
    """

    omega: float = 1.0
    theta1: float = 1.0
    theta2: float = 1.0
    theta3: float = 1.0

    def __post_init__(self) -> None:
        for name in ("omega", "theta1", "theta2", "theta3"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")


@dataclass
class ParticleState:
    """One particle: where it is, how it moves, and the best it has seen."""

    position: Vec3
    velocity: Vec3
    personal_best_pos: Vec3
    personal_best_fitness: float
    radius: float = 0.0


@dataclass
class SwarmState:
    """Array-of-structs snapshot of the whole swarm at one tick.

    The global best is tracked centrally: its fitness always equals the
    maximum personal-best fitness across particles.
    """

    positions: np.ndarray  # (N, 3)
    velocities: np.ndarray  # (N, 3)
    personal_best_pos: np.ndarray  # (N, 3)
    personal_best_fitness: np.ndarray  # (N,)
    radii: np.ndarray  # (N,)
    global_best_pos: Vec3
    global_best_fitness: float
    tick: int = 0

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def particle(self, i: int) -> ParticleState:
        return ParticleState(
            position=self.positions[i].copy(),
            velocity=self.velocities[i].copy(),
            personal_best_pos=self.personal_best_pos[i].copy(),
            personal_best_fitness=float(self.personal_best_fitness[i]),
            radius=float(self.radii[i]),
        )

    @property
    def particles(self) -> list[ParticleState]:
        return [self.particle(i) for i in range(self.n)]

    @classmethod
    def from_particles(cls, particles: Sequence[ParticleState], tick: int = 0) -> "SwarmState":
        positions = np.array([p.position for p in particles], dtype=float)
        velocities = np.array([p.velocity for p in particles], dtype=float)
        pb_pos = np.array([p.personal_best_pos for p in particles], dtype=float)
        pb_fit = np.array([p.personal_best_fitness for p in particles], dtype=float)
        radii = np.array([p.radius for p in particles], dtype=float)
        best = int(np.argmax(pb_fit))
        return cls(
            positions=positions,
            velocities=velocities,
            personal_best_pos=pb_pos,
            personal_best_fitness=pb_fit,
            radii=radii,
            global_best_pos=pb_pos[best].copy(),
            global_best_fitness=float(pb_fit[best]),
            tick=tick,
        )


def pso_velocity(
    state: ParticleState,
    gbest: Vec3,
    h: Hyperparameters,
    r1: Vec3,
    r2: Vec3,
) -> Vec3:
    """Next velocity of one particle:

        omega * v + theta1 * r1 * (pbest - x) + theta2 * r2 * (gbest - x)

    with r1 and r2 multiplying component-wise.
    """
    return (
        h.omega * state.velocity
        + h.theta1 * r1 * (state.personal_best_pos - state.position)
        + h.theta2 * r2 * (gbest - state.position)
    )


def apply_velocity(x: Vec3, v_next: Vec3) -> Vec3:
    """Advance a position by one tick of the given velocity."""
    return x + v_next


def update_bests(swarm: SwarmState, goal: Vec3, fitness_fn: FitnessFn = swarm_fitness) -> SwarmState:
    """Refresh personal and global bests against the active goal.

    A personal best is replaced only on strict improvement, and the global
    best only when some personal best strictly exceeds it, so ties keep the
    incumbent and the operation is idempotent for fixed positions.
    """
    fit = fitness_fn(swarm.positions, goal)
    improved = fit > swarm.personal_best_fitness
    pb_pos = np.where(improved[:, None], swarm.positions, swarm.personal_best_pos)
    pb_fit = np.where(improved, fit, swarm.personal_best_fitness)
    g_pos = swarm.global_best_pos
    g_fit = swarm.global_best_fitness
    best = float(pb_fit.max())
    if best > g_fit:
        g_pos = pb_pos[int(np.argmax(pb_fit))].copy()
        g_fit = best
    return replace(
        swarm,
        personal_best_pos=pb_pos,
        personal_best_fitness=pb_fit,
        global_best_pos=g_pos,
        global_best_fitness=g_fit,
    )


def reset_bests(swarm: SwarmState, goal: Vec3, fitness_fn: FitnessFn = swarm_fitness) -> SwarmState:
    """Re-seed all bests at the current positions, scored against `goal`.

    Used when the active goal changes: bests earned against the previous
    goal point at the wrong place and must not carry over.
    """
    fit = fitness_fn(swarm.positions, goal)
    best = int(np.argmax(fit))
    return replace(
        swarm,
        personal_best_pos=swarm.positions.copy(),
        personal_best_fitness=fit,
        global_best_pos=swarm.positions[best].copy(),
        global_best_fitness=float(fit[best]),
    )

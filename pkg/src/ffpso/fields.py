"""Repulsive inter-particle force fields.

Each particle within the safety distance S of particle i contributes a
velocity component pushing i straight away from it. Two kernels are
available, named by how their strength falls off with the centre distance d:

  linear:         (S - d) * rhat                      for d <= S, else 0
  gravitational:  min(1 / (d - D)**p, cap) * rhat     for d <= S, else 0

where rhat is the unit vector from the neighbour toward i and D is the sum
of the two body radii. The linear kernel tapers continuously to zero at S
and tops out at S on contact, so a strong enough opposing pull can override
it. The gravitational kernel grows without bound as the body surfaces
close, which is what makes it crash-proof in practice; `cap` bounds the
magnitude once inside the singular region (d <= D) to keep the arithmetic
finite. Note it does not taper at S: its value jumps from 1/(S - D)**p to
zero there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    COINCIDENT_EPS,
    Hyperparameters,
    ParticleState,
    Vec3,
    pair_fallback_unit,
    pso_velocity,
    unit_separation,
)


class FieldKind(str, enum.Enum):
    LINEAR = "linear"
    GRAVITATIONAL = "gravitational"


@dataclass(frozen=True)
class FieldSpec:
    """Which kernel to apply and its shape parameters.

    `exponent` (the decay power p) only affects the gravitational kernel;
    `magnitude_cap` bounds that kernel's otherwise unbounded strength.
    """

    kind: FieldKind
    safety_distance: float
    exponent: float = 1.5
    magnitude_cap: float = 1e3

    def __post_init__(self) -> None:
        if not (math.isfinite(self.safety_distance) and self.safety_distance > 0):
            raise ValueError(f"safety_distance must be > 0, got {self.safety_distance!r}")
        if not (math.isfinite(self.exponent) and self.exponent > 0):
            raise ValueError(f"exponent must be > 0, got {self.exponent!r}")
        if not (math.isfinite(self.magnitude_cap) and self.magnitude_cap > 0):
            raise ValueError(f"magnitude_cap must be finite and > 0, got {self.magnitude_cap!r}")


def linear_magnitude(d: float, s: float) -> float:
    """Strength of the linear kernel at centre distance d."""
    if d > s:
        return 0.0
    return s - d


def grav_magnitude(d: float, s: float, p: float, cap: float, radius_sum: float = 0.0) -> float:
    """Strength of the gravitational kernel at centre distance d.

    Saturates at `cap` inside the singular region d <= radius_sum.
    """
    if d > s:
        return 0.0
    gap = d - radius_sum
    if gap <= 0.0:
        return cap
    try:
        raw = gap ** -p
    except OverflowError:
        return cap
    return min(raw, cap)


def kernel_magnitude(d: float, spec: FieldSpec, radius_sum: float = 0.0) -> float:
    """Strength of the configured kernel at centre distance d."""
    if spec.kind is FieldKind.LINEAR:
        return linear_magnitude(d, spec.safety_distance)
    return grav_magnitude(d, spec.safety_distance, spec.exponent, spec.magnitude_cap, radius_sum)


def ff_linear(xi: Vec3, xk: Vec3, s: float, i: int = 0, k: int = 1) -> Vec3:
    """Linear repulsion exerted on particle i at xi by particle k at xk."""
    d = float(np.linalg.norm(xi - xk))
    mag = linear_magnitude(d, s)
    if mag == 0.0:
        return np.zeros(3)
    return mag * unit_separation(xi, xk, i, k)


def ff_grav(
    xi: Vec3,
    xk: Vec3,
    ri: float,
    rk: float,
    s: float,
    p: float,
    cap: float,
    i: int = 0,
    k: int = 1,
) -> Vec3:
    """Gravitational-style repulsion exerted on particle i by particle k."""
    d = float(np.linalg.norm(xi - xk))
    mag = grav_magnitude(d, s, p, cap, ri + rk)
    if mag == 0.0:
        return np.zeros(3)
    return mag * unit_separation(xi, xk, i, k)


def ff_total(i: int, particles: Sequence[ParticleState], spec: FieldSpec) -> Vec3:
    """Combined field on particle i: the vector sum over every other particle."""
    if not 0 <= i < len(particles):
        raise IndexError(f"particle index {i} out of range for swarm of {len(particles)}")
    me = particles[i]
    total = np.zeros(3)
    for k, other in enumerate(particles):
        if k == i:
            continue
        if spec.kind is FieldKind.LINEAR:
            total += ff_linear(me.position, other.position, spec.safety_distance, i, k)
        else:
            total += ff_grav(
                me.position,
                other.position,
                me.radius,
                other.radius,
                spec.safety_distance,
                spec.exponent,
                spec.magnitude_cap,
                i,
                k,
            )
    return total


def ffpso_velocity(
    state: ParticleState,
    gbest: Vec3,
    h: Hyperparameters,
    r1: Vec3,
    r2: Vec3,
    ff: Vec3,
) -> Vec3:
    """PSO velocity update plus the weighted force-field component."""
    return pso_velocity(state, gbest, h, r1, r2) + h.theta3 * ff


def field_forces(positions: np.ndarray, radii: np.ndarray, spec: FieldSpec) -> np.ndarray:
    """Vectorised `ff_total` for all particles at once.

    positions is (N, 3), radii (N,); returns the (N, 3) per-particle field
    sums. Matches the scalar kernels exactly, including the index-hash
    fallback direction for coincident pairs.
    """
    n = positions.shape[0]
    diff = positions[:, None, :] - positions[None, :, :]  # diff[i, k] = x_i - x_k
    dist = np.linalg.norm(diff, axis=2)
    off_diag = ~np.eye(n, dtype=bool)
    in_range = (dist <= spec.safety_distance) & off_diag
    if spec.kind is FieldKind.LINEAR:
        mag = np.where(in_range, spec.safety_distance - dist, 0.0)
    else:
        gap = dist - (radii[:, None] + radii[None, :])
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            raw = np.where(gap > 0.0, gap ** -spec.exponent, np.inf)
        mag = np.where(in_range, np.minimum(raw, spec.magnitude_cap), 0.0)
    safe = np.where(dist >= COINCIDENT_EPS, dist, 1.0)
    unit = diff / safe[:, :, None]
    coincident = (dist < COINCIDENT_EPS) & off_diag
    if coincident.any():
        for i, k in np.argwhere(coincident):
            unit[i, k] = pair_fallback_unit(int(i), int(k))
    return (mag[:, :, None] * unit).sum(axis=1)

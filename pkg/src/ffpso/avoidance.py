"""Suspend-and-repel collision avoidance layered on plain PSO.

Each particle is either searching or avoiding. A searching particle whose
nearest neighbour comes within the safety distance S pairs with that
neighbour, parks its in-flight velocity, and flees straight away from the
partner at a fixed speed. It stays locked to that partner until the pair
separates beyond S, then returns to searching; in `frozen` mode the parked
velocity is restored for the exit tick, in `recompute` mode a fresh search
velocity is used instead. Only motion is overridden while avoiding; best
tracking continues as usual.

Pairing is one-at-a-time with the nearest threat, so pairings need not be
mutual: i may flee k while k flees j. Crowded situations get resolved over
successive ticks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import COINCIDENT_EPS, Vec3, pair_fallback_unit, unit_separation

#: How an avoidance episode ends: restore the parked velocity, or rebuild
#: a search velocity from scratch.
RESUME_MODES = ("frozen", "recompute")


@dataclass
class CaMode:
    """Avoidance state of one particle.

    `partner` and `frozen_velocity` are set together while avoiding and are
    both None while searching.
    """

    partner: int | None = None
    frozen_velocity: Vec3 | None = None

    @property
    def avoiding(self) -> bool:
        return self.partner is not None


def ca_step(
    i: int,
    positions: np.ndarray,
    velocities: np.ndarray,
    mode: CaMode,
    safety_distance: float,
    speed: float,
    search_velocity: Vec3,
    resume: str = "frozen",
) -> tuple[Vec3, CaMode]:
    """One avoidance decision for particle i against the tick-start snapshot.

    positions/velocities are the (N, 3) pre-step arrays; `search_velocity`
    is the PSO velocity the particle would use this tick if unthreatened.
    Returns the velocity to move with and the particle's next mode.
    """
    if resume not in RESUME_MODES:
        raise ValueError(f"resume must be one of {RESUME_MODES}, got {resume!r}")
    if mode.avoiding:
        k = mode.partner
        d = float(np.linalg.norm(positions[i] - positions[k]))
        if d <= safety_distance:
            return speed * unit_separation(positions[i], positions[k], i, k), mode
        if resume == "frozen":
            return mode.frozen_velocity.copy(), CaMode()
        return search_velocity, CaMode()
    dist = np.linalg.norm(positions - positions[i], axis=1)
    dist[i] = np.inf
    k = int(np.argmin(dist))
    if dist[k] <= safety_distance:
        away = speed * unit_separation(positions[i], positions[k], i, k)
        return away, CaMode(partner=k, frozen_velocity=velocities[i].copy())
    return search_velocity, CaMode()


def ca_velocities(
    diff: np.ndarray,
    dist: np.ndarray,
    velocities: np.ndarray,
    partners: np.ndarray,
    frozen: np.ndarray,
    safety_distance: float,
    speed: float,
    search_velocities: np.ndarray,
    resume: str = "frozen",
) -> np.ndarray:
    """Vectorised `ca_step` over the whole swarm; one tick.

    diff/dist are the pairwise (N, N, 3) separations and (N, N) distances of
    the tick-start snapshot. `partners` ((N,) int, -1 = searching) and
    `frozen` ((N, 3)) are updated in place; returns the (N, 3) velocities.
    """
    n = dist.shape[0]
    idx = np.arange(n)
    d_self = dist + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    searching = partners < 0
    nearest = np.argmin(d_self, axis=1)
    entering = searching & (d_self[idx, nearest] <= safety_distance)
    partner_dist = d_self[idx, np.where(searching, 0, partners)]
    staying = ~searching & (partner_dist <= safety_distance)
    exiting = ~searching & ~staying

    frozen[entering] = velocities[entering]
    partners[entering] = nearest[entering]

    out = search_velocities.copy()
    avoiding = entering | staying
    if avoiding.any():
        rows = idx[avoiding]
        cols = partners[rows]
        sep = diff[rows, cols]
        d = dist[rows, cols]
        sep = sep / np.where(d >= COINCIDENT_EPS, d, 1.0)[:, None]
        for j in np.flatnonzero(d < COINCIDENT_EPS):  # coincident pair, hash fallback
            sep[j] = pair_fallback_unit(int(rows[j]), int(cols[j]))
        out[avoiding] = speed * sep
    if exiting.any():
        if resume == "frozen":
            out[exiting] = frozen[exiting]
        partners[exiting] = -1
    return out

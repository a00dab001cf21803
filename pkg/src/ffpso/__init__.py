"""Deterministic 3-D swarm goal search.

Plain particle-swarm optimisation, two force-field variants that add
inter-particle repulsion to the velocity update, and a suspend-and-repel
avoidance baseline, all running in a bounded arena with a sequential-goal
protocol, plus a seed-stable Monte Carlo sweep harness.
"""

from .avoidance import CaMode, ca_step
from .core import (
    Hyperparameters,
    ParticleState,
    SwarmState,
    Vec3,
    apply_velocity,
    fitness,
    norm,
    pso_velocity,
    unit_separation,
    update_bests,
    vec3,
)
from .fields import FieldKind, FieldSpec, ff_grav, ff_linear, ff_total, ffpso_velocity
from .harness import (
    CellStats,
    SweepSpec,
    SweepStats,
    field_curve,
    per_run_seed,
    read_stats_csv,
    run_sweep,
    write_stats_csv,
    write_trajectory_csv,
)
from .world import (
    Algorithm,
    ConfigError,
    CrashTracker,
    RunResult,
    Simulation,
    WorldConfig,
    check_goal,
    init_run,
    run,
)

__all__ = [
    "Algorithm",
    "CaMode",
    "CellStats",
    "ConfigError",
    "CrashTracker",
    "FieldKind",
    "FieldSpec",
    "Hyperparameters",
    "ParticleState",
    "RunResult",
    "Simulation",
    "SwarmState",
    "SweepSpec",
    "SweepStats",
    "Vec3",
    "WorldConfig",
    "apply_velocity",
    "ca_step",
    "check_goal",
    "ff_grav",
    "ff_linear",
    "ff_total",
    "ffpso_velocity",
    "field_curve",
    "fitness",
    "init_run",
    "norm",
    "per_run_seed",
    "pso_velocity",
    "read_stats_csv",
    "run",
    "run_sweep",
    "unit_separation",
    "update_bests",
    "vec3",
    "write_stats_csv",
    "write_trajectory_csv",
]

__version__ = "0.1.0"

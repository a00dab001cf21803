"""Flat key=value config files and the built-in presets.

The accepted format is one `key = value` pair per line; blank lines and
lines starting with `#` are ignored, as is anything after a `#` inside a
line. Unknown keys are errors so typos fail fast instead of silently
running a default. Vectors are three whitespace-separated numbers, the goal
list separates vectors with `;`, and list values accept either whitespace
or comma separators (`swarm_sizes` also accepts `LO..HI` ranges).

See README.md for the full key reference.
"""

from __future__ import annotations

from dataclasses import fields as dataclass_fields
from typing import Optional

import numpy as np

from .harness import SweepSpec
from .world import Algorithm, ConfigError, WorldConfig

#: All values a `paper-sim` run or sweep starts from. The arena, goals,
#: update weights, safety distance, decay exponent, and tick cap follow the
#: reference simulation setup; the speed cap keeps velocities in a
#: quadrotor-plausible range (the update equations alone grow them without
#: bound at omega = 1).
PAPER_SIM_PRESET: dict[str, str] = {
    "arena_min": "0 0 0",
    "arena_max": "10 10 5",
    "goals": "3 5 2.5; 7 5 2.5",
    "omega": "1.0",
    "theta1": "1.0",
    "theta2": "1.0",
    "theta3": "1.0",
    "safety_distance": "0.4",
    "exponent": "1.5",
    "particle_radius": "0.0",
    "max_ticks": "1200",
    "max_speed": "0.2",
    "detection_radius": "0.2",
    "crash_radius": "0.1",
    "algorithm": "ffpso-lin",
    "swarm_size": "5",
    # sweep grid defaults
    "algorithms": "pso, pso-ca, ffpso-lin, ffpso-grav",
    "swarm_sizes": "2..10",
    "runs_per_cell": "100",
}

PRESETS = {"paper-sim": PAPER_SIM_PRESET}

WORLD_KEYS = {f.name for f in dataclass_fields(WorldConfig)}
SWEEP_KEYS = {"algorithms", "swarm_sizes", "runs_per_cell", "base_seed", "output_csv"}


def parse_kv(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse the flat key=value format into a string map."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _parse_vec3(value: str, key: str) -> np.ndarray:
    parts = value.replace(",", " ").split()
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected three numbers, got {value!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ConfigError(f"{key}: expected three numbers, got {value!r}") from None


def _parse_goals(value: str) -> tuple[np.ndarray, ...]:
    chunks = [c for c in value.split(";") if c.strip()]
    if not chunks:
        raise ConfigError(f"goals: expected at least one 'x y z' entry, got {value!r}")
    return tuple(_parse_vec3(c, "goals") for c in chunks)


def _parse_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value, 0)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _parse_algorithm(value: str, key: str = "algorithm") -> Algorithm:
    try:
        return Algorithm(value.strip().lower())
    except ValueError:
        names = ", ".join(a.value for a in Algorithm)
        raise ConfigError(f"{key}: unknown algorithm {value!r} (choose from {names})") from None


def _parse_algorithms(value: str) -> list[Algorithm]:
    if value.strip().lower() == "all":
        return list(Algorithm)
    parts = [p for p in value.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"algorithms: expected at least one name, got {value!r}")
    return [_parse_algorithm(p, "algorithms") for p in parts]


def _parse_sizes(value: str) -> list[int]:
    text = value.strip()
    if ".." in text:
        lo_txt, hi_txt = text.split("..", 1)
        lo, hi = _parse_int(lo_txt.strip(), "swarm_sizes"), _parse_int(hi_txt.strip(), "swarm_sizes")
        if hi < lo:
            raise ConfigError(f"swarm_sizes: empty range {value!r}")
        return list(range(lo, hi + 1))
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"swarm_sizes: expected sizes, got {value!r}")
    return [_parse_int(p, "swarm_sizes") for p in parts]


def _world_kwargs(kv: dict[str, str]) -> dict:
    kwargs: dict = {}
    for key, value in kv.items():
        if key in ("arena_min", "arena_max"):
            kwargs[key] = _parse_vec3(value, key)
        elif key == "goals":
            kwargs[key] = _parse_goals(value)
        elif key == "algorithm":
            kwargs[key] = _parse_algorithm(value)
        elif key in ("swarm_size", "max_ticks", "seed"):
            kwargs[key] = _parse_int(value, key)
        elif key == "max_speed":
            kwargs[key] = None if value.lower() == "none" else _parse_float(value, key)
        elif key in ("ca_resume", "random_mode"):
            kwargs[key] = value.strip().lower()
        else:  # remaining WorldConfig fields are plain floats
            kwargs[key] = _parse_float(value, key)
    return kwargs


def build_world_config(
    kv: Optional[dict[str, str]] = None,
    preset: Optional[str] = None,
    seed: Optional[int] = None,
    algorithm: Optional[str] = None,
    swarm_size: Optional[int] = None,
) -> WorldConfig:
    """Assemble a WorldConfig from preset values, file values, and overrides.

    Precedence, lowest first: preset, config file, explicit flags.
    """
    merged = dict(_preset_values(preset))
    if kv:
        unknown = sorted(set(kv) - WORLD_KEYS - SWEEP_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(kv)
    merged = {k: v for k, v in merged.items() if k in WORLD_KEYS}
    if algorithm is not None:
        merged["algorithm"] = algorithm
    if swarm_size is not None:
        merged["swarm_size"] = str(swarm_size)
    if seed is not None:
        merged["seed"] = str(seed)
    if "swarm_size" not in merged:
        raise ConfigError("swarm_size is required (set it in the config or use --preset)")
    if "algorithm" not in merged:
        raise ConfigError("algorithm is required (set it in the config or use --preset)")
    config = WorldConfig(**_world_kwargs(merged))
    config.validate()
    return config


def build_sweep_spec(
    kv: Optional[dict[str, str]] = None,
    preset: Optional[str] = None,
    seed: Optional[int] = None,
) -> tuple[SweepSpec, Optional[str]]:
    """Assemble a SweepSpec plus the optional output_csv path from the file."""
    merged = dict(_preset_values(preset))
    if kv:
        unknown = sorted(set(kv) - WORLD_KEYS - SWEEP_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(kv)
    for key in ("algorithms", "swarm_sizes", "runs_per_cell"):
        if key not in merged:
            raise ConfigError(f"{key} is required for a sweep (set it in the config or use --preset)")
    algorithms = _parse_algorithms(merged["algorithms"])
    world_kv = {k: v for k, v in merged.items() if k in WORLD_KEYS}
    # Cells overwrite these; give the template legal placeholders if absent.
    world_kv.setdefault("algorithm", algorithms[0].value)
    world_kv.setdefault("swarm_size", "2")
    base = WorldConfig(**_world_kwargs(world_kv))
    spec = SweepSpec(
        algorithms=algorithms,
        swarm_sizes=_parse_sizes(merged["swarm_sizes"]),
        runs_per_cell=_parse_int(merged["runs_per_cell"], "runs_per_cell"),
        base_config=base,
        base_seed=seed if seed is not None else _parse_int(merged.get("base_seed", "0"), "base_seed"),
    )
    spec.validate()
    return spec, merged.get("output_csv")


def _preset_values(preset: Optional[str]) -> dict[str, str]:
    if preset is None:
        return {}
    try:
        return PRESETS[preset]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {preset!r} (available: {known})") from None

"""Command-line interface.

Subcommands:
  run         execute one run and print its result as JSON
  sweep       execute a (algorithm x swarm size) grid and write a stats CSV
  field-curve sample a repulsion kernel's strength-vs-distance curve to CSV
  validate    parse and check a config without running anything

Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import PRESETS, build_sweep_spec, build_world_config, parse_kv
from .fields import FieldKind, FieldSpec
from .harness import field_curve, run_sweep, write_stats_csv, write_trajectory_csv
from .world import ConfigError, run


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we reserve 2 for I/O
        raise _UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key=value config file")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="named built-in defaults")
    parser.add_argument("--seed", type=int, help="seed override (unsigned 64-bit)")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ffpso", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single run, print JSON result")
    _add_common(p_run)
    p_run.add_argument("--algorithm", help="algorithm override (pso, pso-ca, ffpso-lin, ffpso-grav)")
    p_run.add_argument("--swarm-size", type=int, help="swarm size override")
    p_run.add_argument("--dump-trajectory", metavar="PATH", help="write tick,particle,x,y,z,vx,vy,vz CSV")

    p_sweep = sub.add_parser("sweep", help="run a sweep grid, write stats CSV")
    _add_common(p_sweep)
    p_sweep.add_argument("--parallelism", type=int, default=1, help="worker processes (default 1)")
    p_sweep.add_argument("--out", metavar="PATH", help="stats CSV path (default sweep_stats.csv)")

    p_curve = sub.add_parser("field-curve", help="sample kernel strength vs distance to CSV")
    p_curve.add_argument("--kind", choices=[k.value for k in FieldKind], default="linear")
    p_curve.add_argument("--safety-distance", type=float, default=5.0)
    p_curve.add_argument("--exponent", type=float, default=1.5)
    p_curve.add_argument("--cap", type=float, default=1e3)
    p_curve.add_argument("--radius-sum", type=float, default=0.0, help="combined body radii offset")
    p_curve.add_argument("--d-min", type=float, default=0.05)
    p_curve.add_argument("--d-max", type=float, default=6.0)
    p_curve.add_argument("--samples", type=int, default=200)
    p_curve.add_argument("--out", metavar="PATH", required=True)

    p_val = sub.add_parser("validate", help="check a config and exit")
    _add_common(p_val)
    return parser


def _load_kv(path: str | None) -> dict[str, str] | None:
    if path is None:
        return None
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise exc
    return parse_kv(text, source=path)


def _cmd_run(args) -> int:
    kv = _load_kv(args.config)
    config = build_world_config(
        kv,
        preset=args.preset,
        seed=args.seed,
        algorithm=args.algorithm,
        swarm_size=args.swarm_size,
    )
    result = run(config, record_trajectory=args.dump_trajectory is not None)
    if args.dump_trajectory is not None:
        write_trajectory_csv(result, args.dump_trajectory)
    print(json.dumps(result.to_json_dict()))
    return 0


def _cmd_sweep(args) -> int:
    kv = _load_kv(args.config)
    spec, out_from_file = build_sweep_spec(kv, preset=args.preset, seed=args.seed)
    stats = run_sweep(spec, parallelism=args.parallelism)
    out = args.out or out_from_file or "sweep_stats.csv"
    write_stats_csv(stats, out)
    print(f"wrote {len(stats.cells)} cells to {out}")
    return 0


def _cmd_field_curve(args) -> int:
    spec = FieldSpec(
        kind=FieldKind(args.kind),
        safety_distance=args.safety_distance,
        exponent=args.exponent,
        magnitude_cap=args.cap,
    )
    field_curve(spec, args.d_min, args.d_max, args.samples, args.out, radius_sum=args.radius_sum)
    print(f"wrote {args.samples} samples to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    kv = _load_kv(args.config)
    if kv is not None and ("algorithms" in kv or "runs_per_cell" in kv):
        build_sweep_spec(kv, preset=args.preset, seed=args.seed)
    else:
        build_world_config(kv, preset=args.preset, seed=args.seed)
    print("ok")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "field-curve": _cmd_field_curve,
    "validate": _cmd_validate,
}


def cli_main(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = exc.filename if exc.filename else ""
        print(f"error: {exc.strerror or exc}: {name}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()

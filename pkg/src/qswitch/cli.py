"""Command-line front end: ``qswitch [options]``.

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .fidelity import QuadratureSpec
from .sweep import ConfigError, Format, Mode, SweepConfig, run_sweep, to_csv, to_json

EXIT_CONFIG = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="qswitch",
        description="Sweep bit-flip/phase-flip error probabilities and tabulate teleportation "
        "fidelity with switch-based versus definite-order entanglement distribution.",
    )
    ap.add_argument("--config", type=Path, help="file of key=value lines; flags take precedence")
    ap.add_argument("--p-steps", type=int, default=21)
    ap.add_argument("--q-steps", type=int, default=21)
    ap.add_argument("--p-min", type=float, default=0.0)
    ap.add_argument("--p-max", type=float, default=1.0)
    ap.add_argument("--q-min", type=float, default=0.0)
    ap.add_argument("--q-max", type=float, default=1.0)
    ap.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.BOTH.value)
    ap.add_argument("--quadrature", help="det:NxM or mc:SAMPLES; adds numerically integrated columns")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--herald-trials", type=int, default=0,
                    help="sample this many control measurements per grid point")
    ap.add_argument("--diagonal", action="store_true", help="only evaluate q = p (p grid)")
    ap.add_argument("--output", type=Path, help="output file (default: stdout)")
    ap.add_argument("--format", choices=[f.value for f in Format], default=Format.CSV.value)
    ap.add_argument("--workers", type=int, default=1)
    return ap


def read_config_file(path: Path) -> List[str]:
    """Turn ``key=value`` lines into the equivalent argv fragment."""
    argv: List[str] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if flag == "--diagonal":
            if value.lower() in ("1", "true", "yes"):
                argv.append(flag)
            continue
        argv += [flag, value]
    return argv


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    quad = None
    if args.quadrature:
        try:
            quad = QuadratureSpec.parse(args.quadrature, seed=args.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return SweepConfig(
        p_steps=args.p_steps,
        q_steps=args.q_steps,
        p_range=(args.p_min, args.p_max),
        q_range=(args.q_min, args.q_max),
        mode=Mode(args.mode),
        quadrature=quad,
        seed=args.seed,
        herald_trials=args.herald_trials,
        diagonal=args.diagonal,
        output_path=args.output,
        format=Format(args.format),
        workers=args.workers,
    )


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            try:
                file_argv = read_config_file(args.config)
            except OSError as exc:
                print(f"qswitch: cannot read config: {exc}", file=sys.stderr)
                return EXIT_IO
            args = parser.parse_args(file_argv + argv)
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"qswitch: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        table = run_sweep(config)
    except OSError as exc:
        print(f"qswitch: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if config.output_path is None:
        sys.stdout.write(to_csv(table) if config.format is Format.CSV else to_json(table))
    return 0


if __name__ == "__main__":
    sys.exit(main())

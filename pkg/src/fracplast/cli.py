"""Command-line entry point: ``fracplast run | sweep | verify``.

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import OUTPUT_ROOT_ENV, RunConfig, parse_config
from .experiments import PRESETS, SweepSpec, run_single, run_sweep
from .solver import ConfigurationError, SolverError
from .verify import format_report, run_checks

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3

# flag name -> RunConfig field
_OVERRIDES = {
    "alpha": float,
    "ell_fraction": float,
    "m": int,
    "l": float,
    "E": float,
    "sigma_Y": float,
    "u_bar_fraction": float,
    "body_force": float,
    "body_force_profile": str,
    "body_force_fraction": float,
    "n_steps": int,
    "end_convention": str,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_overrides(p: argparse.ArgumentParser, skip: tuple[str, ...] = ()) -> None:
    g = p.add_argument_group("parameter overrides (win over the config file)")
    for name, typ in _OVERRIDES.items():
        if name not in skip:
            g.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracplast", description="Fractional nonlocal elasto-plastic bar experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="run one configuration")
    p_run.add_argument("--config", required=True, help="flat JSON config file")
    p_run.add_argument("--out", help=f"output directory (default: config 'output', or ${OUTPUT_ROOT_ENV})")
    _add_overrides(p_run)

    p_sweep = sub.add_parser("sweep", help="run a figure family or an explicit alpha x ell x m grid")
    p_sweep.add_argument("--preset", choices=sorted(PRESETS))
    p_sweep.add_argument("--alphas", type=float, nargs="+")
    p_sweep.add_argument("--ells", type=float, nargs="+", help="ell as a fraction of l")
    p_sweep.add_argument("--ms", type=int, nargs="+")
    p_sweep.add_argument("--config", help="base config for every point")
    p_sweep.add_argument("--out", help=f"output root (default: ${OUTPUT_ROOT_ENV} or ./sweep)")
    p_sweep.add_argument("--workers", type=int, default=None)
    _add_overrides(p_sweep, skip=("alpha", "ell_fraction", "m"))

    p_verify = sub.add_parser("verify", help="run the invariant battery")
    p_verify.add_argument("--perturb-weights", type=float, default=0.0, metavar="X",
                          help="scale quadrature weights by 1+X (fault-injection self-test)")
    return parser


def _overrides(args) -> dict:
    return {k: getattr(args, k, None) for k in _OVERRIDES}


def _cmd_run(args) -> int:
    config = parse_config(args.config, _overrides(args))
    out = Path(args.out) if args.out else Path(config.output)
    for line in config.header_lines():
        print(line)
    history = run_single(config, out)
    print(f"peak plastic strain {abs(history[-1].eps_plastic).max():.6e}; results in {out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    explicit = (args.alphas, args.ells, args.ms)
    if args.preset and any(v is not None for v in explicit):
        raise ConfigurationError("use either --preset or --alphas/--ells/--ms, not both")
    if args.config:
        base = parse_config(args.config, {"alpha": 1.0, "ell_fraction": 0.1, **_overrides(args)})
    else:
        extra = {k: v for k, v in _overrides(args).items() if v is not None}
        base = RunConfig(alpha=1.0, ell_fraction=0.1, **extra)
    if args.preset:
        spec = SweepSpec.preset(args.preset, base)
    else:
        if any(v is None for v in explicit):
            raise ConfigurationError("explicit sweep needs --alphas, --ells and --ms (or use --preset)")
        spec = SweepSpec(tuple(args.alphas), tuple(args.ells), tuple(args.ms), base)
    root = Path(args.out or os.environ.get(OUTPUT_ROOT_ENV) or "sweep")
    results = run_sweep(spec, root, args.workers)
    failed = [r for r in results if r.status != "ok"]
    print(f"{len(results)} runs, {len(failed)} failed; summary in {root / 'summary.csv'}")
    for r in failed:
        print(f"{r.name}: {r.status}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def _cmd_verify(args) -> int:
    results = run_checks(args.perturb_weights)
    format_report(results, sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "verify": _cmd_verify}[args.command]
    try:
        return handler(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

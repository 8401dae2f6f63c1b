"""Command-line interface.

Subcommands:
    eval     one equilibrium (entry game, or a fixed M via --M)
    entry    entry game only
    sweep    parameter sweep to CSV (and a PNG beside it)
    verify   run the numerical verification oracle
    figures  emit the reference figure datasets and plots
    compare  neutral vs non-neutral at one parameter set

All model parameters are settable by flag (--a, --theta, ...) or through a
key=value config file (--config); flags override file values.

Exit codes: 0 success, 1 validation error, 2 solver non-convergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .entry import entry_count, market_outcome
from .equilibria import (
    cp_profit_at_equilibrium,
    equilibrium,
    isp_profit_at_equilibrium,
    welfare_at,
)
from .harness import (
    SweepSpec,
    compare_regimes,
    outcome_to_dict,
    point_to_dict,
    reproduce_figures,
    sweep,
    write_sweep_csv,
)
from .model import PARAM_NAMES, MarketParams, ParameterError, Regime, validate_params
from .oracle import VerifyTolerances, verify_equilibrium
from .solvers import SolverError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_VERIFICATION = 3


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters (defaults in brackets)")
    defaults = MarketParams()
    for name in PARAM_NAMES:
        kind = int if name == "N" else float
        group.add_argument(
            f"--{name}",
            type=kind,
            default=None,
            help=f"[{getattr(defaults, name)}]",
        )
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="key=value file with model parameters; flags override it",
    )


def _read_config(path: Path) -> dict[str, float]:
    values: dict[str, float] = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in PARAM_NAMES:
            raise ParameterError(f"{path}:{lineno}: unknown parameter {key!r}")
        try:
            values[key] = int(val) if key == "N" else float(val)
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    return values


def _params_from_args(args: argparse.Namespace) -> MarketParams:
    values: dict[str, float] = {}
    if args.config is not None:
        values.update(_read_config(args.config))
    for name in PARAM_NAMES:
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    return validate_params(dataclasses.replace(MarketParams(), **values))


def _regime(arg: str) -> Regime:
    try:
        return Regime(arg)
    except ValueError:
        raise ParameterError(
            f"unknown regime {arg!r}; choose 'neutral' or 'nonneutral'"
        ) from None


def _regime_list(arg: str) -> list[Regime]:
    if arg == "both":
        return [Regime.NEUTRAL, Regime.NONNEUTRAL]
    return [_regime(part) for part in arg.split(",")]


def _emit(obj: object) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _cmd_eval(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    regime = _regime(args.regime)
    if args.M is not None:
        point = equilibrium(params, args.M, regime)
        _emit(
            {
                "regime": regime.value,
                "m": args.M,
                "m_overridden": True,
                "point": point_to_dict(point),
                "uw": welfare_at(params, point),
                "isp_profit_each": isp_profit_at_equilibrium(params, args.M, regime),
                "cp_profit_each": cp_profit_at_equilibrium(params, args.M, regime),
            }
        )
    else:
        _emit(outcome_to_dict(market_outcome(params, regime)))
    return EXIT_OK


def _cmd_entry(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    regime = _regime(args.regime)
    res = entry_count(params, regime)
    _emit(
        {
            "regime": regime.value,
            "m_star": res.m_star,
            "entered": res.entered,
            "profitable": res.profitable,
            "cp_profit_at_m": res.cp_profit_at_M,
            "cp_profit_at_m_plus_1": res.cp_profit_at_M_plus_1,
        }
    )
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    spec = SweepSpec.linear(
        args.param,
        args.start,
        args.stop,
        args.steps,
        regimes=tuple(_regime_list(args.regimes)),
    )
    rows = sweep(params, spec)
    if args.out is None:
        from .harness import rows_to_csv

        sys.stdout.write(rows_to_csv(rows))
    else:
        out = write_sweep_csv(rows, args.out)
        if not args.no_plot:
            from . import plots

            plots.render_sweep(rows, spec.axis, out.with_suffix(".png"))
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"warning: {r.axis}={r.value} {r.regime.value}: {r.error}", file=sys.stderr)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    tol = VerifyTolerances(foc=args.tol_foc, gain_abs=args.tol_gain)
    reports = []
    for regime in _regime_list(args.regimes):
        if args.M is not None:
            M = args.M
        else:
            M = entry_count(params, regime).entered
            if M == 0:
                reports.append(
                    {
                        "regime": regime.value,
                        "m": 0,
                        "passed": True,
                        "note": "no CP enters; nothing to verify",
                    }
                )
                continue
        reports.append(verify_equilibrium(params, M, regime, tol).to_dict())
    _emit(reports if len(reports) > 1 else reports[0])
    if all(r["passed"] for r in reports):
        return EXIT_OK
    return EXIT_VERIFICATION


def _cmd_figures(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    files = reproduce_figures(params, args.out, plots=not args.no_plots)
    for f in files:
        print(f)
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    _emit(compare_regimes(params).to_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nnmarket",
        description="Two-sided ISP/CP market equilibria under neutral and "
        "non-neutral regimes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="compute one equilibrium")
    p_eval.add_argument("--regime", required=True, choices=["neutral", "nonneutral"])
    p_eval.add_argument("--M", type=int, default=None, help="override the CP count")
    _add_param_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_entry = sub.add_parser("entry", help="solve the CP entry game")
    p_entry.add_argument("--regime", required=True, choices=["neutral", "nonneutral"])
    _add_param_flags(p_entry)
    p_entry.set_defaults(func=_cmd_entry)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter to CSV")
    p_sweep.add_argument("--param", required=True, choices=list(PARAM_NAMES))
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--regimes", default="both", help="'neutral', 'nonneutral', or 'both'")
    p_sweep.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
    p_sweep.add_argument("--no-plot", action="store_true", help="skip the PNG next to the CSV")
    _add_param_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the verification oracle")
    p_verify.add_argument("--regimes", default="both", help="'neutral', 'nonneutral', or 'both'")
    p_verify.add_argument("--M", type=int, default=None, help="verify at this CP count")
    p_verify.add_argument("--tol-foc", type=float, default=1e-8)
    p_verify.add_argument("--tol-gain", type=float, default=1e-9)
    _add_param_flags(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_fig = sub.add_parser("figures", help="emit reference figure datasets")
    p_fig.add_argument("--out", type=Path, required=True, help="output directory")
    p_fig.add_argument("--no-plots", action="store_true", help="datasets only, no PNGs")
    _add_param_flags(p_fig)
    p_fig.set_defaults(func=_cmd_figures)

    p_cmp = sub.add_parser("compare", help="compare the two regimes")
    _add_param_flags(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

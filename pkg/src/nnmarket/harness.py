"""Parameter sweeps, figure-dataset reproduction, and regime comparison.

Sweeps run the full pipeline (entry game plus equilibrium) at every grid
point and serialize rows with a fixed schema and fixed float formatting, so
identical inputs always produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .entry import entry_count, market_outcome
from .equilibria import MarketOutcome
from .model import PARAM_NAMES, MarketParams, ParameterError, Regime, gamma, validate_params
from .solvers import SolverError

CSV_HEADER = "axis,value,regime,M,t,c,p,q,uw,isp_profit,cp_profit"

# Reconstructed sweep grids behind the reference figure datasets: ten equally
# spaced points per axis, and a 40-point diversity-curve grid.
FIGURE_GRIDS: dict[str, tuple[float, float, int]] = {
    "theta": (6.0, 30.0, 10),
    "a": (10.0, 18.0, 10),
    "v": (0.1, 0.4, 10),
    "c_e": (0.04, 0.52, 10),
}
DIVERSITY_CURVE_GRID = (0.0, 134.0, 40)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: an axis, its grid values, and which regimes to run."""

    axis: str
    values: tuple[float, ...]
    regimes: tuple[Regime, ...] = (Regime.NEUTRAL, Regime.NONNEUTRAL)

    def __post_init__(self) -> None:
        if self.axis not in PARAM_NAMES:
            raise ParameterError(
                f"unknown sweep axis {self.axis!r}; choose one of {PARAM_NAMES}"
            )
        if not self.values:
            raise ParameterError("sweep needs at least one grid value")
        if not self.regimes:
            raise ParameterError("sweep needs at least one regime")

    @classmethod
    def linear(
        cls,
        axis: str,
        start: float,
        stop: float,
        steps: int,
        regimes: tuple[Regime, ...] = (Regime.NEUTRAL, Regime.NONNEUTRAL),
    ) -> "SweepSpec":
        """Equally spaced grid with ``steps`` points including both ends."""
        if steps < 1:
            raise ParameterError("steps must be >= 1")
        if steps == 1:
            vals = (float(start),)
        else:
            h = (stop - start) / (steps - 1)
            vals = tuple(float(start + i * h) for i in range(steps))
        return cls(axis=axis, values=vals, regimes=regimes)


@dataclass(frozen=True)
class SweepRow:
    """One (grid value, regime) record; zero-filled when nobody enters."""

    axis: str
    value: float
    regime: Regime
    M: int
    t: float
    c: float
    p: float
    q: float
    uw: float
    isp_profit: float
    cp_profit: float
    error: str | None = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["regime"] = self.regime.value
        return d


def _row_from_outcome(axis: str, value: float, out: MarketOutcome) -> SweepRow:
    pt = out.point
    return SweepRow(
        axis=axis,
        value=value,
        regime=out.regime,
        M=out.M,
        t=pt.t if pt else 0.0,
        c=pt.c if pt else 0.0,
        p=pt.p if pt else 0.0,
        q=pt.q if pt else 0.0,
        uw=out.uw,
        isp_profit=out.isp_profit_each,
        cp_profit=out.cp_profit_each,
    )


def _with_value(params: MarketParams, axis: str, value: float) -> MarketParams:
    if axis == "N":
        if abs(value - round(value)) > 1e-9:
            raise ParameterError(f"N grid values must be integers, got {value}")
        return replace(params, N=int(round(value)))
    return replace(params, **{axis: float(value)})


def sweep(params: MarketParams, spec: SweepSpec) -> list[SweepRow]:
    """Run the full pipeline over the grid; rows ordered by (value, regime).

    Every grid point must pass parameter validation.  Solver failures at a
    point are recorded in that row's ``error`` field and the sweep continues.
    """
    for value in spec.values:
        validate_params(_with_value(params, spec.axis, value))
    regimes = sorted(set(spec.regimes), key=lambda r: r.value)
    rows: list[SweepRow] = []
    for value in spec.values:
        point_params = _with_value(params, spec.axis, value)
        for regime in regimes:
            try:
                out = market_outcome(point_params, regime)
                rows.append(_row_from_outcome(spec.axis, value, out))
            except SolverError as exc:
                rows.append(
                    SweepRow(
                        axis=spec.axis,
                        value=value,
                        regime=regime,
                        M=0,
                        t=math.nan,
                        c=math.nan,
                        p=math.nan,
                        q=math.nan,
                        uw=math.nan,
                        isp_profit=math.nan,
                        cp_profit=math.nan,
                        error=str(exc),
                    )
                )
    return rows


def _fmt(x: float) -> str:
    # Fixed 6-significant-digit formatting keeps reruns byte-identical.
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.6g}"


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.axis,
                    _fmt(r.value),
                    r.regime.value,
                    "" if r.error else str(r.M),
                    _fmt(r.t),
                    _fmt(r.c),
                    _fmt(r.p),
                    _fmt(r.q),
                    _fmt(r.uw),
                    _fmt(r.isp_profit),
                    _fmt(r.cp_profit),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows: Iterable[SweepRow], path: Path | str) -> Path:
    path = Path(path)
    try:
        path.write_text(rows_to_csv(rows))
    except OSError as exc:
        raise OSError(f"could not write sweep CSV {path}: {exc}") from exc
    return path


@dataclass(frozen=True)
class RegimeComparison:
    """Both regimes' outcomes at one parameter set, with deltas."""

    neutral: MarketOutcome
    nonneutral: MarketOutcome
    delta_m: int
    delta_uw: float
    delta_p: float | None
    recommended: str

    def to_dict(self) -> dict:
        return {
            "neutral": outcome_to_dict(self.neutral),
            "nonneutral": outcome_to_dict(self.nonneutral),
            "delta_m": self.delta_m,
            "delta_uw": self.delta_uw,
            "delta_p": self.delta_p,
            "recommended": self.recommended,
        }


def compare_regimes(params: MarketParams) -> RegimeComparison:
    """Run both regimes and report non-neutral minus neutral deltas.

    The recommendation picks the regime with the higher user welfare.
    ``delta_p`` is None when either regime attracts no CPs (no price then).
    """
    ne = market_outcome(params, Regime.NEUTRAL)
    nn = market_outcome(params, Regime.NONNEUTRAL)
    delta_p = None
    if ne.point is not None and nn.point is not None:
        delta_p = nn.point.p - ne.point.p
    if nn.uw > ne.uw:
        rec = Regime.NONNEUTRAL.value
    elif ne.uw > nn.uw:
        rec = Regime.NEUTRAL.value
    else:
        rec = "tie"
    return RegimeComparison(
        neutral=ne,
        nonneutral=nn,
        delta_m=nn.M - ne.M,
        delta_uw=nn.uw - ne.uw,
        delta_p=delta_p,
        recommended=rec,
    )


def point_to_dict(point) -> dict:
    d = {
        "regime": point.regime.value,
        "m": point.M,
        "t": point.t,
        "c": point.c,
        "p": point.p,
        "q": point.q,
        "pi": point.pi,
        "gamma": point.gamma,
    }
    for key in ("r_share", "k_tilde", "x"):
        val = getattr(point, key)
        if val is not None:
            d[key] = val
    return d


def outcome_to_dict(out: MarketOutcome) -> dict:
    return {
        "regime": out.regime.value,
        "m": out.M,
        "point": point_to_dict(out.point) if out.point else None,
        "uw": out.uw,
        "isp_profit_each": out.isp_profit_each,
        "cp_profit_each": out.cp_profit_each,
    }


def _linspace(start: float, stop: float, steps: int) -> list[float]:
    if steps == 1:
        return [float(start)]
    h = (stop - start) / (steps - 1)
    return [float(start + i * h) for i in range(steps)]


def diversity_curve(params: MarketParams) -> list[tuple[str, float, float]]:
    """Rows (series, M, M*gamma) for the diversity-value curve plus the two
    entry markers.  M = 0 carries the continuous limit 0."""
    lo, hi, steps = DIVERSITY_CURVE_GRID
    rows: list[tuple[str, float, float]] = []
    for m in _linspace(lo, hi, steps):
        mg = 0.0 if m == 0.0 else m * gamma(params, m)
        rows.append(("curve", m, mg))
    for regime in (Regime.NEUTRAL, Regime.NONNEUTRAL):
        entered = entry_count(params, regime).entered
        if entered > 0:
            rows.append((regime.value, float(entered), entered * gamma(params, entered)))
    return rows


def diversity_curve_csv(rows: Sequence[tuple[str, float, float]]) -> str:
    lines = ["series,M,m_gamma"]
    for series, m, mg in rows:
        lines.append(f"{series},{_fmt(m)},{_fmt(mg)}")
    return "\n".join(lines) + "\n"


def reproduce_figures(
    defaults: MarketParams, out_dir: Path | str, plots: bool = True
) -> list[Path]:
    """Emit the reference figure datasets into ``out_dir``.

    Writes one CSV per sweep axis (theta, a, v, c_e), the diversity-curve
    CSV, and a manifest recording the parameters and grids.  When ``plots``
    is true each dataset is also rendered to a PNG next to its CSV.
    Returns the list of files written.
    """
    validate_params(defaults)
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"could not create output directory {out_dir}: {exc}") from exc

    written: list[Path] = []
    sweep_files: dict[str, str] = {
        "theta": "fig2_theta.csv",
        "a": "fig2_a.csv",
        "v": "fig4_v.csv",
        "c_e": "fig4_ce.csv",
    }
    sweep_rows: dict[str, list[SweepRow]] = {}
    for axis, fname in sweep_files.items():
        lo, hi, steps = FIGURE_GRIDS[axis]
        rows = sweep(defaults, SweepSpec.linear(axis, lo, hi, steps))
        sweep_rows[axis] = rows
        written.append(write_sweep_csv(rows, out_dir / fname))

    curve = diversity_curve(defaults)
    curve_path = out_dir / "fig3_mgamma.csv"
    curve_path.write_text(diversity_curve_csv(curve))
    written.append(curve_path)

    manifest = {
        "params": {name: getattr(defaults, name) for name in PARAM_NAMES},
        "grids": {
            axis: {"start": lo, "stop": hi, "steps": steps}
            for axis, (lo, hi, steps) in FIGURE_GRIDS.items()
        },
        "diversity_curve_grid": {
            "start": DIVERSITY_CURVE_GRID[0],
            "stop": DIVERSITY_CURVE_GRID[1],
            "steps": DIVERSITY_CURVE_GRID[2],
        },
        "files": sorted(f.name for f in written),
    }

    if plots:
        from . import plots as plotmod

        for axis, fname in sweep_files.items():
            png = out_dir / (Path(fname).stem + ".png")
            plotmod.render_sweep(sweep_rows[axis], axis, png)
            written.append(png)
        png = out_dir / "fig3_mgamma.png"
        plotmod.render_diversity_curve(curve, png)
        written.append(png)
        manifest["files"] = sorted(
            set(manifest["files"]) | {f.name for f in written}
        )

    manifest_path = out_dir / "manifest.json"
    manifest["files"] = sorted(set(manifest["files"]) | {"manifest.json"})
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(manifest_path)
    return written

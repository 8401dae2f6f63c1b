"""Small 1-D solvers shared by the entry game and the verification oracle."""

from __future__ import annotations

import math
from typing import Callable


class SolverError(RuntimeError):
    """An iterative solver failed to converge; the message carries diagnostics."""


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_root(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10
) -> float:
    """Root of f on [lo, hi] by bisection, to absolute bracket width ``tol``.

    Requires a sign change on the bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise SolverError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def golden_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10
) -> float:
    """Maximizer of a unimodal f on [lo, hi] by golden-section search.

    Refines until the bracket width falls below ``tol``.
    """
    c = hi - _INV_GOLDEN * (hi - lo)
    d = lo + _INV_GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_GOLDEN * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def bracket_maximum(
    f: Callable[[float], float],
    x0: float,
    step: float,
    lo_limit: float = -math.inf,
    max_doublings: int = 60,
) -> tuple[float, float]:
    """Bracket a maximum of f around x0 by doubling outward from ``step``.

    Returns (lo, hi) with an interior point beating both ends, or raises
    SolverError if no turnover is found (unbounded objective).
    """
    lo = max(x0 - step, lo_limit)
    hi = x0 + step
    for _ in range(max_doublings):
        if f(x0) >= f(lo) and f(x0) >= f(hi):
            return lo, hi
        step *= 2.0
        lo = max(x0 - step, lo_limit)
        hi = x0 + step
    raise SolverError(f"could not bracket a maximum around {x0}")


def _parabolic_polish(f: Callable[[float], float], x: float, h: float) -> float:
    """One parabola fit through (x-h, x, x+h); returns the vertex if sane.

    Golden-section alone leaves the returned point wandering inside the
    noise-flat region around a smooth maximum; a single quadratic fit with a
    step well above the noise floor pins the vertex much more tightly.
    """
    f0, fp, fm = f(x), f(x + h), f(x - h)
    denom = fp + fm - 2.0 * f0
    if not (math.isfinite(denom) and denom < 0.0):
        return x
    vertex = x + 0.5 * h * (fm - fp) / denom
    if abs(vertex - x) > 10.0 * h or not math.isfinite(vertex):
        return x
    return vertex


def golden_max_around(
    f: Callable[[float], float],
    x0: float,
    step: float,
    lo_limit: float = -math.inf,
    tol: float = 1e-10,
) -> float:
    """Golden-section maximization on a bracket grown by doubling around x0,
    followed by a parabolic polish of the vertex."""
    lo, hi = bracket_maximum(f, x0, step, lo_limit=lo_limit)
    x = golden_max(f, lo, hi, tol=tol)
    h = 1e-4 * (1.0 + abs(x))
    if x - h > lo_limit:
        x = _parabolic_polish(f, x, h)
    return x

"""CP entry game: how many content providers enter while entry is profitable.

Per-CP equilibrium profit, viewed as a function of integer M, is unimodal:
it rises with M up to a peak m_star and falls beyond it (its variations
follow g(M) = M^w * gamma(M)).  CPs enter while profit stays non-negative,
so the realized count is either 0 (profit negative even at the peak) or the
unique M >= m_star with profit(M) >= 0 > profit(M+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .equilibria import (
    MarketOutcome,
    cp_profit_at_equilibrium,
    equilibrium,
    isp_profit_at_equilibrium,
    welfare_at,
)
from .model import MarketParams, Regime, validate_params
from .solvers import SolverError, bisect_root

# Guard against pathological parameters producing unbounded entry.
MAX_ENTRY_SCAN = 10**6


@dataclass(frozen=True)
class EntryResult:
    """Outcome of the entry game.

    ``m_star`` is the unimodality peak of per-CP profit in M; ``entered`` is
    the realized CP count.  When ``entered`` > 0 the bracketing profits
    satisfy cp_profit_at_M >= 0 > cp_profit_at_M_plus_1.
    """

    m_star: float
    entered: int
    profitable: bool
    cp_profit_at_M: float
    cp_profit_at_M_plus_1: float


def m_star(v: float, w: float, k: float) -> float:
    """Peak of g(M) = M^w * gamma(M): the unique x > 0 solving

        x = ((1 - v - w) / k) * (e^{kx} - 1).

    Found by bracketing and bisection to absolute tolerance 1e-10.  The
    left-hand side minus the right is positive just above 0 (its derivative
    at 0 is v + w > 0) and tends to -infinity, so a sign change exists.
    """
    if not (0.0 < v + w < 1.0):
        raise ValueError(f"need 0 < v + w < 1, got {v + w}")
    if k <= 0.0:
        raise ValueError(f"need k > 0, got {k}")
    coef = (1.0 - v - w) / k

    def f(x: float) -> float:
        return x - coef * math.expm1(k * x)

    hi = 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise SolverError("no sign change found while bracketing m_star")
    return bisect_root(f, lo=1e-12, hi=hi, tol=1e-10)


def entry_count(params: MarketParams, regime: Regime) -> EntryResult:
    """Number of CPs entering the market under ``regime``.

    If profit is negative at both floor(m_star) and ceil(m_star) it is
    negative everywhere and nobody enters.  Otherwise scan upward from the
    peak for the unique crossing profit(M) >= 0 > profit(M+1).
    """
    validate_params(params)
    ms = m_star(params.v, params.w, params.k)

    def profit(M: int) -> float:
        return cp_profit_at_equilibrium(params, M, regime)

    lo = max(1, math.floor(ms))
    hi = max(1, math.ceil(ms))
    p_lo, p_hi = profit(lo), profit(hi)
    if p_lo < 0.0 and p_hi < 0.0:
        return EntryResult(
            m_star=ms,
            entered=0,
            profitable=False,
            cp_profit_at_M=p_lo,
            cp_profit_at_M_plus_1=p_hi,
        )
    M = lo if p_lo >= 0.0 else hi
    while profit(M + 1) >= 0.0:
        M += 1
        if M > MAX_ENTRY_SCAN:
            raise SolverError(
                f"entry scan exceeded {MAX_ENTRY_SCAN} CPs; parameters admit "
                "an implausibly large market"
            )
    return EntryResult(
        m_star=ms,
        entered=M,
        profitable=True,
        cp_profit_at_M=profit(M),
        cp_profit_at_M_plus_1=profit(M + 1),
    )


def market_outcome(params: MarketParams, regime: Regime) -> MarketOutcome:
    """Entry count plus the equilibrium summary at the entered count."""
    res = entry_count(params, regime)
    if res.entered == 0:
        return MarketOutcome(
            regime=regime,
            M=0,
            point=None,
            uw=0.0,
            isp_profit_each=0.0,
            cp_profit_each=0.0,
        )
    M = res.entered
    point = equilibrium(params, M, regime)
    return MarketOutcome(
        regime=regime,
        M=M,
        point=point,
        uw=welfare_at(params, point),
        isp_profit_each=isp_profit_at_equilibrium(params, M, regime),
        cp_profit_each=res.cp_profit_at_M,
    )

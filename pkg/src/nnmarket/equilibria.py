"""Closed-form symmetric equilibria for both regimes, with profit summaries.

Both regimes are solved by backward induction.  Non-neutral decision order:
ISP investments t, then CP side payments q, then ISP prices p, then CP
investments c.  In the neutral regime side payments are forbidden and each
ISP picks its investment and prices simultaneously.

All power laws are evaluated in log space (arguments are positive at any
interior equilibrium), which keeps extreme parameter sets from overflowing.
The derivations behind the formulas, including the normalization of the
diversity weight and the sign of the (1 - pi) exponent in the non-neutral
investment, are written up in docs/derivations.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import MarketParams, ParameterError, Regime, gamma, user_welfare


@dataclass(frozen=True)
class EquilibriumPoint:
    """A symmetric equilibrium of the market with M content providers.

    ``pi`` is the markup factor: the total per-click margin is p + q =
    theta * pi in both regimes.  ``r_share`` (non-neutral, zero for N = 1)
    measures how much of an investment deviation is absorbed by rivals'
    price responses; ``k_tilde`` is the non-neutral investment scale
    constant; ``x`` is the neutral auxiliary aggregate.
    """

    regime: Regime
    M: int
    t: float
    c: float
    p: float
    q: float
    pi: float
    gamma: float
    r_share: float | None = None
    k_tilde: float | None = None
    x: float | None = None


@dataclass(frozen=True)
class MarketOutcome:
    """Entry count plus the equilibrium summary at that count."""

    regime: Regime
    M: int
    point: EquilibriumPoint | None
    uw: float
    isp_profit_each: float
    cp_profit_each: float


def pi_markup(N: int, v: float) -> float:
    """Markup factor pi = 1 / (1 + v / (N (1 - v))), in (0, 1)."""
    return 1.0 / (1.0 + v / (N * (1.0 - v)))


def _r_share(N: int, v: float) -> float:
    # Fraction of the investment first-order condition offset by rival price
    # re-equilibration; identically 0 for a single ISP.
    if N == 1:
        return 0.0
    pi = pi_markup(N, v)
    num = 1.0 / pi + v / (1.0 - pi) - 1.0
    den = 1.0 / pi + 1.0 / (1.0 - pi) - 1.0
    return (N - 1) / N * num / den


def neutral_equilibrium(params: MarketParams, M: int) -> EquilibriumPoint:
    """Unique symmetric equilibrium of the neutral game (q forced to 0).

    Prices are p = theta * pi regardless of investments.  Investments:

        x = (1 - e^{-kM})^{1/(1-v)} * (theta w / alpha) * N^{(v+w-1)/(1-v)}
        t = [x^{1-v} (a v / beta)^v e^{-pi}]^{1/(1-v-w)}

    and c follows from the CP first-order condition at (t, p).
    """
    _check_m(M)
    p_ = params
    pi = pi_markup(p_.N, p_.v)
    g = gamma(p_, M)
    log_E = math.log(-math.expm1(-p_.k * M))
    log_x = (
        log_E / (1.0 - p_.v)
        + math.log(p_.theta * p_.w / p_.alpha)
        + (p_.v + p_.w - 1.0) / (1.0 - p_.v) * math.log(p_.N)
    )
    log_av_beta = math.log(p_.a * p_.v / p_.beta) if p_.a > 0 else -math.inf
    log_t = ((1.0 - p_.v) * log_x + p_.v * log_av_beta - pi) / (1.0 - p_.v - p_.w)
    t = math.exp(log_t)
    # c = ((v g / beta) * a N t^w e^{-pi})^{1/(1-v)}; a = 0 gives c = 0.
    if p_.a > 0:
        log_c = (
            math.log(p_.v * g / p_.beta)
            + math.log(p_.a * p_.N)
            + p_.w * log_t
            - pi
        ) / (1.0 - p_.v)
        c = math.exp(log_c)
    else:
        c = 0.0
    return EquilibriumPoint(
        regime=Regime.NEUTRAL,
        M=M,
        t=t,
        c=c,
        p=p_.theta * pi,
        q=0.0,
        pi=pi,
        gamma=g,
        x=math.exp(log_x),
    )


def nonneutral_equilibrium(params: MarketParams, M: int) -> EquilibriumPoint:
    """Unique symmetric equilibrium of the non-neutral game.

    Side payments are q = a - theta for every (CP, ISP) pair, independent of
    investments, and prices satisfy p + q = theta * pi.  The investment is

        t = ([(1-R) (M / K~) w/(1-v)]^{1-v}
             * theta e^{q/theta - pi} pi (1-pi)^{-v})^{1/(1-v-w)}

    with K~ = (alpha / gamma) * ((v/(1-v)) (v gamma / beta))^{-v/(1-v)}.
    Note the (1-pi)^{-v} factor, which follows from the investment
    first-order condition (docs/derivations.md).
    """
    _check_m(M)
    p_ = params
    pi = pi_markup(p_.N, p_.v)
    g = gamma(p_, M)
    R = _r_share(p_.N, p_.v)
    q = p_.a - p_.theta
    price = p_.theta * (1.0 + pi) - p_.a
    log_vg_beta = math.log(p_.v * g / p_.beta)
    log_k_tilde = (
        math.log(p_.alpha / g)
        - p_.v / (1.0 - p_.v) * (math.log(p_.v / (1.0 - p_.v)) + log_vg_beta)
    )
    log_t = (
        (1.0 - p_.v)
        * (math.log((1.0 - R) * M * p_.w / (1.0 - p_.v)) - log_k_tilde)
        + math.log(p_.theta)
        + (q / p_.theta - pi)
        + math.log(pi)
        - p_.v * math.log(1.0 - pi)
    ) / (1.0 - p_.v - p_.w)
    t = math.exp(log_t)
    log_c = (
        log_vg_beta
        + math.log(p_.N * p_.theta)
        + p_.w * log_t
        + (p_.a / p_.theta - (1.0 + pi))
    ) / (1.0 - p_.v)
    return EquilibriumPoint(
        regime=Regime.NONNEUTRAL,
        M=M,
        t=t,
        c=math.exp(log_c),
        p=price,
        q=q,
        pi=pi,
        gamma=g,
        r_share=R,
        k_tilde=math.exp(log_k_tilde),
    )


def equilibrium(params: MarketParams, M: int, regime: Regime) -> EquilibriumPoint:
    """Dispatch to the closed form for ``regime``."""
    if regime is Regime.NEUTRAL:
        return neutral_equilibrium(params, M)
    return nonneutral_equilibrium(params, M)


def cp_profit_at_equilibrium(params: MarketParams, M: int, regime: Regime) -> float:
    """Per-CP equilibrium profit.

        Pi_C = (N (a-q) gamma / (beta/v)^v)^{1/(1-v)}
               * t^{w/(1-v)} e^{(q/theta - pi)/(1-v)} * (1-v)  -  beta c_e

    The neutral value is the same expression with q = 0 and the neutral t.
    """
    _check_m(M)
    pt = equilibrium(params, M, regime)
    p_ = params
    if p_.a - pt.q <= 0.0:
        return -p_.beta * p_.c_e
    log_rev = (
        (
            math.log(p_.N * (p_.a - pt.q) * pt.gamma)
            - p_.v * math.log(p_.beta / p_.v)
            + p_.w * math.log(pt.t)
            + (pt.q / p_.theta - pt.pi)
        )
        / (1.0 - p_.v)
    )
    return math.exp(log_rev) * (1.0 - p_.v) - p_.beta * p_.c_e


def isp_profit_at_equilibrium(params: MarketParams, M: int, regime: Regime) -> float:
    """Per-ISP equilibrium profit.  In the non-neutral regime,

        Pi_T = M theta gamma (theta (v/(1-v)) (v gamma / beta))^{v/(1-v)}
               * t^{w/(1-v)} e^{(q/theta - pi)/(1-v)}
               * pi^{1/(1-v)} (1-pi)^{-v/(1-v)}  -  alpha t

    where the pricing condition was used to fold the per-click CP margin,
    a - q = theta, into the bracket.  The neutral value follows the same
    route with q = 0 (so the margin is a) and the neutral investment:

        Pi_T = M theta pi gamma (v gamma N a / beta)^{v/(1-v)}
               * t^{w/(1-v)} e^{-pi/(1-v)}  -  alpha t
    """
    _check_m(M)
    pt = equilibrium(params, M, regime)
    p_ = params
    if regime is Regime.NONNEUTRAL:
        log_rev = (
            math.log(M * p_.theta * pt.gamma)
            + p_.v
            / (1.0 - p_.v)
            * math.log(p_.theta * (p_.v / (1.0 - p_.v)) * (p_.v * pt.gamma / p_.beta))
            + p_.w / (1.0 - p_.v) * math.log(pt.t)
            + (pt.q / p_.theta - pt.pi) / (1.0 - p_.v)
            + math.log(pt.pi) / (1.0 - p_.v)
            - p_.v / (1.0 - p_.v) * math.log(1.0 - pt.pi)
        )
        return math.exp(log_rev) - p_.alpha * pt.t
    if p_.a == 0.0:
        return -p_.alpha * pt.t
    log_rev = (
        math.log(M * p_.theta * pt.pi * pt.gamma)
        + p_.v
        / (1.0 - p_.v)
        * math.log(p_.v * pt.gamma * p_.N * p_.a / p_.beta)
        + p_.w / (1.0 - p_.v) * math.log(pt.t)
        - pt.pi / (1.0 - p_.v)
    )
    return math.exp(log_rev) - p_.alpha * pt.t


def welfare_at(params: MarketParams, point: EquilibriumPoint) -> float:
    """User welfare at an equilibrium point."""
    return user_welfare(params, point.M, point.gamma, point.c, point.t, point.p)


def _check_m(M: int) -> None:
    if not (isinstance(M, int) and M >= 1):
        raise ParameterError(f"M must be an integer >= 1, got {M!r}")

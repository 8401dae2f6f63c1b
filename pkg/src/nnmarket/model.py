"""Market primitives: parameters, strategy profiles, demand, profits, welfare.

The market has N access providers (ISPs), each a monopolist over its own user
population, and M content providers (CPs).  A click by an ISP-n user on CP-m
content generates demand

    B_nm = gamma * c_m^v * t_n^w * exp(-p_n(m) / theta),

where gamma is a content-diversity weight increasing and saturating in M.
Every function here evaluates at an arbitrary (possibly asymmetric) strategy
profile; the closed-form equilibria live in :mod:`nnmarket.equilibria`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class ParameterError(ValueError):
    """A market parameter violates one of the model's standing assumptions."""


class Regime(Enum):
    """Regulatory regime: side payments forbidden (neutral) or CP-chosen."""

    NEUTRAL = "neutral"
    NONNEUTRAL = "nonneutral"


@dataclass(frozen=True)
class MarketParams:
    """Exogenous model parameters.

    Attributes:
        a: advertising revenue per click earned by a CP.
        theta: user price insensitivity (mean willingness-to-pay per click).
        v: demand sensitivity to CP investment, 0 < v < 1.
        w: demand sensitivity to ISP investment, 0 < w < 1, with v + w < 1
           (decreasing returns to scale).
        k: user preference for content variety.
        alpha: outside option for ISPs (> 1).
        beta: outside option for CPs (> 1).
        c_e: CP entry cost.
        N: number of ISPs.
    """

    a: float = 15.0
    theta: float = 10.0
    w: float = 0.3
    v: float = 0.3
    N: int = 2
    alpha: float = 1.2
    beta: float = 1.2
    c_e: float = 0.15
    k: float = 0.1


#: Axis names accepted by sweeps and the CLI, in canonical order.
PARAM_NAMES = ("a", "theta", "w", "v", "N", "alpha", "beta", "c_e", "k")


def validate_params(params: MarketParams) -> MarketParams:
    """Check all standing assumptions, returning ``params`` unchanged.

    Raises:
        ParameterError: naming the violated constraint.
    """
    p = params
    if not (0.0 < p.v < 1.0):
        raise ParameterError(f"v must lie in (0, 1), got v={p.v}")
    if not (0.0 < p.w < 1.0):
        raise ParameterError(f"w must lie in (0, 1), got w={p.w}")
    if not (p.v + p.w < 1.0):
        raise ParameterError(
            f"decreasing returns to scale require v + w < 1, got v+w={p.v + p.w}"
        )
    if not (p.theta > 0.0):
        raise ParameterError(f"theta must be positive, got theta={p.theta}")
    if not (p.k > 0.0):
        raise ParameterError(f"k must be positive, got k={p.k}")
    if p.a < 0.0:
        raise ParameterError(f"a must be non-negative, got a={p.a}")
    if p.c_e < 0.0:
        raise ParameterError(f"c_e must be non-negative, got c_e={p.c_e}")
    if not (p.alpha > 1.0):
        raise ParameterError(f"alpha must exceed 1, got alpha={p.alpha}")
    if not (p.beta > 1.0):
        raise ParameterError(f"beta must exceed 1, got beta={p.beta}")
    if not (isinstance(p.N, int) and p.N >= 1):
        raise ParameterError(f"N must be an integer >= 1, got N={p.N!r}")
    return params


def gamma(params: MarketParams, M: float) -> float:
    """Content-diversity demand weight.

        gamma = (1 - exp(-k*M)) / (M^(1-v) * N^(1-w))

    Increasing and saturating in the CP count M; the denominator normalizes
    by market size.  This is the unique normalization under which the
    closed-form symmetric CP investment coincides with the CP first-order
    condition for every (v, w, N); see docs/derivations.md.

    ``M`` may be a positive real (used when plotting the diversity curve);
    market computations always pass an integer.
    """
    if M <= 0:
        raise ParameterError(f"M must be positive, got M={M}")
    return -math.expm1(-params.k * M) / (
        M ** (1.0 - params.v) * params.N ** (1.0 - params.w)
    )


def demand_per_pair(
    params: MarketParams, gamma: float, c_m: float, t_n: float, p: float
) -> float:
    """Clicks B_nm from ISP-n users on CP-m content at price ``p``.

    Zero investment on either side yields zero demand (0^v is extended
    continuously to 0).  Negative prices are legal and simply scale demand up.
    """
    if c_m < 0.0 or t_n < 0.0:
        raise ParameterError("investments must be non-negative")
    if c_m == 0.0 or t_n == 0.0:
        return 0.0
    return gamma * c_m**params.v * t_n**params.w * math.exp(-p / params.theta)


@dataclass
class StageProfile:
    """An arbitrary strategy profile for a market with N ISPs and M CPs.

    Attributes:
        t: ISP investments, shape (N,), non-negative.
        q: side payments q_m(n), shape (M, N); may be negative.
        p: user prices p_n(m), shape (N, M); may be negative.
        c: CP investments, shape (M,), non-negative.
    """

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        N, M = self.t.shape[0], self.c.shape[0]
        if self.q.shape != (M, N):
            raise ParameterError(f"q must have shape (M, N)=({M}, {N}), got {self.q.shape}")
        if self.p.shape != (N, M):
            raise ParameterError(f"p must have shape (N, M)=({N}, {M}), got {self.p.shape}")
        if np.any(self.t < 0.0) or np.any(self.c < 0.0):
            raise ParameterError("investments must be non-negative")
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise ParameterError("prices must be finite")

    @property
    def n_isps(self) -> int:
        return self.t.shape[0]

    @property
    def n_cps(self) -> int:
        return self.c.shape[0]

    @classmethod
    def symmetric(
        cls, N: int, M: int, t: float, c: float, p: float, q: float = 0.0
    ) -> "StageProfile":
        """Profile with every ISP at (t, p) and every CP at (c, q)."""
        return cls(
            t=np.full(N, float(t)),
            q=np.full((M, N), float(q)),
            p=np.full((N, M), float(p)),
            c=np.full(M, float(c)),
        )


def demand_matrix(params: MarketParams, M: int, profile: StageProfile) -> np.ndarray:
    """B_nm for every (n, m) pair, shape (N, M)."""
    g = gamma(params, M)
    cv = np.where(profile.c > 0.0, profile.c, 1.0) ** params.v
    cv = np.where(profile.c > 0.0, cv, 0.0)
    tw = np.where(profile.t > 0.0, profile.t, 1.0) ** params.w
    tw = np.where(profile.t > 0.0, tw, 0.0)
    return g * cv[None, :] * tw[:, None] * np.exp(-profile.p / params.theta)


def isp_profit(params: MarketParams, M: int, profile: StageProfile, n: int) -> float:
    """Profit of ISP n: sum_m (p_n(m) + q_m(n)) B_nm - alpha * t_n."""
    if not 0 <= n < profile.n_isps:
        raise IndexError(f"ISP index {n} out of range for N={profile.n_isps}")
    B = demand_matrix(params, M, profile)
    margins = profile.p[n, :] + profile.q[:, n]
    return float(np.dot(margins, B[n, :]) - params.alpha * profile.t[n])


def cp_profit(params: MarketParams, M: int, profile: StageProfile, m: int) -> float:
    """Profit of CP m: sum_n (a - q_m(n)) B_nm - beta * (c_m + c_e)."""
    if not 0 <= m < profile.n_cps:
        raise IndexError(f"CP index {m} out of range for M={profile.n_cps}")
    B = demand_matrix(params, M, profile)
    revenue = float(np.dot(params.a - profile.q[m, :], B[:, m]))
    return revenue - params.beta * (profile.c[m] + params.c_e)


def user_welfare(
    params: MarketParams, M: int, gamma: float, c: float, t: float, p: float
) -> float:
    """Aggregate user surplus at a symmetric point.

    The integral of the exponential demand above the click price p equals
    theta times total clicks:

        UW = N * M * gamma * theta * c^v * t^w * exp(-p / theta)
    """
    if M == 0:
        return 0.0
    return params.N * M * params.theta * demand_per_pair(params, gamma, c, t, p)

"""Two-sided ISP/CP market: closed-form equilibria, entry game, verification.

The package solves a market where N monopolist access providers (ISPs) and M
content providers (CPs) interact through user demand that is sensitive to
prices and to both sides' investments.  Two regulatory regimes are covered:
neutral (side payments between CPs and ISPs forbidden) and non-neutral
(side payments chosen by the CPs, possibly negative).

Layout:
    model       parameters and primitive demand/profit/welfare functions
    equilibria  closed-form symmetric equilibria and profit summaries
    entry       the CP entry game and full market outcomes
    oracle      independent numerical best-response verification
    harness     parameter sweeps, figure datasets, regime comparison
    cli         command-line interface (``nnmarket ...``)
"""

from .entry import EntryResult, entry_count, m_star, market_outcome
from .equilibria import (
    EquilibriumPoint,
    MarketOutcome,
    cp_profit_at_equilibrium,
    equilibrium,
    isp_profit_at_equilibrium,
    neutral_equilibrium,
    nonneutral_equilibrium,
    pi_markup,
)
from .harness import SweepRow, SweepSpec, compare_regimes, reproduce_figures, sweep
from .model import (
    MarketParams,
    ParameterError,
    Regime,
    StageProfile,
    cp_profit,
    demand_per_pair,
    gamma,
    isp_profit,
    user_welfare,
    validate_params,
)
from .oracle import VerificationReport, VerifyTolerances, verify_equilibrium
from .solvers import SolverError

__version__ = "0.1.0"

__all__ = [
    "EntryResult",
    "EquilibriumPoint",
    "MarketOutcome",
    "MarketParams",
    "ParameterError",
    "Regime",
    "SolverError",
    "StageProfile",
    "SweepRow",
    "SweepSpec",
    "VerificationReport",
    "VerifyTolerances",
    "compare_regimes",
    "cp_profit",
    "cp_profit_at_equilibrium",
    "demand_per_pair",
    "entry_count",
    "equilibrium",
    "gamma",
    "isp_profit",
    "isp_profit_at_equilibrium",
    "m_star",
    "market_outcome",
    "neutral_equilibrium",
    "nonneutral_equilibrium",
    "pi_markup",
    "reproduce_figures",
    "sweep",
    "user_welfare",
    "validate_params",
    "verify_equilibrium",
]

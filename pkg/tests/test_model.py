"""Primitive demand, profit, and welfare functions."""

import math
import random
from dataclasses import replace

import numpy as np
import pytest

import nnmarket as nm
from nnmarket import MarketParams, ParameterError, Regime, StageProfile
from nnmarket.entry import m_star


def rel(a, b):
    return abs(a - b) / abs(b)


class TestValidateParams:
    def test_defaults_accepted(self, defaults):
        assert nm.validate_params(defaults) is defaults

    def test_decreasing_returns_boundary_rejected(self, defaults):
        with pytest.raises(ParameterError, match="v \\+ w < 1"):
            nm.validate_params(replace(defaults, v=0.5, w=0.5))

    def test_alpha_at_one_rejected(self, defaults):
        with pytest.raises(ParameterError, match="alpha"):
            nm.validate_params(replace(defaults, alpha=1.0))

    @pytest.mark.parametrize(
        "field,value",
        [
            ("v", 0.0),
            ("v", 1.0),
            ("w", -0.1),
            ("theta", 0.0),
            ("k", 0.0),
            ("a", -1.0),
            ("c_e", -0.01),
            ("beta", 0.99),
            ("N", 0),
        ],
    )
    def test_each_bound_enforced(self, defaults, field, value):
        with pytest.raises(ParameterError):
            nm.validate_params(replace(defaults, **{field: value}))

    def test_non_integer_n_rejected(self, defaults):
        with pytest.raises(ParameterError):
            nm.validate_params(replace(defaults, N=2.5))


class TestGamma:
    def test_fig3_markers_to_four_significant_figures(self, defaults):
        # Diversity-curve annotations at the two entry counts.
        assert rel(67 * nm.gamma(defaults, 67), 2.1705) < 5e-5
        assert rel(37 * nm.gamma(defaults, 37), 1.7736) < 5e-5

    def test_real_valued_m_for_curve_plotting(self, defaults):
        assert rel(34.359 * nm.gamma(defaults, 34.359), 1.7214) < 5e-3

    def test_nonpositive_m_rejected(self, defaults):
        with pytest.raises(ParameterError):
            nm.gamma(defaults, 0)

    def test_decreasing_in_n(self, defaults):
        vals = [nm.gamma(replace(defaults, N=n), 40) for n in (1, 2, 3, 5, 8)]
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_diversity_value_decreasing_beyond_peak(self, defaults):
        # M^w * gamma falls strictly once M passes the profit peak.
        peak = m_star(defaults.v, defaults.w, defaults.k)
        grid = np.linspace(peak + 0.5, peak + 200.0, 80)
        g = [m**defaults.w * nm.gamma(defaults, m) for m in grid]
        assert all(x > y for x, y in zip(g, g[1:]))


class TestDemand:
    def test_zero_investment_gives_zero_demand(self, defaults):
        assert nm.demand_per_pair(defaults, 0.5, 0.0, 3.0, 1.0) == 0.0
        assert nm.demand_per_pair(defaults, 0.5, 3.0, 0.0, 1.0) == 0.0

    def test_identity_case(self, defaults):
        assert nm.demand_per_pair(defaults, 1.0, 1.0, 1.0, 0.0) == pytest.approx(1.0)

    def test_negative_investment_rejected(self, defaults):
        with pytest.raises(ParameterError):
            nm.demand_per_pair(defaults, 1.0, -0.1, 1.0, 0.0)

    def test_equilibrium_demand_matches_welfare_identity(self, defaults):
        # N*M*theta*B equals user welfare exactly at the symmetric point.
        pt = nm.nonneutral_equilibrium(defaults, 67)
        B = nm.demand_per_pair(defaults, pt.gamma, pt.c, pt.t, pt.p)
        assert B == pytest.approx(0.0129501960084198, rel=1e-12)
        uw = nm.user_welfare(defaults, 67, pt.gamma, pt.c, pt.t, pt.p)
        assert 2 * 67 * 10 * B == pytest.approx(uw, rel=1e-12)
        assert rel(uw, 17.35) < 0.01

    def test_monotonicity_in_inputs(self, defaults):
        rng = random.Random(7)
        for _ in range(50):
            g = rng.uniform(0.01, 1.0)
            c, t, p = rng.uniform(0.01, 5), rng.uniform(0.01, 5), rng.uniform(-5, 20)
            b = nm.demand_per_pair(defaults, g, c, t, p)
            assert nm.demand_per_pair(defaults, g, c * 1.1, t, p) > b
            assert nm.demand_per_pair(defaults, g, c, t * 1.1, p) > b
            assert nm.demand_per_pair(defaults, g, c, t, p + 0.5) < b


class TestProfiles:
    def test_shape_validation(self):
        with pytest.raises(ParameterError):
            StageProfile(
                t=np.ones(2), q=np.zeros((3, 3)), p=np.zeros((2, 3)), c=np.ones(3)
            )

    def test_negative_investment_rejected(self):
        with pytest.raises(ParameterError):
            StageProfile.symmetric(2, 3, t=-1.0, c=0.1, p=1.0)

    def test_nonfinite_price_rejected(self):
        prof = dict(t=np.ones(2), q=np.zeros((3, 2)), c=np.ones(3))
        with pytest.raises(ParameterError):
            StageProfile(p=np.full((2, 3), np.inf), **prof)


class TestProfits:
    def test_no_demand_no_investment_is_zero(self, defaults):
        prof = StageProfile.symmetric(2, 4, t=0.0, c=0.0, p=1.0)
        assert nm.isp_profit(defaults, 4, prof, 0) == 0.0

    def test_zero_prices_pure_cost(self, defaults):
        prof = StageProfile.symmetric(2, 4, t=1.7, c=0.3, p=0.0, q=0.0)
        assert nm.isp_profit(defaults, 4, prof, 1) == pytest.approx(
            -defaults.alpha * 1.7
        )

    def test_cp_with_no_content_pays_entry_cost(self, defaults):
        prof = StageProfile.symmetric(2, 4, t=1.0, c=0.0, p=1.0)
        assert nm.cp_profit(defaults, 4, prof, 2) == pytest.approx(
            -defaults.beta * defaults.c_e
        )

    def test_index_out_of_range(self, defaults):
        prof = StageProfile.symmetric(2, 4, t=1.0, c=0.1, p=1.0)
        with pytest.raises(IndexError):
            nm.isp_profit(defaults, 4, prof, 2)
        with pytest.raises(IndexError):
            nm.cp_profit(defaults, 4, prof, 4)

    def test_equilibrium_profile_isp_profit(self, defaults):
        # Direct evaluation at the symmetric non-neutral equilibrium profile.
        pt = nm.nonneutral_equilibrium(defaults, 67)
        prof = StageProfile.symmetric(2, 67, t=pt.t, c=pt.c, p=pt.p, q=pt.q)
        value = nm.isp_profit(defaults, 67, prof, 0)
        assert rel(value, 4.58) < 2e-3
        closed = nm.isp_profit_at_equilibrium(defaults, 67, Regime.NONNEUTRAL)
        assert rel(value, closed) < 1e-9

    def test_equilibrium_profile_cp_profit_drives_entry(self, defaults):
        # Barely profitable at the entry count, loss-making one past it.
        for M, sign in ((67, 1.0), (68, -1.0)):
            pt = nm.nonneutral_equilibrium(defaults, M)
            prof = StageProfile.symmetric(2, M, t=pt.t, c=pt.c, p=pt.p, q=pt.q)
            value = nm.cp_profit(defaults, M, prof, 0)
            assert sign * value > 0.0
            closed = nm.cp_profit_at_equilibrium(defaults, M, Regime.NONNEUTRAL)
            assert rel(value, closed) < 1e-9


class TestUserWelfare:
    def test_empty_market(self, defaults):
        assert nm.user_welfare(defaults, 0, 0.1, 1.0, 1.0, 1.0) == 0.0

    def test_figure_anchors(self, defaults):
        nn = nm.nonneutral_equilibrium(defaults, 67)
        ne = nm.neutral_equilibrium(defaults, 37)
        assert rel(nm.user_welfare(defaults, 67, nn.gamma, nn.c, nn.t, nn.p), 17.353) < 0.01
        assert rel(nm.user_welfare(defaults, 37, ne.gamma, ne.c, ne.t, ne.p), 6.4219) < 0.01

    def test_welfare_is_theta_times_total_clicks(self, defaults):
        rng = random.Random(3)
        for _ in range(20):
            M = rng.randint(1, 50)
            c, t, p = rng.uniform(0.01, 2), rng.uniform(0.01, 5), rng.uniform(-3, 15)
            g = nm.gamma(defaults, M)
            prof = StageProfile.symmetric(defaults.N, M, t=t, c=c, p=p)
            total = sum(
                nm.demand_per_pair(defaults, g, c, t, p)
                for _ in range(defaults.N)
                for _ in range(M)
            )
            uw = nm.user_welfare(defaults, M, g, c, t, p)
            assert uw == pytest.approx(defaults.theta * total, rel=1e-12)

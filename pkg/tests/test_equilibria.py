"""Closed-form equilibria against figure anchors and internal identities."""

import math
import random
from dataclasses import replace

import pytest

import nnmarket as nm
from nnmarket import Regime, StageProfile
from nnmarket.equilibria import _r_share

from conftest import random_params


def rel(a, b):
    return abs(a - b) / abs(b)


class TestPiMarkup:
    def test_reference_value_is_exact_fraction(self):
        assert nm.pi_markup(2, 0.3) == pytest.approx(14.0 / 17.0, rel=1e-15)
        assert 10.0 * nm.pi_markup(2, 0.3) == pytest.approx(8.235294117647, rel=1e-12)

    def test_vanishing_content_sensitivity_gives_full_markup(self):
        assert nm.pi_markup(2, 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_single_isp(self):
        assert nm.pi_markup(1, 0.3) == pytest.approx(0.7, rel=1e-15)

    def test_always_in_unit_interval(self):
        for N in (1, 2, 5, 50):
            for v in (0.05, 0.3, 0.6, 0.95):
                assert 0.0 < nm.pi_markup(N, v) < 1.0


class TestNeutralEquilibrium:
    def test_theta14_anchor(self, defaults):
        # Entry count is 50 at theta = 14; anchors from the reference sweep.
        pt = nm.neutral_equilibrium(replace(defaults, theta=14.0), 50)
        assert rel(pt.t, 1.514) < 0.01
        assert rel(pt.c, 0.064887) < 0.01
        assert pt.p == pytest.approx(14.0 * 14.0 / 17.0, rel=1e-12)
        assert pt.t == pytest.approx(1.5140368455201585, rel=1e-12)

    def test_theta30_anchor(self, defaults):
        pt = nm.neutral_equilibrium(replace(defaults, theta=30.0), 90)
        assert rel(pt.t, 5.8423) < 0.01

    def test_defaults_m37(self, defaults):
        pt = nm.neutral_equilibrium(defaults, 37)
        assert pt.p == pytest.approx(8.235294117647, rel=1e-12)
        assert pt.q == 0.0
        assert rel(pt.t, 0.803) < 1e-3
        assert pt.x == pytest.approx(1.6232711854461674, rel=1e-12)

    def test_price_is_theta_pi_exactly(self, defaults):
        rng = random.Random(11)
        for _ in range(10):
            p_ = random_params(rng)
            pt = nm.neutral_equilibrium(p_, rng.randint(1, 80))
            assert pt.p == pytest.approx(p_.theta * pt.pi, rel=1e-14)

    def test_zero_ad_revenue_gives_zero_content(self, defaults):
        pt = nm.neutral_equilibrium(replace(defaults, a=0.0), 10)
        assert pt.c == 0.0

    def test_invalid_m_rejected(self, defaults):
        with pytest.raises(nm.ParameterError):
            nm.neutral_equilibrium(defaults, 0)


class TestNonneutralEquilibrium:
    def test_price_formulas_at_defaults(self, defaults):
        pt = nm.nonneutral_equilibrium(defaults, 67)
        assert pt.q == pytest.approx(5.0, abs=1e-12)
        assert pt.p == pytest.approx(10.0 * 31.0 / 17.0 - 15.0, rel=1e-12)
        assert rel(pt.t, 2.1366127151019483) < 1e-12
        assert rel(pt.c, 0.06475098004209898) < 1e-12

    def test_theta14_anchor(self, defaults):
        pt = nm.nonneutral_equilibrium(replace(defaults, theta=14.0), 53)
        assert rel(pt.t, 1.6813) < 0.01
        assert rel(pt.c, 0.06441) < 0.01

    def test_margin_identity(self, defaults):
        rng = random.Random(5)
        for _ in range(10):
            p_ = random_params(rng)
            pt = nm.nonneutral_equilibrium(p_, rng.randint(1, 80))
            assert pt.p + pt.q == pytest.approx(p_.theta * pt.pi, rel=1e-12)

    def test_side_payment_depends_only_on_a_and_theta(self, defaults):
        rng = random.Random(23)
        for _ in range(10):
            p_ = random_params(rng)
            pt = nm.nonneutral_equilibrium(p_, rng.randint(1, 60))
            assert pt.q == pytest.approx(p_.a - p_.theta, abs=1e-12)

    def test_r_share_in_unit_interval_and_zero_for_monopoly(self):
        assert _r_share(1, 0.3) == 0.0
        for N in (2, 3, 4, 8):
            for v in (0.1, 0.3, 0.45):
                assert 0.0 < _r_share(N, v) < 1.0

    def test_scale_constant_theta_placement_equivalent(self, defaults):
        # The investment can be computed with the scale constant carrying
        # theta inside the exponentiated bracket or outside; both must agree.
        rng = random.Random(40)
        for _ in range(8):
            p_ = random_params(rng)
            M = rng.randint(2, 60)
            pt = nm.nonneutral_equilibrium(p_, M)
            v, w = p_.v, p_.w
            g, pi, R = pt.gamma, pt.pi, pt.r_share
            K_inner = (p_.alpha / g) * (
                p_.theta * (v / (1 - v)) * (v * g / p_.beta)
            ) ** (-v / (1 - v))
            t_alt = (
                ((1 - R) * M * w / ((1 - v) * K_inner)) ** (1 - v)
                * p_.theta ** (1 - v)
                * math.exp(pt.q / p_.theta - pi)
                * pi
                * (1 - pi) ** (-v)
            ) ** (1.0 / (1 - v - w))
            assert t_alt == pytest.approx(pt.t, rel=1e-12)


class TestEquilibriumProfits:
    @pytest.mark.parametrize("regime", [Regime.NEUTRAL, Regime.NONNEUTRAL])
    def test_closed_form_matches_direct_profile_evaluation(self, defaults, regime):
        rng = random.Random(17)
        cases = [(defaults, 67 if regime is Regime.NONNEUTRAL else 37)]
        for _ in range(6):
            cases.append((random_params(rng), rng.randint(1, 60)))
        for p_, M in cases:
            pt = nm.equilibrium(p_, M, regime)
            prof = StageProfile.symmetric(p_.N, M, t=pt.t, c=pt.c, p=pt.p, q=pt.q)
            isp_direct = nm.isp_profit(p_, M, prof, 0)
            cp_direct = nm.cp_profit(p_, M, prof, 0)
            isp_closed = nm.isp_profit_at_equilibrium(p_, M, regime)
            cp_closed = nm.cp_profit_at_equilibrium(p_, M, regime)
            scale = max(abs(isp_direct), 1e-6)
            assert abs(isp_closed - isp_direct) / scale < 1e-9
            scale = max(abs(cp_direct), 1e-6)
            assert abs(cp_closed - cp_direct) / scale < 1e-9

    def test_cp_profit_entry_thresholds(self, defaults):
        assert nm.cp_profit_at_equilibrium(defaults, 67, Regime.NONNEUTRAL) >= 0.0
        assert nm.cp_profit_at_equilibrium(defaults, 68, Regime.NONNEUTRAL) < 0.0
        assert nm.cp_profit_at_equilibrium(defaults, 37, Regime.NEUTRAL) >= 0.0
        assert nm.cp_profit_at_equilibrium(defaults, 38, Regime.NEUTRAL) < 0.0

    def test_no_entry_cost_means_always_profitable(self, defaults):
        free_entry = replace(defaults, c_e=0.0)
        for M in (1, 5, 50, 500, 5000):
            for regime in Regime:
                assert nm.cp_profit_at_equilibrium(free_entry, M, regime) > 0.0

    def test_isp_profit_anchor(self, defaults):
        assert rel(nm.isp_profit_at_equilibrium(defaults, 67, Regime.NONNEUTRAL), 4.58) < 2e-3

    def test_isp_profit_vanishes_with_tiny_market(self, defaults):
        # Just above the entry threshold investments collapse and profit
        # approaches zero from the revenue side.
        p_ = replace(defaults, a=11.8)
        profit = nm.isp_profit_at_equilibrium(p_, 1, Regime.NONNEUTRAL)
        pt = nm.nonneutral_equilibrium(p_, 1)
        assert 0.0 < profit < 1.0
        assert pt.t < 0.2

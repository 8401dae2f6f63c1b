"""Entry game: the profit peak, the entry count, and market outcomes."""

import math
import random
from dataclasses import replace

import pytest

import nnmarket as nm
from nnmarket import Regime, SolverError
from nnmarket import entry as entry_mod

from conftest import random_params


class TestMStar:
    def test_reference_peak(self):
        ms = nm.m_star(0.3, 0.3, 0.1)
        assert ms == pytest.approx(16.18788125264158, abs=1e-8)
        # Fixed-point residual at the bisection tolerance.
        assert abs(ms - 4.0 * math.expm1(0.1 * ms)) < 1e-9

    def test_doubled_variety_preference(self):
        assert nm.m_star(0.3, 0.3, 0.2) == pytest.approx(8.093940626, abs=1e-8)

    def test_bracket_signs(self):
        # The defining function is positive just above zero and negative for
        # large arguments, so the bisection bracket is always valid.
        for v, w, k in [(0.3, 0.3, 0.1), (0.12, 0.42, 0.05), (0.42, 0.3, 0.25)]:
            coef = (1.0 - v - w) / k
            f = lambda x: x - coef * math.expm1(k * x)
            assert f(1e-6) > 0.0
            ms = nm.m_star(v, w, k)
            assert f(2.0 * ms + 10.0) < 0.0

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            nm.m_star(0.5, 0.5, 0.1)
        with pytest.raises(ValueError):
            nm.m_star(0.3, 0.3, 0.0)


class TestEntryCount:
    def test_defaults_nonneutral(self, defaults):
        res = nm.entry_count(defaults, Regime.NONNEUTRAL)
        assert res.entered == 67
        assert res.profitable
        assert res.cp_profit_at_M >= 0.0 > res.cp_profit_at_M_plus_1

    def test_defaults_neutral(self, defaults):
        res = nm.entry_count(defaults, Regime.NEUTRAL)
        assert res.entered == 37
        assert res.cp_profit_at_M >= 0.0 > res.cp_profit_at_M_plus_1

    def test_low_ad_revenue_excludes_everyone(self, defaults):
        stingy = replace(defaults, a=10.889)
        for regime in Regime:
            res = nm.entry_count(stingy, regime)
            assert res.entered == 0
            assert not res.profitable

    def test_entered_at_least_profit_peak_floor(self, defaults):
        rng = random.Random(29)
        for _ in range(12):
            p_ = random_params(rng)
            for regime in Regime:
                res = nm.entry_count(p_, regime)
                if res.entered > 0:
                    assert res.entered >= math.floor(res.m_star)
                    assert res.cp_profit_at_M >= 0.0 > res.cp_profit_at_M_plus_1

    def test_profit_unimodal_and_peak_matches_diversity_value(self, defaults):
        # Per-CP profit in M rises and falls exactly like M^w * gamma.
        rng = random.Random(41)
        for p_ in [defaults] + [random_params(rng) for _ in range(3)]:
            for regime in Regime:
                grid = range(1, 120)
                profit = [nm.cp_profit_at_equilibrium(p_, M, regime) for M in grid]
                gval = [M**p_.w * nm.gamma(p_, M) for M in grid]
                p_rise = [b > a for a, b in zip(profit, profit[1:])]
                g_rise = [b > a for a, b in zip(gval, gval[1:])]
                assert p_rise == g_rise
                peaks = [i for i in range(1, len(p_rise)) if p_rise[i - 1] and not p_rise[i]]
                assert len(peaks) == 1

    def test_entry_weakly_increasing_in_ad_revenue(self, defaults):
        grid = [10 + i * 8 / 9 for i in range(10)]
        for regime in Regime:
            counts = [
                nm.entry_count(replace(defaults, a=a), regime).entered for a in grid
            ]
            assert all(x <= y for x, y in zip(counts, counts[1:]))

    def test_unbounded_market_hits_scan_cap(self, defaults, monkeypatch):
        # With no entry cost profit stays positive for every M, so the scan
        # must refuse rather than loop forever.
        monkeypatch.setattr(entry_mod, "MAX_ENTRY_SCAN", 5000)
        with pytest.raises(SolverError, match="entry scan"):
            nm.entry_count(replace(defaults, c_e=0.0), Regime.NONNEUTRAL)


class TestMarketOutcome:
    def test_defaults_nonneutral(self, defaults):
        out = nm.market_outcome(defaults, Regime.NONNEUTRAL)
        assert out.M == 67
        assert abs(out.uw - 17.353) / 17.353 < 0.01
        assert out.point is not None
        assert out.point.q == pytest.approx(5.0)

    def test_no_entry_zeroes_everything(self, defaults):
        out = nm.market_outcome(replace(defaults, theta=6.0), Regime.NEUTRAL)
        assert out.M == 0
        assert out.uw == 0.0
        assert out.point is None
        assert out.isp_profit_each == 0.0
        assert out.cp_profit_each == 0.0

    def test_high_entry_cost_kills_nonneutral_market(self, defaults):
        out = nm.market_outcome(replace(defaults, c_e=0.41333), Regime.NONNEUTRAL)
        assert out.M == 0
        assert out.uw == 0.0

    def test_outcome_consistent_with_entry_result(self, defaults):
        res = nm.entry_count(defaults, Regime.NEUTRAL)
        out = nm.market_outcome(defaults, Regime.NEUTRAL)
        assert out.M == res.entered
        assert out.cp_profit_each == pytest.approx(res.cp_profit_at_M, rel=1e-12)

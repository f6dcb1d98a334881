import math

import numpy as np
import pytest

from tmpa.metrics import (
    ETA_MAX,
    PL5_AT_ZERO,
    design_delta,
    efficiencies,
    harmonic_power_sum,
    pl5,
    sweep,
)


def sinc(x):
    return math.sin(x) / x if x else 1.0


def brute_power_sum(d, q_max=2_000_000):
    """Direct summation plus an integral estimate of the remaining 1/q^2 tail."""
    q = np.arange(1, q_max + 1, 2, dtype=float)
    q = q[q % 3 != 0]
    x = 2 * np.pi * q * d
    terms = np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1, x)) ** 2 / q**2
    total = float(np.sum(terms))
    if d == 0:
        # Upsilon has density 1/3: sum_{q>Q} 1/q^2 ~ 1/(3Q)
        total += 1.0 / (3.0 * q_max)
    return total


class TestPl5:
    def test_ideal(self):
        assert pl5(0.0) == pytest.approx(-13.979, abs=1e-3)
        assert pl5(0.0) == PL5_AT_ZERO

    def test_design_points(self):
        assert pl5(0.047) == pytest.approx(-17.3, abs=0.05)
        assert pl5(0.047) <= -17.0
        assert pl5(0.08) == pytest.approx(-26.2, abs=0.05)

    def test_formula(self):
        d = 0.033
        assert pl5(d) == pytest.approx(20 * math.log10(abs(sinc(10 * math.pi * d) / (5 * sinc(2 * math.pi * d)))))

    def test_full_suppression_sentinel(self):
        assert pl5(0.1) == float("-inf")

    @pytest.mark.parametrize("d", [-0.01, 0.11])
    def test_domain(self, d):
        with pytest.raises(ValueError):
            pl5(d)

    def test_strictly_decreasing(self):
        grid = np.arange(0, 0.1, 1e-3)
        values = np.array([pl5(d) for d in grid])
        assert np.all(np.diff(values) < 0)


class TestPowerSum:
    def test_zero_is_exact(self):
        s = harmonic_power_sum(0.0)
        assert s.value == pytest.approx(np.pi**2 / 9, rel=1e-15)
        assert s.value == pytest.approx(1.0966227, abs=1e-7)
        assert s.value == pytest.approx(brute_power_sum(0.0), abs=1e-9)
        assert s.tail_bound == 0.0

    @pytest.mark.parametrize("d", [0.001, 0.02, 0.047, 0.08, 0.1, 0.2])
    def test_matches_brute_force(self, d):
        s = harmonic_power_sum(d)
        assert s.value == pytest.approx(brute_power_sum(d), rel=1e-9)

    def test_value_at_008(self):
        s = harmonic_power_sum(0.08)
        assert s.value == pytest.approx(0.921163, abs=1e-6)
        # eta_s(0.08) / eta_s(0) - 1 = -16.0 %
        assert ETA_MAX * s.value / (8 / 9) - 1 == pytest.approx(-0.160, abs=1e-3)

    def test_bounded_by_ideal(self):
        s0 = harmonic_power_sum(0.0).value
        for d in np.linspace(1e-3, 0.1, 50):
            assert harmonic_power_sum(d).value <= s0

    @pytest.mark.parametrize("d", [0.005, 0.03, 0.08])
    @pytest.mark.parametrize("q", [11, 101, 1001])
    def test_tail_bound_sound(self, d, q):
        a = harmonic_power_sum(d, q_max=q)
        b = harmonic_power_sum(d, q_max=2 * q)
        assert 0 <= b.value - a.value <= a.tail_bound
        assert harmonic_power_sum(d).value - a.value <= a.tail_bound

    def test_tolerance_respected(self):
        s = harmonic_power_sum(0.03, rel_tol=1e-6)
        assert s.tail_bound < 1e-6 * s.value

    def test_unreachable_tolerance(self):
        with pytest.raises(ArithmeticError):
            harmonic_power_sum(1e-9, rel_tol=1e-12)

    @pytest.mark.parametrize("tol", [0.0, 1e-2])
    def test_bad_tolerance(self, tol):
        with pytest.raises(ValueError):
            harmonic_power_sum(0.02, rel_tol=tol)


class TestEfficiencies:
    def test_ideal(self):
        r = efficiencies(0.0)
        assert r.eta_tma == pytest.approx(9 / np.pi**2, rel=1e-14)
        assert r.eta_s == pytest.approx(8 / 9, rel=1e-14)
        assert r.eta == pytest.approx(8 / np.pi**2, rel=1e-14)
        assert (round(r.eta_tma, 2), round(r.eta_s, 2), round(r.eta, 2)) == (0.91, 0.89, 0.81)

    def test_relative_changes_at_008(self):
        rel = efficiencies(0.08).relative_to(efficiencies(0.0))
        assert rel["eta_tma"] == pytest.approx(0.0935, abs=5e-4)
        assert rel["eta_s"] == pytest.approx(-0.160, abs=5e-4)
        assert rel["eta"] == pytest.approx(-0.0814, abs=5e-4)

    def test_eta_gap_at_design_points(self):
        assert efficiencies(0.047).eta_below_max == pytest.approx(0.029, abs=5e-4)
        assert efficiencies(0.069).eta_below_max == pytest.approx(0.061, abs=5e-4)

    def test_powers(self):
        n = 16
        r = efficiencies(0.05, n_elements=n)
        assert r.p_r_st == pytest.approx(4 * np.pi * n)
        assert r.p_r_tm / r.p_r_st == pytest.approx(r.eta_s, rel=1e-12)
        assert r.p_u_tm / r.p_r_tm == pytest.approx(r.eta_tma, rel=1e-12)
        assert r.p_r_tm < r.p_r_st

    def test_product_identity(self):
        for d in np.linspace(0, 0.1, 1000):
            r = efficiencies(d)
            assert abs(r.eta_tma * r.eta_s - ETA_MAX * sinc(2 * np.pi * d) ** 2) < 1e-10
            assert r.eta <= ETA_MAX + 1e-15

    def test_opposite_slopes(self):
        grid = np.arange(0.001, 0.09, 0.001)
        tma = [efficiencies(d).eta_tma for d in grid]
        s = [efficiencies(d).eta_s for d in grid]
        assert np.all(np.diff(tma) >= 0)
        assert np.all(np.diff(s) <= 0)

    def test_directivity_attachment(self):
        r = efficiencies(0.0).with_directivity(11.64)
        assert r.directivity_dbi == 11.64
        assert r.to_dict()["directivity_dbi"] == 11.64


class TestDesign:
    def test_minus_22(self):
        r = design_delta(-22.0)
        assert r.delta_norm == pytest.approx(0.069, abs=1e-3)
        assert abs(r.pl5_db + 22.0) <= 0.01
        assert not r.already_met

    def test_minus_17_meets_target(self):
        r = design_delta(-17.0)
        assert abs(r.pl5_db + 17.0) <= 0.01
        # smallest rise time: just below it the target is missed
        assert pl5(r.delta_norm - 1e-6) > -17.0
        assert r.delta_norm == pytest.approx(0.045150, abs=1e-6)

    def test_boundary(self):
        r = design_delta(-13.979)
        assert r.delta_norm == 0.0 and r.already_met

    @pytest.mark.parametrize("target", [-60.0, -80.0, float("nan")])
    def test_out_of_range(self, target):
        with pytest.raises(ValueError):
            design_delta(target)

    @pytest.mark.parametrize("target", [-14.5, -20.0, -30.0, -45.0, -59.0])
    def test_accuracy(self, target):
        r = design_delta(target)
        assert abs(r.pl5_db - target) <= 0.01
        assert 0 < r.delta_norm < 0.1
        assert r.iterations <= 50


class TestSweep:
    def test_rows(self):
        s = sweep(0.0, 0.08, 0.01)
        assert len(s) == 9
        first = next(iter(s.rows()))
        ideal = efficiencies(0.0)
        assert first == (0.0, ideal.pl5_db, ideal.eta_tma, ideal.eta_s, ideal.eta)
        assert s.delta_norm[-1] == pytest.approx(0.08)

    def test_shape(self):
        s = sweep(0.0, 0.09, 1e-3)
        assert len(s) == 91
        assert np.all(np.diff(s.pl5_db) < 0)
        expected = ETA_MAX * np.array([sinc(2 * np.pi * d) ** 2 for d in s.delta_norm])
        assert np.allclose(s.eta, expected, rtol=0, atol=1e-14)

    @pytest.mark.parametrize("args", [(0.05, 0.02, 0.01), (0.0, 0.2, 0.01), (0.0, 0.05, 0.0)])
    def test_bad_ranges(self, args):
        with pytest.raises(ValueError):
            sweep(*args)

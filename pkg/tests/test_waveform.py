import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from tmpa.waveform import (
    PulseSpec,
    WaveformSamples,
    composite_antiderivative,
    eval_bipolar_pulse,
    eval_v,
    eval_w,
    fourier_coefficient_u,
    pulse_antiderivative,
    sample_waveform,
    unipolar_control,
)


def ideal_square(t):
    t = t % 1.0
    if t == 0.0 or t == 0.5:
        return 0.0
    return 1.0 if t < 0.5 else -1.0


def convolution_oracle(t, d):
    """Ideal square wave averaged over a window of width 2d centred on t."""
    if d == 0.0:
        return ideal_square(t)
    breaks = [x for x in np.arange(np.floor(t - d) - 1, np.ceil(t + d) + 1, 0.5) if t - d < x < t + d]
    val, _ = quad(ideal_square, t - d, t + d, points=breaks or None, epsabs=1e-13, epsrel=1e-13)
    return val / (2 * d)


def sine_coefficient_oracle(q, d):
    f = lambda t: convolution_oracle(t, d) * np.sin(2 * np.pi * q * t)
    pts = [p for p in (d, 0.5 - d) if 0 < p < 0.5]
    val, _ = quad(f, 0.0, 0.5, points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=400)
    return 4.0 * val


class TestPulseSpec:
    @pytest.mark.parametrize("bad", [-0.01, 0.25, 0.3, float("nan")])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            PulseSpec(bad)

    def test_composite_domain(self):
        assert PulseSpec(1 / 12).supports_composite
        assert not PulseSpec(0.09).supports_composite
        assert PulseSpec(0.1).period_norm == 1.0


class TestBipolarPulse:
    def test_plateau(self):
        assert eval_bipolar_pulse(PulseSpec(0.05), 0.25) == 1.0

    def test_transition_centre(self):
        assert eval_bipolar_pulse(PulseSpec(0.05), 0.0) == 0.0
        assert eval_bipolar_pulse(PulseSpec(0.0), 0.5) == 0.0

    def test_ramp_midpoint_matches_convolution(self):
        expected = convolution_oracle(0.025, 0.05)
        assert expected == pytest.approx(0.5, abs=1e-12)
        assert eval_bipolar_pulse(PulseSpec(0.05), 0.025) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("d", [0.0, 0.02, 0.05, 0.08, 0.2])
    def test_matches_convolution_everywhere(self, d):
        for t in np.linspace(-0.3, 1.3, 97):
            assert eval_bipolar_pulse(d, t) == pytest.approx(convolution_oracle(t, d), abs=1e-10)

    @given(k=st.integers(0, 2**20 - 1), d=st.sampled_from([0.0, 0.01, 0.05, 1 / 12, 0.2]))
    def test_odd_symmetry(self, k, d):
        t = k / 2**20
        assert eval_bipolar_pulse(d, t) == pytest.approx(-eval_bipolar_pulse(d, 1 - t), abs=1e-12)
        assert eval_bipolar_pulse(d, -t) == pytest.approx(-eval_bipolar_pulse(d, t), abs=1e-12)

    @given(t=st.floats(-5, 5), d=st.floats(0, 0.2499))
    def test_bounded(self, t, d):
        assert -1.0 <= eval_bipolar_pulse(d, t) <= 1.0

    def test_antiderivative_matches_quadrature(self):
        for d in (0.0, 0.03, 0.2):
            for t in (0.01, 0.13, 0.49, 0.5, 0.77, 1.3):
                expected, _ = quad(lambda s: eval_bipolar_pulse(d, s), 0, t, points=[d, 0.5 - d, 0.5 + d, 1 - d], limit=200)
                assert pulse_antiderivative(d, t) == pytest.approx(expected, abs=1e-10)


class TestFourierCoefficient:
    def test_even_harmonic_vanishes(self):
        assert fourier_coefficient_u(2, 0.08) == 0.0

    def test_ideal_fundamental(self):
        assert fourier_coefficient_u(1, 0.0) == pytest.approx(4 / np.pi, rel=1e-15)
        assert fourier_coefficient_u(1, 0.0) == pytest.approx(1.273240, abs=1e-6)

    def test_fifth_at_008_against_quadrature(self):
        oracle = sine_coefficient_oracle(5, 0.08)
        assert oracle == pytest.approx(0.059554, abs=2e-6)
        assert fourier_coefficient_u(5, 0.08) == pytest.approx(oracle, abs=1e-10)

    @pytest.mark.parametrize("d", [0.0, 0.02, 0.05, 0.08])
    def test_closed_form_matches_quadrature(self, d):
        for q in range(1, 32, 2):
            assert fourier_coefficient_u(q, d) == pytest.approx(sine_coefficient_oracle(q, d), abs=1e-8)

    @pytest.mark.parametrize("q", [0, -1, 1.5])
    def test_bad_order(self, q):
        with pytest.raises(ValueError):
            fourier_coefficient_u(q, 0.0)


class TestComposite:
    def test_zero_at_origin(self):
        assert eval_w(0.05, 0.0) == 0.0

    def test_quarter_period_value(self):
        # u(1/4) = 1 and the triple-rate pulse sits on its -1 plateau there
        oracle = convolution_oracle(0.25, 0.05) - convolution_oracle(0.75, 0.15) / 3
        assert oracle == pytest.approx(4 / 3, abs=1e-12)
        assert eval_w(0.05, 0.25) == pytest.approx(4 / 3, abs=1e-12)
        assert eval_v(0.05, 0.25) == -1.0

    def test_series_converges_on_plateaus(self):
        for t in (0.1, 0.25, 0.4, 0.6, 0.9):
            exact = eval_w(0.0, t)
            series = eval_w(0.0, t, q_max=10001, method="series")
            assert abs(series - exact) < 5e-3

    @pytest.mark.parametrize("d", [0.01, 0.05, 1 / 12])
    def test_series_converges_to_exact(self, d):
        t = np.linspace(0, 1, 257)
        errs = [np.max(np.abs(eval_w(d, t, q_max=q, method="series") - eval_w(d, t))) for q in (11, 101, 1001)]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3

    def test_exact_domain(self):
        with pytest.raises(ValueError):
            eval_w(0.09, 0.3)
        with pytest.raises(ValueError):
            eval_w(0.05, 0.3, method="series")
        assert np.isfinite(eval_w(0.09, 0.3, q_max=31, method="series"))

    @pytest.mark.parametrize("d", [0.02, 0.05, 1 / 12])
    def test_triple_harmonics_cancel(self, d):
        M = 4096
        c = sample_waveform(lambda t: eval_w(d, t), M).dft()
        ref = abs(c[1])
        for m in range(-100, 101):
            if m and (m % 2 == 0 or m % 3 == 0):
                assert abs(c[m % M]) < 1e-6 * ref, m

    def test_triple_harmonics_cancel_ideal_square(self):
        # jumps of the triple-rate pulse fall between samples unless 12 | M
        M = 8196
        c = sample_waveform(lambda t: eval_w(0.0, t), M).dft()
        for m in range(-101, 102):
            if m and (m % 2 == 0 or m % 3 == 0):
                assert abs(c[m % M]) < 1e-12

    def test_antiderivative_consistent(self):
        d = 0.04
        for a, b in [(0.0, 0.3), (0.2, 0.95), (-0.1, 0.15)]:
            expected, _ = quad(lambda s: eval_w(d, s), a, b, limit=400)
            got = composite_antiderivative(d, b) - composite_antiderivative(d, a)
            assert got == pytest.approx(expected, abs=1e-9)


class TestSampling:
    def test_zero_evaluator(self):
        s = sample_waveform(lambda t: np.zeros_like(t), 16)
        assert s.sample_count == 16
        assert np.all(s.values == 0)

    def test_ideal_square_samples(self):
        with pytest.raises(ValueError):
            sample_waveform(lambda t: eval_bipolar_pulse(0.0, t), 8)
        s = sample_waveform(lambda t: eval_bipolar_pulse(0.0, t), 16)
        expected = [0] + [1] * 7 + [0] + [-1] * 7
        assert s.values.tolist() == expected

    def test_dft_fundamental(self):
        s = sample_waveform(lambda t: eval_bipolar_pulse(0.05, t), 4096)
        c = s.dft()
        # sine coefficient U_1 appears as 2|c_1|
        assert 2 * abs(c[1]) == pytest.approx(fourier_coefficient_u(1, 0.05), abs=1e-5)

    def test_deterministic_and_immutable(self):
        a = sample_waveform(lambda t: eval_w(0.05, t), 64)
        b = sample_waveform(lambda t: eval_w(0.05, t), 64)
        assert np.array_equal(a.values, b.values)
        with pytest.raises(ValueError):
            a.values[0] = 1.0
        assert a.t_grid[1] == 1 / 64

    @pytest.mark.parametrize("m", [15, 17, 0])
    def test_bad_sizes(self, m):
        with pytest.raises(ValueError):
            WaveformSamples(np.zeros(m))


class TestUnipolar:
    def test_values(self):
        assert unipolar_control(0.0, 0.25) == 1.0
        assert unipolar_control(0.0, 0.75) == 0.0
        assert unipolar_control(0.05, 0.025) == pytest.approx(0.75)

    @given(t=st.floats(-3, 3), d=st.floats(0, 0.2499))
    def test_range(self, t, d):
        assert 0.0 <= unipolar_control(d, t) <= 1.0

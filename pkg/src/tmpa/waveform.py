"""
Periodic trapezoidal bipolar pulses and the composite modulating waveform.

All times are normalized to the modulation period T0, so one period is the
interval [0, 1). The basic pulse ``u(t)`` is the odd +/-1 square wave whose
transitions are linear ramps of duration ``2 * delta_norm`` centred on
t = 0 and t = 1/2. Equivalently it is the ideal square wave convolved with a
unit-area rectangle of width ``2 * delta_norm``, which gives the sine
coefficients

    U_q = 4 / (pi q) * sinc(2 pi q delta_norm),   q odd

with ``sinc(x) = sin(x) / x``.

The composite waveform ``w(t) = u(t) - v(t) / 3`` subtracts a copy of the
pulse running at three times the fundamental frequency, which cancels every
harmonic that is an odd multiple of 3.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "DELTA_MAX",
    "DELTA_MAX_COMPOSITE",
    "PulseSpec",
    "WaveformSamples",
    "sinc",
    "eval_bipolar_pulse",
    "pulse_antiderivative",
    "fourier_coefficient_u",
    "eval_v",
    "eval_w",
    "composite_antiderivative",
    "sample_waveform",
    "unipolar_control",
]

#: Upper (exclusive) bound on the normalized rise/fall time of the basic pulse.
DELTA_MAX = 0.25
#: Upper (inclusive) bound for exact time-domain synthesis of ``w(t)``.
DELTA_MAX_COMPOSITE = 1.0 / 12.0

# 3 * (1/12) must land on the triangle-wave limit despite rounding.
_EPS = 1e-12

ArrayLike = Union[float, np.ndarray]


def sinc(x: ArrayLike) -> ArrayLike:
    """Unnormalized cardinal sine ``sin(x)/x`` with ``sinc(0) = 1``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class PulseSpec:
    """
    Periodic trapezoidal bipolar pulse.

    Parameters
    ----------
    delta_norm : float
        Normalized rise/fall time ``Delta / T0``, in ``[0, 0.25)``.
    """

    delta_norm: float = 0.0

    def __post_init__(self):
        d = float(self.delta_norm)
        if not np.isfinite(d) or d < 0.0 or d >= DELTA_MAX:
            raise ValueError(
                f"delta_norm must lie in [0, {DELTA_MAX}), got {self.delta_norm!r}"
            )
        object.__setattr__(self, "delta_norm", d)

    @property
    def period_norm(self) -> float:
        return 1.0

    @property
    def supports_composite(self) -> bool:
        """True when ``w(t)`` can be synthesized exactly from trapezoids."""
        return self.delta_norm <= DELTA_MAX_COMPOSITE + _EPS


def _as_spec(spec) -> PulseSpec:
    return spec if isinstance(spec, PulseSpec) else PulseSpec(spec)


@dataclass(frozen=True)
class WaveformSamples:
    """Samples of a periodic waveform on the grid ``t_k = k / M``."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        m = values.size
        if m < 16 or m % 2:
            raise ValueError(f"sample_count must be even and >= 16, got {m}")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def sample_count(self) -> int:
        return self.values.size

    @property
    def t_grid(self) -> np.ndarray:
        return np.arange(self.sample_count) / self.sample_count

    def dft(self) -> np.ndarray:
        """
        Fourier-series estimate of the samples.

        Entry ``m`` (taken modulo M) is ``(1/M) sum_k x_k exp(-j 2 pi m k / M)``,
        i.e. the coefficient of ``exp(+j 2 pi m t)``.
        """
        return np.fft.fft(self.values) / self.sample_count


def _trapezoid(t: ArrayLike, half_ramp: float) -> ArrayLike:
    # Triangle wave of unit amplitude and slope 4 at t = 0, clipped at +/-1.
    # half_ramp may reach 1/4, where the pulse degenerates to that triangle.
    s = np.mod(np.asarray(t, dtype=float) + 0.25, 1.0) - 0.25
    tri = 1.0 - 4.0 * np.abs(s - 0.25)
    if half_ramp == 0.0:
        return np.sign(tri)
    with np.errstate(over="ignore"):
        # subnormal ramps overflow to +-inf before clipping, which is exact
        return np.clip(tri / (4.0 * half_ramp), -1.0, 1.0)


def _trapezoid_integral(t: ArrayLike, half_ramp: float) -> ArrayLike:
    # Integral of _trapezoid from 0 to t. The pulse is odd with zero mean,
    # so the integral is even and periodic; fold onto [0, 1/2].
    r = np.mod(np.asarray(t, dtype=float), 1.0)
    r = np.minimum(r, 1.0 - r)
    d = half_ramp
    if d == 0.0:
        return r
    return np.where(
        r <= d,
        r * r / (2.0 * d),
        np.where(r < 0.5 - d, r - 0.5 * d, 0.5 - d - (r - 0.5) ** 2 / (2.0 * d)),
    )


def eval_bipolar_pulse(spec, t: ArrayLike) -> ArrayLike:
    """
    Evaluate the trapezoidal bipolar pulse ``u(t)``.

    The value at the exact centre of a transition is 0 for every
    ``delta_norm``, including the ideal square wave.

    >>> round(float(eval_bipolar_pulse(PulseSpec(0.05), 0.025)), 12)
    0.5
    """
    spec = _as_spec(spec)
    return _trapezoid(t, spec.delta_norm)


def pulse_antiderivative(spec, t: ArrayLike) -> ArrayLike:
    """Exact integral of ``u`` over ``[0, t]``."""
    spec = _as_spec(spec)
    return _trapezoid_integral(t, spec.delta_norm)


def fourier_coefficient_u(q: int, spec) -> float:
    """
    Sine-series coefficient ``U_q`` of the bipolar pulse.

    Parameters
    ----------
    q : int
        Harmonic order, ``q >= 1``.
    spec : PulseSpec or float
        Pulse or its normalized rise/fall time.

    Returns
    -------
    float
        ``4 sinc(2 pi q delta) / (pi q)`` for odd ``q``, 0 for even ``q``.
    """
    if int(q) != q or q < 1:
        raise ValueError(f"harmonic order must be a positive integer, got {q!r}")
    q = int(q)
    spec = _as_spec(spec)
    if q % 2 == 0:
        return 0.0
    return float(4.0 * sinc(2.0 * np.pi * q * spec.delta_norm) / (np.pi * q))


def _require_composite(spec: PulseSpec):
    if not spec.supports_composite:
        raise ValueError(
            "exact synthesis of w(t) needs delta_norm <= 1/12, "
            f"got {spec.delta_norm}"
        )


def eval_v(spec, t: ArrayLike) -> ArrayLike:
    """
    Pulse at triple fundamental frequency with the same absolute ramp.

    Relative to its own period ``1/3`` the ramp is ``3 * delta_norm``.
    """
    spec = _as_spec(spec)
    _require_composite(spec)
    t = np.asarray(t, dtype=float)
    half_ramp = min(3.0 * spec.delta_norm, DELTA_MAX)
    return _trapezoid(3.0 * np.mod(t, 1.0), half_ramp)


def eval_w(spec, t: ArrayLike, q_max: int = None, method: str = "exact") -> ArrayLike:
    """
    Evaluate the composite waveform ``w(t) = u(t) - v(t)/3``.

    Parameters
    ----------
    spec : PulseSpec or float
    t : float or ndarray
        Normalized time.
    q_max : int, optional
        Highest harmonic kept by the series path. Required when
        ``method="series"``.
    method : {"exact", "series"}
        ``"exact"`` combines the two trapezoids; ``"series"`` sums the
        truncated sine series over odd harmonics that are not multiples of 3.
    """
    spec = _as_spec(spec)
    if method == "exact":
        _require_composite(spec)
        return eval_bipolar_pulse(spec, t) - eval_v(spec, t) / 3.0
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    if q_max is None or q_max < 1:
        raise ValueError("series evaluation needs q_max >= 1")
    q = np.arange(1, int(q_max) + 1, 2)
    q = q[q % 3 != 0]
    amp = 4.0 / np.pi * sinc(2.0 * np.pi * q * spec.delta_norm) / q
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t).ravel()
    out = np.empty(flat.size)
    # chunked to bound memory for large q_max
    step = max(1, 2_000_000 // max(q.size, 1))
    for i in range(0, flat.size, step):
        tt = flat[i:i + step, None]
        out[i:i + step] = np.sin(2.0 * np.pi * q[None, :] * tt) @ amp
    return out.reshape(t.shape) if t.ndim else float(out[0])


def composite_antiderivative(spec, t: ArrayLike) -> ArrayLike:
    """Exact integral of ``w`` over ``[0, t]``; used for cell-averaged sampling."""
    spec = _as_spec(spec)
    _require_composite(spec)
    t = np.asarray(t, dtype=float)
    half_ramp = min(3.0 * spec.delta_norm, DELTA_MAX)
    return _trapezoid_integral(t, spec.delta_norm) - _trapezoid_integral(3.0 * t, half_ramp) / 9.0


def sample_waveform(f: Callable[[np.ndarray], np.ndarray], M: int) -> WaveformSamples:
    """Sample a vectorized periodic evaluator on ``t_k = k/M``, ``k = 0..M-1``."""
    if int(M) != M or M < 16 or M % 2:
        raise ValueError(f"sample count must be an even integer >= 16, got {M!r}")
    t = np.arange(int(M)) / int(M)
    values = np.broadcast_to(np.asarray(f(t)), t.shape)
    return WaveformSamples(values)


def unipolar_control(spec, t: ArrayLike) -> ArrayLike:
    """SPDT control sequence ``g(t) = (u(t) + 1)/2`` in ``[0, 1]``."""
    return (eval_bipolar_pulse(spec, t) + 1.0) / 2.0

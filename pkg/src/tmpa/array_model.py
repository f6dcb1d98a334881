"""
Uniform linear array along z: harmonic array factors, patterns, directivity.

Element ``n`` sits at ``z_n = n d``; the far-field phase of element ``n`` in
direction ``theta`` is ``2 pi (d / lambda) n cos(theta)``. The per-harmonic
time factor ``exp(+-j q w0 t)`` has unit modulus and is left out, so every
pattern here is a time-independent envelope.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .harmonics import DEFAULT_Q_MAX, Band, ExcitationSet, excitation_set
from .metrics import harmonic_power_sum

__all__ = [
    "ArrayConfig",
    "PatternResult",
    "steering_delays",
    "theta_grid",
    "harmonic_pattern",
    "full_pattern",
    "directivity",
    "pattern_column",
]

DEFAULT_THETA_POINTS = 1801


def steering_delays(
    n_elements: int, theta_scan_deg: float, spacing_wl: float = 0.5
) -> np.ndarray:
    """
    Waveform delays ``D_n / T0`` that point the first-harmonic beam.

    The delay of element ``n`` equals its electrical path to the scan
    direction measured in carrier periods, ``n (d/lambda) cos(theta_scan)``,
    so that the phase ``-2 pi D_n / T0`` of the ``q = 1`` excitation cancels
    the array phase at ``theta_scan``. With ``spacing_wl = 1`` this reduces
    to ``n cos(theta_scan)``.

    >>> steering_delays(3, 90.0).tolist()
    [0.0, 0.0, 0.0]
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if not 0.0 < theta_scan_deg < 180.0:
        raise ValueError(f"scan angle must lie in (0, 180) degrees, got {theta_scan_deg}")
    c = np.cos(np.deg2rad(theta_scan_deg))
    if theta_scan_deg == 90.0:
        c = 0.0
    # adding 0.0 turns the -0.0 of element 0 into 0.0
    return np.arange(n_elements) * spacing_wl * c + 0.0


@dataclass(frozen=True)
class ArrayConfig:
    """
    Uniform linear array with unit static excitations.

    Give either ``steering_angle_deg`` or explicit ``delays`` (in periods).
    With neither, the array is steered to broadside.
    """

    n_elements: int = 16
    spacing_wl: float = 0.5
    steering_angle_deg: Optional[float] = None
    delays: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if int(self.n_elements) != self.n_elements or self.n_elements < 1:
            raise ValueError(f"n_elements must be a positive integer, got {self.n_elements!r}")
        if not self.spacing_wl > 0.0:
            raise ValueError(f"spacing_wl must be positive, got {self.spacing_wl!r}")
        if self.steering_angle_deg is not None and self.delays is not None:
            raise ValueError("give a steering angle or explicit delays, not both")
        if self.delays is not None:
            delays = tuple(float(x) for x in self.delays)
            if len(delays) != self.n_elements:
                raise ValueError(f"expected {self.n_elements} delays, got {len(delays)}")
            object.__setattr__(self, "delays", delays)
        if self.steering_angle_deg is not None:
            steering_delays(1, self.steering_angle_deg)

    @property
    def element_positions_wl(self) -> np.ndarray:
        return np.arange(self.n_elements) * self.spacing_wl

    @property
    def delays_norm(self) -> np.ndarray:
        if self.delays is not None:
            return np.array(self.delays)
        angle = 90.0 if self.steering_angle_deg is None else self.steering_angle_deg
        return steering_delays(self.n_elements, angle, self.spacing_wl)

    @property
    def beam_cosine(self) -> Optional[float]:
        """
        ``cos(theta)`` of the first-harmonic beam when it is fully formed.

        None if the delays are not a linear progression modulo one period or
        the beam falls outside visible space.
        """
        if self.n_elements == 1:
            return 0.0
        steps = np.diff(self.delays_norm)
        wrapped = np.mod(steps - steps[0] + 0.5, 1.0) - 0.5
        if np.max(np.abs(wrapped)) > 1e-9:
            return None
        # array phase 2 pi d u must equal the per-element delay phase mod 2 pi
        k = np.arange(-np.ceil(self.spacing_wl) - 1, np.ceil(self.spacing_wl) + 2)
        u = (np.mod(steps[0], 1.0) + k) / self.spacing_wl
        visible = u[np.abs(u) <= 1.0 + 1e-12]
        if visible.size == 0:
            return None
        return float(np.clip(visible[np.argmin(np.abs(visible))], -1.0, 1.0))

    def excitations(self, delta_norm: float, q_max: int = DEFAULT_Q_MAX) -> ExcitationSet:
        return excitation_set(self.n_elements, delta_norm, self.delays_norm, q_max)


def theta_grid(points: int = DEFAULT_THETA_POINTS) -> np.ndarray:
    """Uniform grid over [0, 180] degrees, both ends included."""
    if points < 2:
        raise ValueError("need at least two grid points")
    return np.linspace(0.0, 180.0, int(points))


def _array_factor_u(weights: np.ndarray, spacing_wl: float, u: np.ndarray) -> np.ndarray:
    n = np.arange(weights.size)
    steer = np.exp(2j * np.pi * spacing_wl * np.outer(np.asarray(u, dtype=float), n))
    return steer @ weights


def harmonic_pattern(
    config: ArrayConfig,
    excitations: ExcitationSet,
    q: int,
    band: Band,
    theta_deg: Sequence[float],
) -> np.ndarray:
    """
    Complex array factor ``sum_n I_nq exp(j k z_n cos(theta))`` of one harmonic.

    Raises
    ------
    KeyError
        If ``(q, band)`` is not among the excitations.
    """
    if excitations.n_elements != config.n_elements:
        raise ValueError("excitation set and array disagree on the element count")
    weights = excitations.weights(q, band)
    u = np.cos(np.deg2rad(np.asarray(theta_deg, dtype=float)))
    return _array_factor_u(weights, config.spacing_wl, u)


def pattern_column(q: int, band: Band) -> str:
    """Column label such as ``pos_q1_db`` or ``neg_q7_db``."""
    return f"{Band(band).value}_q{q}_db"


@dataclass(frozen=True)
class PatternResult:
    """
    Power patterns ``|F_q(theta)|^2`` of every kept harmonic.

    dB values are relative to ``reference``, the peak of the first-harmonic
    pattern on the grid.
    """

    theta_deg: np.ndarray
    power: Dict[Tuple[int, Band], np.ndarray]
    reference: float
    delta_norm: float
    config: ArrayConfig = field(repr=False)

    @property
    def harmonics(self) -> Tuple[Tuple[int, Band], ...]:
        return tuple(sorted(self.power, key=lambda k: k[0]))

    def db(self, q: int, band: Band) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.power[(q, Band(band))] / self.reference)

    def peak(self, q: int, band: Band) -> Tuple[float, float]:
        """Grid angle and relative level (dB) of the pattern maximum."""
        p = self.power[(q, Band(band))]
        i = int(np.argmax(p))
        with np.errstate(divide="ignore"):
            return float(self.theta_deg[i]), float(10.0 * np.log10(p[i] / self.reference))

    def columns(self) -> Dict[str, np.ndarray]:
        return {pattern_column(q, b): self.db(q, b) for q, b in self.harmonics}


def full_pattern(
    config: ArrayConfig,
    delta_norm: float,
    q_max: int = DEFAULT_Q_MAX,
    theta_deg: Optional[Sequence[float]] = None,
) -> PatternResult:
    """Patterns of all radiated harmonics up to ``q_max``, normalized to ``q = 1``."""
    theta = theta_grid() if theta_deg is None else np.asarray(theta_deg, dtype=float)
    exc = config.excitations(delta_norm, q_max)
    power = {
        (q, band): np.abs(harmonic_pattern(config, exc, q, band, theta)) ** 2
        for q, band in exc.harmonics
    }
    reference = float(np.max(power[(1, Band.POSITIVE)]))
    return PatternResult(theta, power, reference, float(delta_norm), config)


def _closed_form_ok(config: ArrayConfig) -> bool:
    twice = 2.0 * config.spacing_wl
    return abs(twice - round(twice)) < 1e-12 and config.beam_cosine is not None


def _directivity_closed(config: ArrayConfig, delta_norm: float) -> float:
    # cross-element power integrals vanish at half-wavelength multiples, so
    # D = 4 pi N^2 |I_1|^2 / (4 pi N sum_q |I_q|^2) = N * eta_tma
    s = harmonic_power_sum(delta_norm)
    fundamental = np.sinc(2.0 * delta_norm) ** 2
    return float(config.n_elements * fundamental / s.value)


def _peak_power_numerical(weights: np.ndarray, spacing_wl: float) -> float:
    u = np.cos(np.deg2rad(theta_grid(3601)))
    p = np.abs(_array_factor_u(weights, spacing_wl, u)) ** 2
    i = int(np.argmax(p))
    lo, hi = u[min(i + 1, u.size - 1)], u[max(i - 1, 0)]
    if lo == hi:
        return float(p[i])
    res = minimize_scalar(
        lambda x: -np.abs(_array_factor_u(weights, spacing_wl, [x]))[0] ** 2,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(p[i], -res.fun))


@lru_cache(maxsize=8)
def _gauss_legendre(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(nodes)


def _directivity_numerical(
    config: ArrayConfig, delta_norm: float, q_max: int, nodes: int
) -> float:
    exc = config.excitations(delta_norm, q_max)
    u, w = _gauss_legendre(int(nodes))
    radiated = 0.0
    kept = 0.0
    for q, band in exc.harmonics:
        f = _array_factor_u(exc.weights(q, band), config.spacing_wl, u)
        radiated += 2.0 * np.pi * float(np.sum(w * np.abs(f) ** 2))
        kept += np.sinc(2.0 * q * delta_norm) ** 2 / q**2
    # harmonics above q_max: incoherent element sum, 4 pi N sum |I_q|^2
    s = harmonic_power_sum(delta_norm)
    radiated += 32.0 * config.n_elements / np.pi * max(s.value - kept, 0.0)
    peak = _peak_power_numerical(exc.weights(1, Band.POSITIVE), config.spacing_wl)
    return 4.0 * np.pi * peak / radiated


def directivity(
    config: ArrayConfig,
    delta_norm: float,
    q_max: int = DEFAULT_Q_MAX,
    method: str = "auto",
    nodes: int = 2048,
) -> float:
    """
    Directivity of the first-harmonic beam in dBi.

    Every radiated harmonic counts in the average intensity.

    Parameters
    ----------
    config : ArrayConfig
    delta_norm : float
    q_max : int
        Harmonics integrated numerically; the rest enter through the
        analytic power sum.
    method : {"auto", "closed", "numerical"}
        ``"closed"`` uses ``N * eta_tma`` and needs a spacing that is a
        multiple of half a wavelength and a progressive (steered) delay
        law. ``"auto"`` picks it when valid.
    nodes : int
        Gauss-Legendre nodes in ``cos(theta)`` for the numerical path.
    """
    if method == "auto":
        method = "closed" if _closed_form_ok(config) else "numerical"
    if method == "closed":
        if not _closed_form_ok(config):
            raise ValueError(
                "closed-form directivity needs spacing_wl = k/2 and a progressive delay law"
            )
        d = _directivity_closed(config, delta_norm)
    elif method == "numerical":
        d = _directivity_numerical(config, delta_norm, q_max, nodes)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(10.0 * np.log10(d))

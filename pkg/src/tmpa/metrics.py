"""
Figures of merit versus the switch rise/fall time, and inverse design.

Powers are in the normalized units of an isotropic-element array fed with a
unit-power carrier: the static uniform array of N elements radiates
``4 pi N``.
"""

from dataclasses import asdict, dataclass
from typing import ClassVar, Iterator, NamedTuple, Optional, Tuple

import numpy as np

from .waveform import sinc

__all__ = [
    "ETA_MAX",
    "PL5_AT_ZERO",
    "PowerSum",
    "EfficiencyReport",
    "DesignResult",
    "Sweep",
    "pl5",
    "harmonic_power_sum",
    "efficiencies",
    "design_delta",
    "sweep",
]

#: Overall efficiency with ideal switches, ``8 / pi**2``.
ETA_MAX = 8.0 / np.pi**2
#: Exact sum over odd non-multiples of 3 of ``1/q**2``.
S_ZERO = np.pi**2 / 9.0

PL5_DOMAIN = 0.1
PL5_AT_ZERO = float(20.0 * np.log10(0.2))

_Q_CAP = 10_000_000


def pl5(delta_norm: float) -> float:
    """
    Level of the 5th-harmonic pattern peak relative to the 1st, in dB.

    ``20 log10 |sinc(10 pi delta) / (5 sinc(2 pi delta))|``. Returns
    ``-inf`` at ``delta_norm = 0.1``, where the 5th harmonic vanishes.
    """
    d = float(delta_norm)
    if not 0.0 <= d <= PL5_DOMAIN:
        raise ValueError(f"pl5 is defined for delta_norm in [0, {PL5_DOMAIN}], got {d}")
    ratio = abs(sinc(10.0 * np.pi * d) / (5.0 * sinc(2.0 * np.pi * d)))
    if d == PL5_DOMAIN or ratio == 0.0:
        return float("-inf")
    return float(20.0 * np.log10(ratio))


class PowerSum(NamedTuple):
    """``S(delta)`` with its truncation point and an upper bound on the tail."""

    value: float
    q_max: int
    tail_bound: float


def _upsilon_terms(delta_norm: float, q_max: int) -> np.ndarray:
    q = np.arange(1, q_max + 1, 2, dtype=float)
    q = q[q % 3 != 0]
    return sinc(2.0 * np.pi * q * delta_norm) ** 2 / q**2


def _tail_bound(delta_norm: float, q_max: int) -> float:
    # sinc^2(x) <= 1/x^2, and sum_{q>Q} q^-4 < 1/(3 Q^3)
    return 1.0 / (12.0 * np.pi**2 * delta_norm**2 * float(q_max) ** 3)


def harmonic_power_sum(
    delta_norm: float, rel_tol: float = 1e-10, q_max: Optional[int] = None
) -> PowerSum:
    """
    Sum ``S = sum_{q in Upsilon} sinc^2(2 pi q delta) / q^2``.

    Parameters
    ----------
    delta_norm : float
        Normalized rise/fall time, ``>= 0``.
    rel_tol : float
        Stop once the analytic tail bound falls below ``rel_tol * S``.
        Must lie in ``(0, 1e-3]``.
    q_max : int, optional
        Force a fixed truncation instead of choosing one from ``rel_tol``.

    Returns
    -------
    PowerSum

    Raises
    ------
    ArithmeticError
        If reaching ``rel_tol`` needs more than 10**7 harmonics.
    """
    d = float(delta_norm)
    if d < 0.0 or not np.isfinite(d):
        raise ValueError(f"delta_norm must be >= 0, got {delta_norm!r}")
    if not 0.0 < rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in (0, 1e-3], got {rel_tol!r}")
    if d == 0.0 and q_max is None:
        return PowerSum(float(S_ZERO), 0, 0.0)
    if q_max is not None:
        q_max = int(q_max)
        if q_max < 1:
            raise ValueError("q_max must be >= 1")
        value = float(np.sum(_upsilon_terms(d, q_max)))
        tail = _tail_bound(d, q_max) if d > 0.0 else float(S_ZERO - value)
        return PowerSum(value, q_max, tail)

    # the leading terms lower-bound S, which sizes the truncation
    lower = float(np.sum(_upsilon_terms(d, 19)))
    needed = (1.0 / (12.0 * np.pi**2 * d * d * rel_tol * lower)) ** (1.0 / 3.0)
    q = int(np.ceil(needed))
    if q > _Q_CAP:
        raise ArithmeticError(
            f"rel_tol={rel_tol} needs about {q} harmonics at delta_norm={d} "
            f"(cap {_Q_CAP})"
        )
    q = max(q, 7)
    value = float(np.sum(_upsilon_terms(d, q)))
    return PowerSum(value, q, _tail_bound(d, q))


def _relative_change(new: float, ref: float) -> float:
    return (new - ref) / ref


@dataclass(frozen=True)
class EfficiencyReport:
    """
    Time-modulation efficiencies at one rise/fall time.

    ``eta_tma`` is the useful fraction of the radiated power, ``eta_s`` the
    radiated power relative to the static array, ``eta`` their product.
    Powers scale with ``n_elements``; efficiencies do not.
    """

    delta_norm: float
    eta_tma: float
    eta_s: float
    eta: float
    pl5_db: Optional[float]
    p_u_tm: float
    p_r_tm: float
    p_r_st: float
    n_elements: int
    q_max_used: int
    tail_bound: float
    directivity_dbi: Optional[float] = None

    def with_directivity(self, dbi: float) -> "EfficiencyReport":
        data = asdict(self)
        data["directivity_dbi"] = float(dbi)
        return EfficiencyReport(**data)

    def relative_to(self, reference: "EfficiencyReport") -> dict:
        """Relative changes ``(x - x_ref) / x_ref`` of the three efficiencies."""
        return {
            "eta_tma": _relative_change(self.eta_tma, reference.eta_tma),
            "eta_s": _relative_change(self.eta_s, reference.eta_s),
            "eta": _relative_change(self.eta, reference.eta),
        }

    @property
    def eta_below_max(self) -> float:
        """Relative shortfall of ``eta`` with respect to ``8/pi^2``."""
        return 1.0 - self.eta / ETA_MAX

    def to_dict(self) -> dict:
        return asdict(self)


def efficiencies(delta_norm: float, n_elements: int = 16, rel_tol: float = 1e-10) -> EfficiencyReport:
    """
    Efficiency bookkeeping for a uniform half-wavelength array.

    >>> r = efficiencies(0.0)
    >>> round(r.eta_tma, 4), round(r.eta_s, 4), round(r.eta, 4)
    (0.9119, 0.8889, 0.8106)
    """
    d = float(delta_norm)
    if not 0.0 <= d < 0.25:
        raise ValueError(f"delta_norm must lie in [0, 0.25), got {delta_norm!r}")
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    s = harmonic_power_sum(d, rel_tol)
    fundamental = float(sinc(2.0 * np.pi * d) ** 2)
    p_r_st = 4.0 * np.pi * n_elements
    p_r_tm = 32.0 * n_elements / np.pi * s.value
    p_u_tm = 32.0 * n_elements / np.pi * fundamental
    pl = pl5(d) if d <= PL5_DOMAIN else None
    return EfficiencyReport(
        delta_norm=d,
        eta_tma=fundamental / s.value,
        eta_s=ETA_MAX * s.value,
        eta=ETA_MAX * fundamental,
        pl5_db=pl,
        p_u_tm=p_u_tm,
        p_r_tm=p_r_tm,
        p_r_st=p_r_st,
        n_elements=int(n_elements),
        q_max_used=s.q_max,
        tail_bound=s.tail_bound,
    )


@dataclass(frozen=True)
class DesignResult:
    """Outcome of :func:`design_delta`."""

    target_db: float
    delta_norm: float
    pl5_db: float
    already_met: bool
    iterations: int


def design_delta(
    pl5_target_db: float, max_iter: int = 50, xtol: float = 1e-12
) -> DesignResult:
    """
    Smallest rise/fall time whose 5th-harmonic level meets a target.

    ``pl5`` decreases strictly on ``[0, 0.1)``, so the answer is the
    crossing ``pl5(delta) = target`` found by bisection on ``[0, 0.1]``.
    Targets at or above ``pl5(0)`` are met by ideal switches and return
    ``delta_norm = 0`` with ``already_met`` set.

    Raises
    ------
    ValueError
        Target at or below -60 dB, or a bracket that does not straddle the
        target.
    """
    target = float(pl5_target_db)
    if not np.isfinite(target) or target <= -60.0:
        raise ValueError(f"target must lie in (-60, {PL5_AT_ZERO:.3f}] dB, got {pl5_target_db!r}")
    if target >= PL5_AT_ZERO - 1e-9:
        return DesignResult(target, 0.0, PL5_AT_ZERO, True, 0)

    lo, hi = 0.0, PL5_DOMAIN
    f_lo, f_hi = pl5(lo) - target, pl5(hi) - target
    if not (f_lo > 0.0 and f_hi < 0.0):
        raise ValueError(f"bracket [0, {PL5_DOMAIN}] does not straddle target {target} dB")
    it = 0
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if pl5(mid) - target > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < xtol:
            break
    # hi always satisfies pl5(hi) <= target
    return DesignResult(target, hi, pl5(hi), False, it)


@dataclass(frozen=True)
class Sweep:
    """Columns of a rise/fall-time sweep, one row per ``delta_norm``."""

    delta_norm: np.ndarray
    pl5_db: np.ndarray
    eta_tma: np.ndarray
    eta_s: np.ndarray
    eta: np.ndarray

    columns: ClassVar[Tuple[str, ...]] = ("delta_norm", "pl5_db", "eta_tma", "eta_s", "eta")

    def __len__(self) -> int:
        return self.delta_norm.size

    def rows(self) -> Iterator[tuple]:
        return zip(*(getattr(self, c) for c in self.columns))


def sweep(start: float = 0.0, stop: float = 0.09, step: float = 1e-3, rel_tol: float = 1e-10) -> Sweep:
    """
    Tabulate ``pl5`` and the efficiencies over ``[start, stop]``.

    The grid holds ``round((stop - start) / step) + 1`` points so that the
    endpoint is hit exactly.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    if not 0.0 <= start <= stop <= PL5_DOMAIN:
        raise ValueError(f"sweep range must satisfy 0 <= start <= stop <= {PL5_DOMAIN}")
    count = int(round((stop - start) / step)) + 1
    if count < 1:
        raise ValueError("empty sweep range")
    grid = start + step * np.arange(count)
    grid = grid[grid <= stop + 1e-12 * max(1.0, stop)]
    if grid.size == 0:
        raise ValueError("empty sweep range")
    grid[-1] = min(grid[-1], stop)
    reports = [efficiencies(d, rel_tol=rel_tol) for d in grid]
    return Sweep(
        delta_norm=grid,
        pl5_db=np.array([r.pl5_db for r in reports], dtype=float),
        eta_tma=np.array([r.eta_tma for r in reports]),
        eta_s=np.array([r.eta_s for r in reports]),
        eta=np.array([r.eta for r in reports]),
    )

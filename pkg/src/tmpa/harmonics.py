"""
Harmonic index sets and dynamic excitations of the single-sideband array.

Only odd harmonics that are not multiples of 3 survive the composite
waveform. The two-branch quadrature feed then keeps each surviving order on
one side of the carrier only:

* ``q = 1 (mod 4)``  radiates at ``wc + q w0``  (``Band.POSITIVE``)
* ``q = 3 (mod 4)``  radiates at ``wc - q w0``  (``Band.NEGATIVE``)
"""

import enum
from dataclasses import dataclass
from typing import Dict, Iterator, Sequence, Tuple

import numpy as np

from .waveform import PulseSpec, sinc

__all__ = [
    "SetKind",
    "Band",
    "HarmonicSet",
    "ExcitationSet",
    "in_upsilon",
    "band_of",
    "signed_order",
    "generate_set",
    "selection_constants",
    "dynamic_excitation",
    "excitation_magnitude",
    "excitation_set",
    "DEFAULT_Q_MAX",
]

DEFAULT_Q_MAX = 41

_SCALE = 4.0 / (np.pi * np.sqrt(2.0))


class SetKind(enum.Enum):
    UPSILON = "upsilon"
    UPSILON1 = "upsilon1"
    UPSILON2 = "upsilon2"


class Band(enum.Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"

    @property
    def sign(self) -> int:
        return 1 if self is Band.POSITIVE else -1


def in_upsilon(q: int) -> bool:
    """True for odd positive ``q`` not divisible by 3."""
    return q >= 1 and q % 2 == 1 and q % 3 != 0


def band_of(q: int) -> Band:
    """Sideband on which harmonic ``q`` radiates."""
    if not in_upsilon(q):
        raise ValueError(f"harmonic {q} is not radiated (must be odd and not a multiple of 3)")
    return Band.POSITIVE if q % 4 == 1 else Band.NEGATIVE


def signed_order(q: int) -> int:
    """Signed harmonic index ``m`` (``+q`` or ``-q``) of a radiated order."""
    return band_of(q).sign * q


@dataclass(frozen=True)
class HarmonicSet:
    kind: SetKind
    q_max: int
    members: Tuple[int, ...]

    def __contains__(self, q) -> bool:
        return q in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def _members_array(kind: SetKind, q_max: int) -> np.ndarray:
    q = np.arange(1, q_max + 1, 2)
    q = q[q % 3 != 0]
    if kind is SetKind.UPSILON1:
        q = q[q % 4 == 1]
    elif kind is SetKind.UPSILON2:
        q = q[q % 4 == 3]
    return q


def generate_set(kind: SetKind, q_max: int) -> HarmonicSet:
    """
    Members of ``kind`` up to and including ``q_max``.

    >>> generate_set(SetKind.UPSILON, 12).members
    (1, 5, 7, 11)
    """
    kind = SetKind(kind)
    if int(q_max) != q_max or q_max < 1:
        raise ValueError(f"q_max must be a positive integer, got {q_max!r}")
    members = tuple(int(v) for v in _members_array(kind, int(q_max)))
    return HarmonicSet(kind, int(q_max), members)


def selection_constants(q: int) -> Tuple[complex, complex]:
    """
    Band-selection factors ``(1 - (-j)**(q+1), -1 - j**(q+1))``.

    They weight the positive- and negative-frequency lines of harmonic ``q``
    after the quadrature combination. Computed with exact Gaussian-integer
    arithmetic on the powers of ``j``.
    """
    powers = (1, 1j, -1, -1j)
    j_pow = powers[(q + 1) % 4]
    pos = 1 - (-1) ** ((q + 1) % 2) * j_pow
    neg = -1 - j_pow
    return complex(pos), complex(neg)


def excitation_magnitude(q: int, delta_norm: float) -> float:
    """``|I_nq| = 4 |sinc(2 pi q delta)| / (pi sqrt(2) q)``."""
    return float(_SCALE * abs(sinc(2.0 * np.pi * q * delta_norm)) / q)


def dynamic_excitation(n: int, q: int, delta_norm: float, delay_norm: float) -> complex:
    """
    Complex excitation of element ``n`` at harmonic ``q``.

    Parameters
    ----------
    n : int
        Element index. The uniform static excitation makes the result depend
        on ``n`` only through ``delay_norm``.
    q : int
        Radiated harmonic order (odd, not a multiple of 3).
    delta_norm : float
        Normalized rise/fall time.
    delay_norm : float
        Waveform delay ``D_n / T0``; any real, used modulo 1.

    Returns
    -------
    complex
        ``4 sinc(2 pi q delta)/(j pi sqrt2 q) exp(-j 2 pi q D)`` for the
        positive band, ``-4 sinc(...)/(j pi sqrt2 q) exp(+j 2 pi q D)`` for
        the negative band.
    """
    if n < 0:
        raise ValueError("element index must be non-negative")
    band = band_of(q)
    PulseSpec(delta_norm)
    frac = float(np.mod(delay_norm, 1.0))
    base = _SCALE * float(sinc(2.0 * np.pi * q * delta_norm)) / q * -1j
    if band is Band.POSITIVE:
        return complex(base * np.exp(-2j * np.pi * q * frac))
    return complex(-base * np.exp(2j * np.pi * q * frac))


def _excitation_row(q: int, delta_norm: float, delays: np.ndarray) -> np.ndarray:
    band = band_of(q)
    frac = np.mod(delays, 1.0)
    base = _SCALE * float(sinc(2.0 * np.pi * q * delta_norm)) / q * -1j
    return band.sign * base * np.exp(-band.sign * 2j * np.pi * q * frac)


@dataclass(frozen=True)
class ExcitationSet:
    """
    Dynamic excitations of every element at every kept harmonic.

    ``values[i, n]`` is the excitation of element ``n`` at ``harmonics[i]``,
    a ``(q, Band)`` pair.
    """

    n_elements: int
    delta_norm: float
    delays: np.ndarray
    harmonics: Tuple[Tuple[int, Band], ...]
    values: np.ndarray

    def __post_init__(self):
        for arr in (self.delays, self.values):
            arr.flags.writeable = False

    def __getitem__(self, key: Tuple[int, int, Band]) -> complex:
        n, q, band = key
        return complex(self.values[self._row(q, band), n])

    def __contains__(self, key: Tuple[int, Band]) -> bool:
        return tuple(key) in self.harmonics

    def _row(self, q: int, band: Band) -> int:
        try:
            return self.harmonics.index((q, Band(band)))
        except ValueError:
            raise KeyError(f"harmonic ({q}, {Band(band).name}) not in excitation set") from None

    def weights(self, q: int, band: Band) -> np.ndarray:
        """Excitations of all elements at one harmonic."""
        return self.values[self._row(q, band)]

    @property
    def entries(self) -> Dict[Tuple[int, int, Band], complex]:
        return {
            (n, q, band): complex(self.values[i, n])
            for i, (q, band) in enumerate(self.harmonics)
            for n in range(self.n_elements)
        }

    @property
    def q_max(self) -> int:
        return max(q for q, _ in self.harmonics)


def excitation_set(
    n_elements: int,
    delta_norm: float,
    delays: Sequence[float],
    q_max: int = DEFAULT_Q_MAX,
) -> ExcitationSet:
    """Excitations for ``n = 0..N-1`` and every radiated ``q <= q_max``."""
    delays = np.asarray(delays, dtype=float).ravel()
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if delays.size != n_elements:
        raise ValueError(f"expected {n_elements} delays, got {delays.size}")
    PulseSpec(delta_norm)
    qs = generate_set(SetKind.UPSILON, q_max).members
    harmonics = tuple((q, band_of(q)) for q in qs)
    values = np.array([_excitation_row(q, delta_norm, delays) for q in qs], dtype=complex)
    return ExcitationSet(int(n_elements), float(delta_norm), delays.copy(), harmonics, values)

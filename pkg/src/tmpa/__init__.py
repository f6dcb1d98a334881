"""Single-sideband time-modulated phased array with trapezoidal bipolar switching."""

from .array_model import ArrayConfig, PatternResult, directivity, full_pattern, harmonic_pattern, steering_delays
from .harmonics import Band, ExcitationSet, HarmonicSet, SetKind, dynamic_excitation, excitation_set, generate_set
from .metrics import EfficiencyReport, design_delta, efficiencies, harmonic_power_sum, pl5, sweep
from .timedomain import SpectralComparison, element_signal, verify_array
from .waveform import PulseSpec, eval_bipolar_pulse, eval_w, fourier_coefficient_u, unipolar_control

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig",
    "Band",
    "EfficiencyReport",
    "ExcitationSet",
    "HarmonicSet",
    "PatternResult",
    "PulseSpec",
    "SetKind",
    "SpectralComparison",
    "design_delta",
    "directivity",
    "dynamic_excitation",
    "efficiencies",
    "element_signal",
    "eval_bipolar_pulse",
    "eval_w",
    "excitation_set",
    "fourier_coefficient_u",
    "full_pattern",
    "generate_set",
    "harmonic_pattern",
    "harmonic_power_sum",
    "pl5",
    "steering_delays",
    "sweep",
    "unipolar_control",
    "verify_array",
]

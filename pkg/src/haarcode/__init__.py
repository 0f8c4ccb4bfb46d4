"""Haar-random quantum codes under Pauli noise: exact finite-size spectra,
entropies, coherent information, postselection protocols, and the closed-form
band/threshold predictions they are checked against."""

from .ensemble import (
    CodeParams,
    EncodedState,
    encode,
    haar_isometry,
    haar_unitary,
    reduce_state,
    rng_stream,
)
from .errors import CapacityError, ConfigError
from .pauli import PauliIndex, PauliSpectrum, apply_error, enumerate_fixed_weight, omega, pauli_spectrum
from .spectra import BandDecomposition, Spectrum, coherent_information, entropy, spectrum

__all__ = [
    "BandDecomposition",
    "CapacityError",
    "CodeParams",
    "ConfigError",
    "EncodedState",
    "PauliIndex",
    "PauliSpectrum",
    "Spectrum",
    "apply_error",
    "coherent_information",
    "encode",
    "entropy",
    "haar_isometry",
    "enumerate_fixed_weight",
    "haar_unitary",
    "omega",
    "pauli_spectrum",
    "reduce_state",
    "rng_stream",
    "spectrum",
]

__version__ = "0.1.0"

"""Mutually unbiased measurements of arbitrary purity and the entanglement
witnesses built from them."""

from .exceptions import MumkitError
from .linalg import GellMannBasis, fourier_unitary, gellmann_basis, partial_transpose, schmidt_decompose
from .mum import (
    MumFamily,
    build_mum_family,
    check_mub,
    mub_unitaries,
    simplex_check,
    verify_mum,
)
from .ortho import permutation_rotation, q_matrix, rotation_d3
from .spectra import Spectrum, independent_param_count, synthesize_spectrum, validate_spectrum
from .states import DensityMatrix, isotropic, noisy_dicke, ppt_bound_state
from .witness import (
    WitnessConfig,
    WitnessResult,
    entanglement_monotone,
    evaluate,
    optimize_rotations_d3,
    witness_matrix,
)

__version__ = "0.1.0"

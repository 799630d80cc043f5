"""Numerical toolkit for a self-similar cliff potential on the half-line.

The potential is piecewise constant, diverges to minus infinity at the
origin through a geometric sequence of blocks, and nevertheless confines:
exactly one direction of boundary data survives the limit, the negative
spectrum is discrete with an asymptotic quadrupling structure, and wave
packets thrown at the cliff come back.
"""

from .boundary import (
    BoundaryVector,
    ConvergenceError,
    ProfileSamples,
    asymptotic_profile,
    boundary_vector,
    probability_current,
)
from .potential import (
    KAPPA0,
    KAPPA0_SQ,
    PhysicalParams,
    PotentialSpec,
    RangeError,
    Segment,
    build_potential,
    kappa_sq_at,
    physical_potential,
)
from .propagator import (
    StateVector,
    TransferResult,
    propagate_state,
    segment_matrix,
    segment_norm_integral,
    transfer,
)
from .spectral import (
    BoundStateMismatchError,
    EigenstateRecord,
    ScalingCheckError,
    ScalingPair,
    ScanContext,
    SpectrumReport,
    bound_condition,
    bound_state_norm_and_tail,
    eigenfunction,
    find_negative_spectrum,
    perturbation_expectation,
    phase_shift,
    phase_shift_grid,
    scaling_check,
)
from .wavepacket import (
    GeneralizedBasis,
    SpectralCoefficients,
    WavepacketState,
    evolve,
    evolve_many,
    gaussian_packet,
    observables,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "KAPPA0",
    "KAPPA0_SQ",
    "BoundaryVector",
    "BoundStateMismatchError",
    "ConvergenceError",
    "EigenstateRecord",
    "GeneralizedBasis",
    "PhysicalParams",
    "PotentialSpec",
    "ProfileSamples",
    "RangeError",
    "ScalingCheckError",
    "ScalingPair",
    "ScanContext",
    "Segment",
    "SpectralCoefficients",
    "SpectrumReport",
    "StateVector",
    "TransferResult",
    "WavepacketState",
    "asymptotic_profile",
    "bound_condition",
    "bound_state_norm_and_tail",
    "boundary_vector",
    "build_potential",
    "eigenfunction",
    "evolve",
    "evolve_many",
    "find_negative_spectrum",
    "gaussian_packet",
    "kappa_sq_at",
    "observables",
    "perturbation_expectation",
    "phase_shift",
    "phase_shift_grid",
    "physical_potential",
    "probability_current",
    "project",
    "propagate_state",
    "scaling_check",
    "segment_matrix",
    "segment_norm_integral",
    "transfer",
]

"""Optimized t-expansion energy estimates for the quantum Rabi model.

Low-order connected moments of two-parameter trial states are extrapolated
to the ground (and first excited) energy via CMX and CSM; the trial
parameters are fixed by stationarity of the order-m estimate and continued
in the coupling along the physical branch.  A dense-diagonalization oracle
validates everything.
"""

from .errors import (
    AmbiguousParity,
    NoMinimumFound,
    NoPhysicalSolution,
    SingularMomentMatrix,
    TruncationError,
    VanishingDenominator,
    ZeroLinearTerm,
)
from .exact import SpectrumResult, exact_levels, parity_resolve, reference_energies
from .extrapolation import (
    EnergyEstimate,
    Method,
    SeriesCoeffs,
    cmx_estimate,
    csm_estimate,
    e_of_t,
    series_revert,
)
from .fock import (
    StateVector,
    build_hamiltonian,
    coherent_state,
    parity_diagonal,
    parity_matrix,
    trial_state,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .model import FockConfig, RabiParams, TrialKind, TrialSpec, adequate_n_max
from .moments import (
    ConnectedMoments,
    MomentSet,
    analytic_moments_12,
    connected_from_raw,
    raw_moments,
    raw_moments_adaptive,
    raw_moments_structured,
    trial_connected_moments,
)
from .optimize import (
    BranchLabel,
    BranchTrace,
    ContinuationSettings,
    EnergyObjective,
    HessianClass,
    SearchBox,
    StationaryPoint,
    continue_branch,
    default_box,
    estimate_energy,
    stationary_points,
    variational_optimum,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousParity",
    "BranchLabel",
    "BranchTrace",
    "ConnectedMoments",
    "ContinuationSettings",
    "EnergyEstimate",
    "EnergyObjective",
    "FockConfig",
    "HessianClass",
    "KERNEL_BACKEND",
    "Method",
    "MomentSet",
    "NoMinimumFound",
    "NoPhysicalSolution",
    "RabiParams",
    "SearchBox",
    "SeriesCoeffs",
    "SingularMomentMatrix",
    "SpectrumResult",
    "StateVector",
    "StationaryPoint",
    "TrialKind",
    "TrialSpec",
    "TruncationError",
    "VanishingDenominator",
    "ZeroLinearTerm",
    "adequate_n_max",
    "analytic_moments_12",
    "build_hamiltonian",
    "cmx_estimate",
    "coherent_state",
    "connected_from_raw",
    "continue_branch",
    "csm_estimate",
    "default_box",
    "e_of_t",
    "estimate_energy",
    "exact_levels",
    "parity_diagonal",
    "parity_matrix",
    "parity_resolve",
    "raw_moments",
    "raw_moments_adaptive",
    "raw_moments_structured",
    "reference_energies",
    "series_revert",
    "stationary_points",
    "trial_connected_moments",
    "trial_state",
    "variational_optimum",
]

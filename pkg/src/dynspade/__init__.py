"""Precision limits for the separation of two dynamic point sources.

Mode-sorted (Hermite-Gauss demultiplexing) measurement of a pair of
incoherent emitters whose orientation or separation changes during the
exposure: averaged detection probabilities, Fisher information and
Cramer-Rao bounds, a direct-imaging baseline, and a Monte Carlo maximum
likelihood harness.
"""

from .modes import (
    ModeIndex,
    ModeProbabilities,
    SourceGeometry,
    hg_mode_amplitude,
    mode_indices,
    overlap_beta,
    source_positions,
    static_mode_probabilities,
)
from .dynamics import (
    CustomDensity,
    DiracDensity,
    DynamicsModel,
    Nodes,
    PeriodicTrajectory,
    PhiRotation,
    QuadratureConvergenceError,
    QuadratureSpec,
    SeparationOscillation,
    Static,
    ThetaRotation,
    UniformSphere,
    averaged_mode_probabilities,
    distribution_average,
    model_from_dict,
    time_average,
)
from .fisher import (
    FisherResult,
    NumericalHealthError,
    StarPair,
    asymptotic_fi,
    c_coefficients,
    cramer_rao_bound,
    derivative_consistency,
    fi_curve,
    fisher_information,
    proposition1_check,
    small_separation_limit,
    small_x_coefficient,
    star_parameters,
)
from .direct_imaging import (
    ImagingGrid,
    di_asymptotics,
    di_density,
    di_fisher_information,
)
from .montecarlo import (
    EstimateReport,
    ExperimentConfig,
    PhotonCounts,
    crb_consistency,
    mle_estimate,
    rotating_basis_reduction,
    sample_counts,
)

__version__ = "0.1.0"

__all__ = [
    "CustomDensity",
    "DiracDensity",
    "DynamicsModel",
    "EstimateReport",
    "ExperimentConfig",
    "FisherResult",
    "ImagingGrid",
    "ModeIndex",
    "ModeProbabilities",
    "Nodes",
    "NumericalHealthError",
    "PeriodicTrajectory",
    "PhiRotation",
    "PhotonCounts",
    "QuadratureConvergenceError",
    "QuadratureSpec",
    "SeparationOscillation",
    "SourceGeometry",
    "Static",
    "StarPair",
    "ThetaRotation",
    "UniformSphere",
    "asymptotic_fi",
    "averaged_mode_probabilities",
    "c_coefficients",
    "cramer_rao_bound",
    "crb_consistency",
    "derivative_consistency",
    "di_asymptotics",
    "di_density",
    "di_fisher_information",
    "distribution_average",
    "fi_curve",
    "fisher_information",
    "hg_mode_amplitude",
    "mle_estimate",
    "mode_indices",
    "model_from_dict",
    "overlap_beta",
    "proposition1_check",
    "rotating_basis_reduction",
    "sample_counts",
    "small_separation_limit",
    "small_x_coefficient",
    "source_positions",
    "star_parameters",
    "static_mode_probabilities",
    "time_average",
    "__version__",
]

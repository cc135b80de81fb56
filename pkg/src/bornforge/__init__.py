"""Monte Carlo and exact-geometry engine for maximum-likelihood-ratio
observation statistics on the simplex and the complex unit sphere."""

__version__ = "0.1.0"

from .errors import BornforgeError
from .experiments import (
    AlphaDiagnostic,
    ExperimentConfig,
    ExperimentResult,
    MixtureSpec,
    alpha_diagnostic,
    run_contextuality_demo,
    run_invariance_suite,
    run_mixture,
    run_mixture_violation,
    run_repeated,
    run_unitary_invariance,
)
from .geometry import (
    UniformityReport,
    VolumeEstimate,
    eigenset_measure_analytic,
    eigenset_measure_mc,
    simplex_volume_ratio,
    verify_omega_pushforward,
)
from .observer import (
    Decision,
    LikelihoodRatios,
    barycentric_observer,
    decide,
    eigenset_contains,
    likelihood_ratios,
    swap_components,
)
from .sampling import (
    RngStream,
    SamplerSpec,
    haar_unitary,
    sample_observer,
    uniform_complex_sphere,
    uniform_simplex,
)
from .states import (
    Frame,
    MixtureState,
    OutcomeSet,
    PureState,
    UnitaryMap,
    apply_unitary,
    born_probabilities,
    coefficients_in_frame,
    omega,
    validate_mixture,
    validate_pure,
)

__all__ = [
    "__version__",
    "AlphaDiagnostic",
    "BornforgeError",
    "Decision",
    "ExperimentConfig",
    "ExperimentResult",
    "Frame",
    "LikelihoodRatios",
    "MixtureSpec",
    "MixtureState",
    "OutcomeSet",
    "PureState",
    "RngStream",
    "SamplerSpec",
    "UniformityReport",
    "UnitaryMap",
    "VolumeEstimate",
    "alpha_diagnostic",
    "apply_unitary",
    "barycentric_observer",
    "born_probabilities",
    "coefficients_in_frame",
    "decide",
    "eigenset_contains",
    "eigenset_measure_analytic",
    "eigenset_measure_mc",
    "haar_unitary",
    "likelihood_ratios",
    "omega",
    "run_contextuality_demo",
    "run_invariance_suite",
    "run_mixture",
    "run_mixture_violation",
    "run_repeated",
    "run_unitary_invariance",
    "sample_observer",
    "simplex_volume_ratio",
    "swap_components",
    "uniform_complex_sphere",
    "uniform_simplex",
    "validate_mixture",
    "validate_pure",
    "verify_omega_pushforward",
]

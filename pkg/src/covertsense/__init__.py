"""Entanglement-enhanced covert sensing simulator.

Gaussian-state engine, protocol sources and receivers, adversary
detection bounds, quantum Fisher information limits, a truncated
Fock-space test oracle, and a deterministic Monte Carlo experiment
runner.
"""

__version__ = "0.1.0"

from .gaussian import (
    GaussianState,
    ModeError,
    StateError,
    photon_covariance,
    photon_mean,
    photon_stats,
    photon_variance,
    difference_stats,
    thermal,
    vacuum,
)
from .protocol import (
    ProtocolVariant,
    SensingScenario,
    build_receiver_input,
    coherent_probe,
    split_thermal,
    tmsv,
    willie_brightnesses,
    willie_marginal,
)
from .receivers import (
    CalibrationError,
    EstimatorSample,
    ReceiverStats,
    cosine_estimator,
    hr_stats,
    pcr_stats,
    receiver_stats,
    theory_mse,
)
from .adversary import (
    CovertnessReport,
    DetectionTest,
    covertness_report,
    epsilon_of,
    pe_lower_bound,
    pe_optimal_counting,
    solve_ns_for_epsilon,
    sqrt_law_schedule,
    thermal_rel_entropy,
)
from .metrology import (
    ConvergenceError,
    QfiResult,
    gaussian_fidelity,
    qfi_of_family,
    qfi_phase,
    receiver_fisher,
)
from .montecarlo import (
    CltGuardError,
    EstimationResult,
    PointFailure,
    simulate,
    sweep,
)

__all__ = [
    "__version__",
    "GaussianState",
    "ModeError",
    "StateError",
    "photon_covariance",
    "photon_mean",
    "photon_stats",
    "photon_variance",
    "difference_stats",
    "thermal",
    "vacuum",
    "ProtocolVariant",
    "SensingScenario",
    "build_receiver_input",
    "coherent_probe",
    "split_thermal",
    "tmsv",
    "willie_brightnesses",
    "willie_marginal",
    "CalibrationError",
    "EstimatorSample",
    "ReceiverStats",
    "cosine_estimator",
    "hr_stats",
    "pcr_stats",
    "receiver_stats",
    "theory_mse",
    "CovertnessReport",
    "DetectionTest",
    "covertness_report",
    "epsilon_of",
    "pe_lower_bound",
    "pe_optimal_counting",
    "solve_ns_for_epsilon",
    "sqrt_law_schedule",
    "thermal_rel_entropy",
    "ConvergenceError",
    "QfiResult",
    "gaussian_fidelity",
    "qfi_of_family",
    "qfi_phase",
    "receiver_fisher",
    "CltGuardError",
    "EstimationResult",
    "PointFailure",
    "simulate",
    "sweep",
]

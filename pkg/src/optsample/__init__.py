"""Nonuniform sampling design and FRF estimation under nonperiodic multisine excitation."""

from .bounds import (
    BernsteinParams,
    bernstein_calibration,
    covariance_bound,
    min_eigenvalue_hermitian,
    rn_inverse_bound,
    solve_t,
)
from .config import ExperimentConfig, load_config
from .estimator import (
    FrfEstimate,
    MultisineFRF,
    RegressionSystem,
    SamplingSchedule,
    build_regression,
    fim,
    ls_estimate,
    psi_gram,
)
from .exceptions import CampaignError, ConfigError, NotConverged, RankDeficient, VacuousBound
from .experiments import MonteCarloSummary, emit_results, run_montecarlo
from .infodesign import (
    DesignMeasure,
    InformationMatrix,
    doptimal_density,
    expected_info,
    greedy_schedule,
    kw_statistic,
    logdet_gain,
    sample_schedule,
    uniform_measure,
    uniform_schedule,
)
from .signals import FrequencyBasis, Multisine, amplitude_matrix, eval_multisine, regressor_phi, regressor_psi
from .systems import (
    MeasurementRecord,
    RationalTransferFunction,
    freq_response,
    simulate_measurements,
    steady_state_output,
    true_theta,
)

__version__ = "0.1.0"

__all__ = [
    "BernsteinParams",
    "bernstein_calibration",
    "covariance_bound",
    "min_eigenvalue_hermitian",
    "rn_inverse_bound",
    "solve_t",
    "ExperimentConfig",
    "load_config",
    "FrfEstimate",
    "MultisineFRF",
    "RegressionSystem",
    "SamplingSchedule",
    "build_regression",
    "fim",
    "ls_estimate",
    "psi_gram",
    "CampaignError",
    "ConfigError",
    "NotConverged",
    "RankDeficient",
    "VacuousBound",
    "MonteCarloSummary",
    "emit_results",
    "run_montecarlo",
    "DesignMeasure",
    "InformationMatrix",
    "doptimal_density",
    "expected_info",
    "greedy_schedule",
    "kw_statistic",
    "logdet_gain",
    "sample_schedule",
    "uniform_measure",
    "uniform_schedule",
    "FrequencyBasis",
    "Multisine",
    "amplitude_matrix",
    "eval_multisine",
    "regressor_phi",
    "regressor_psi",
    "MeasurementRecord",
    "RationalTransferFunction",
    "freq_response",
    "simulate_measurements",
    "steady_state_output",
    "true_theta",
]

"""cellcache: coverage analysis, cache placement optimization, and Monte Carlo
validation for multi-antenna small-cell networks with a Poisson layout."""

__version__ = "0.1.0"

from .geometry import (
    PERFECT_CSI,
    NetworkParams,
    Realization,
    default_window_radius,
    delta_ratio_pdf,
    joint_kK_pdf,
    kth_distance_pdf,
    sample_realization,
    truncation_bound,
)
from .channel import (
    GainModel,
    csi_quantization_zeta,
    gain_model,
    mf_beamformer,
    sample_rayleigh,
    zf_beamformer,
)
from .specfun import NonConvergenceError, QuadratureSpec, alzer_eta, tail_integral_A
from .coverage import (
    CoverageProfile,
    ExactModeCapError,
    cov_mf_bounds,
    cov_mf_closed_alpha4,
    cov_mf_exact,
    cov_nomf_bounds,
    cov_nomf_exact,
    cov_quantized,
    cov_zf_approx_bounds,
    cov_zf_exact,
    coverage_profile,
    with_gamma,
)
from .metrics import (
    UNCACHED,
    CodedCachePolicy,
    PopularityProfile,
    ProbCachePolicy,
    RateTable,
    aese_coded,
    aese_prob,
    afot_coded,
    afot_prob,
    aggregate,
    ese_coded_nomf,
    ese_coded_ozf,
    ese_prob,
    ese_rate,
    fot_coded_nomf,
    fot_coded_ozf,
    fot_prob,
    rate_table,
    zipf_popularity,
)
from .placement import (
    EXHAUSTIVE_N_CAP,
    SolverOptions,
    exhaustive_coded,
    greedy_coded,
    mpc_policy,
    solve_prob_caching,
)
from .montecarlo import (
    SimEstimate,
    TrialPlan,
    sim_aese,
    sim_afot,
    sim_coverage,
    sim_sic_fot,
)
from .cli import ExperimentConfig, load_config, run_experiment

__all__ = [
    "PERFECT_CSI", "NetworkParams", "Realization", "default_window_radius",
    "delta_ratio_pdf", "joint_kK_pdf", "kth_distance_pdf",
    "sample_realization", "truncation_bound",
    "GainModel", "csi_quantization_zeta", "gain_model", "mf_beamformer",
    "sample_rayleigh", "zf_beamformer",
    "NonConvergenceError", "QuadratureSpec", "alzer_eta", "tail_integral_A",
    "CoverageProfile", "ExactModeCapError", "cov_mf_bounds",
    "cov_mf_closed_alpha4", "cov_mf_exact", "cov_nomf_bounds",
    "cov_nomf_exact", "cov_quantized", "cov_zf_approx_bounds", "cov_zf_exact",
    "coverage_profile", "with_gamma",
    "UNCACHED", "CodedCachePolicy", "PopularityProfile", "ProbCachePolicy",
    "RateTable", "aese_coded", "aese_prob", "afot_coded", "afot_prob",
    "aggregate",
    "ese_coded_nomf", "ese_coded_ozf", "ese_prob", "ese_rate",
    "fot_coded_nomf", "fot_coded_ozf", "fot_prob", "rate_table",
    "zipf_popularity",
    "EXHAUSTIVE_N_CAP",
    "SolverOptions", "exhaustive_coded", "greedy_coded", "mpc_policy",
    "solve_prob_caching",
    "SimEstimate", "TrialPlan", "sim_aese", "sim_afot", "sim_coverage",
    "sim_sic_fot",
    "ExperimentConfig", "load_config", "run_experiment",
]

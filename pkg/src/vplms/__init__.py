"""Sparse adaptive filtering with p-norm zero attractors and online
adaptation of the norm order, plus a seeded Monte-Carlo experiment harness."""

from .attractors import (
    NewtonPowConfig,
    PenaltyParams,
    lp_attractor,
    lp_norm,
    newton_pow,
    pl_attractor,
    rational_power_seed,
    sign,
)
from .filters import (
    AlgoKind,
    DeltaSchedule,
    FilterState,
    HyperParams,
    ScheduleKind,
    delta_at,
    gsd_default_schedule,
    gse_default_schedule,
    lms_step,
    lp_lms_step,
    lpl_lms_step,
    new_state,
    predict_error,
    update_p,
    vp_step,
)
from .gradients import (
    GradContext,
    d_lp_attractor_dp,
    d_pl_attractor_dp,
    fd_gradient_oracle,
    gsd_gradient,
    gse_gradient,
    gse_pl_gradient,
)
from .metrics import (
    EnsembleTrace,
    RunTrace,
    ensemble_average,
    lms_msd_prediction,
    mean_misalignment_step,
    squared_deviation,
    steady_state_msd,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    MonteCarloResult,
    SummaryRecord,
    config_fingerprint,
    parse_config,
    run_experiment,
    run_monte_carlo,
    run_single,
    write_summary,
    write_traces_csv,
)
from .signal_model import (
    SignalStream,
    SparseSystemSpec,
    TrueWeights,
    generate_sparse_weights,
    generate_white_gaussian,
    regressor,
    regressor_matrix,
    snr_to_noise_variance,
    system_output,
)

__version__ = "0.1.0"

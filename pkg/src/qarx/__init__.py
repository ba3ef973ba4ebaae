"""Order estimation for ARX systems observed through a uniform quantizer."""

from .model import (
    ArxModel,
    InputSpec,
    Quantizer,
    Trajectory,
    check_stability,
    lagged_matrix,
    quantization_noise_bound,
    quantization_noise_sequence,
    quantize,
    quantize_array,
    quantize_trajectory,
    response,
    satisfies_step_bound,
    simulate,
    step_bound,
)
from .estimator import (
    GramState,
    PaddedTheta,
    Regressor,
    accumulate,
    accumulate_rows,
    build_regressor,
    eigenvalue_extremes,
    new_gram_state,
    pad_theta,
    param_error_norm,
    regressor_matrix,
    solve_theta,
    true_theta,
)
from .criterion import (
    CriterionRow,
    CriterionTable,
    OrderCheckpoint,
    PenaltyHypothesis,
    PenaltyInterval,
    PenaltySchedule,
    ar_penalty_interval,
    estimate_ar_order,
    estimate_exo_order,
    exo_penalty_interval,
    order_trajectories,
    penalized_criterion,
    residual_sum_squares,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    OrderRecord,
    SummaryRow,
    TrialResult,
    config_to_dict,
    format_summary,
    load_config,
    read_orders,
    records_from_results,
    run_experiment,
    summarize,
    write_results,
    write_summary,
)

__version__ = "0.1.0"

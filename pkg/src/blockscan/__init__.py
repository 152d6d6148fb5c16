"""blockscan: size-adaptive localization of an anomalous submatrix in noise.

Find the submatrix of a data matrix whose entries are unusually large,
without knowing its size: a penalized multiscale scan objective, two
approximate optimizers (a size-adaptive alternating hill climb and a
golden-section size search), an exact small-instance oracle, two baseline
localizers, and a reproducible benchmark harness with planted-block
synthetic data.
"""

from .baselines import PowerIterationError, SpectralConfig, gmg_localize, spectral_localize
from .bench import (
    METHODS,
    ExperimentConfig,
    ResultRow,
    UnimodalityResult,
    error_curve_config,
    run_error_curve,
    run_timing,
    timing_config,
    unimodality_design,
    unimodality_grid,
)
from .core import (
    PenaltyParams,
    ScanResult,
    Selection,
    Thresholds,
    as_matrix,
    critical_signal,
    impossibility_threshold,
    localization_error,
    log_binom,
    multiscale_objective,
    recovery_constant,
    recovery_threshold,
    signal_thresholds,
    size_penalty,
    size_penalty_approx,
    submatrix_sum,
)
from .generate import (
    FAMILIES,
    GenerationSpec,
    anomaly_sample,
    background_sample,
    derive_seed,
    generate,
    read_matrix_csv,
    read_truth_json,
    stream,
    write_matrix_csv,
    write_truth_json,
)
from .search import (
    EXHAUSTIVE_MAX_ROWS,
    AdaptiveConfig,
    GssConfig,
    LasConfig,
    adaptive_las,
    exhaustive_search,
    fixed_size_scan,
    gss,
    las,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig",
    "EXHAUSTIVE_MAX_ROWS",
    "ExperimentConfig",
    "FAMILIES",
    "GenerationSpec",
    "GssConfig",
    "LasConfig",
    "METHODS",
    "PenaltyParams",
    "PowerIterationError",
    "ResultRow",
    "ScanResult",
    "Selection",
    "SpectralConfig",
    "Thresholds",
    "UnimodalityResult",
    "adaptive_las",
    "anomaly_sample",
    "as_matrix",
    "background_sample",
    "critical_signal",
    "derive_seed",
    "error_curve_config",
    "exhaustive_search",
    "fixed_size_scan",
    "generate",
    "gmg_localize",
    "gss",
    "impossibility_threshold",
    "las",
    "localization_error",
    "log_binom",
    "multiscale_objective",
    "read_matrix_csv",
    "read_truth_json",
    "recovery_constant",
    "recovery_threshold",
    "run_error_curve",
    "run_timing",
    "signal_thresholds",
    "size_penalty",
    "size_penalty_approx",
    "spectral_localize",
    "stream",
    "submatrix_sum",
    "timing_config",
    "unimodality_design",
    "unimodality_grid",
    "write_matrix_csv",
    "write_truth_json",
]

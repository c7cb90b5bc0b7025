"""Random-projection averaged Hotelling test for high-dimensional two-sample means."""
from .asymptotics import (
    PowerParams,
    are_cq_rp,
    are_rp_vs_kstar,
    are_sd_rp,
    delta_bar_k_mc,
    delta_k,
    inverse_wishart_marginal_oracle,
    power_cq,
    power_rp,
    power_sd,
    projected_inverse_bounds_oracle,
    quadform_tail_bound,
    sufficient_condition_report,
)
from .baselines import BASELINES, bs_statistic, cq_statistic, sd_statistic
from .errors import (
    RPMeanTestError,
    InvalidDimensionError,
    DimensionMismatchError,
    NotPositiveDefiniteError,
    DegenerateVarianceError,
    InsufficientSamplesError,
    InvalidProjectionError,
    InvalidRatioError,
    SingularCovarianceError,
    ProjectedSingularityError,
    UndefinedRatioError,
    MomentUndefinedError,
    ReplicationError,
)
from .harness import (
    ExperimentConfig,
    RocCurve,
    pvalue_stability,
    roc_from_scores,
    run_setting,
    sweep_projection_dimension,
    table1_report,
    table1_values,
)
from .models import (
    CovarianceModel,
    RealizedCovariance,
    ShiftModel,
    build_spectrum,
    covariance_summaries,
    realize_covariance,
    sample_shift,
)
from .rp_test import (
    PooledStats,
    TestOutcome,
    TwoSampleData,
    critical_value,
    default_k,
    hotelling_statistic,
    null_moments,
    pooled_stats,
    rp_statistic,
    run_hotelling_test,
    run_rp_test,
)
from .sampling import (
    ProjectionDraw,
    RngStream,
    gaussian_projection,
    haar_orthogonal,
    sample_mvn,
    sample_white_wishart,
    thin_qr,
)

__version__ = "0.1.0"

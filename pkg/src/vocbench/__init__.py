"""Value-based evaluation of abstaining (selective) classifiers."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    AbstainingPrediction,
    EmptyDatasetError,
    OutcomeCounts,
    Penalty,
    PredictionRecord,
    ScoredDataset,
    UseCase,
    VocError,
    apply_threshold,
    count_outcomes,
    dimensionless_value,
    normalize_value,
    raw_value,
    to_penalty,
)
from .threshold import (  # noqa: E402
    ThresholdResult,
    calibrated_expected_value,
    calibrated_threshold,
    candidate_thresholds,
    optimize_threshold,
)
from .voc import (  # noqa: E402
    ValueLine,
    VocCurve,
    dominates,
    evaluate_curve,
    fixed_voc,
    omega_aware_voc,
    omega_sup,
    voc_auc,
)
from .calibration import (  # noqa: E402
    DiscriminationReport,
    MonotoneRescale,
    accuracy,
    apply_rescale,
    discrimination,
    ece,
    isotonic_rescale,
)
from .synth import ConfidenceDistribution, polarize, preset, push_up, realize  # noqa: E402
from .discriminator import Discriminator, apply_discriminator, train_bin_remap  # noqa: E402

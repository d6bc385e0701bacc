"""Best monotone alignment and min-over-alignments consistency loss for embedding sequences."""

__version__ = "0.1.0"

from .analysis import (
    BaselineStats,
    ConsistencyReport,
    baseline_stats,
    consistency_report,
    framewise_alignment,
    selection_bias_probe,
)
from .dp_align import (
    BestAlignmentResult,
    CostMatrix,
    Solver,
    brute_force_best,
    cost_matrix,
    distance_matrix,
    solve,
    solve_naive,
    solve_optimized,
)
from .errors import (
    AlignError,
    AlignmentIndexError,
    DegenerateBaseline,
    DimensionError,
    DivergenceDetected,
    InstanceTooLarge,
    LengthError,
    NonDifferentiablePoint,
    ValidationError,
)
from .gradients import GradientPair, consistency_grad, finite_difference_check
from .seqcore import Alignment, EmbeddingSequence, FrameMetric, aligned_loss, frame_distance, validate_pair
from .synth import PlantedInstance, UpdateSide, generate_planted, optimize_embeddings

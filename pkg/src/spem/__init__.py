"""Progressive spectral-subspace embeddings.

Pipeline: k-NN graph -> fuzzy weights -> normalized Laplacian -> eigenmodes ->
stochastic optimization of a small projection matrix over a growing spectral
subspace.  Every stage of the progression is captured in a portable artifact
that downstream viewers can consume.
"""

from .artifact import (
    EmbeddingArtifact,
    ExplanationHead,
    StageEntry,
    load_artifact,
    save_artifact,
)
from .data import DataMatrix
from .datasets import gen_gaussian_blobs, gen_multiscale_loop, gen_swiss_roll
from .errors import (
    CenterPlacementFailed,
    ConvergenceFailure,
    DegenerateDistances,
    DegenerateSchedule,
    FitDiverged,
    FormatError,
    GraphTooFragmented,
    IsolatedVertex,
    KTooLarge,
    MissingThumbnails,
    NonFiniteInput,
    NonFiniteUpdate,
    NotSymmetric,
    PortInUse,
    RuntimeFailure,
    ShapeMismatch,
    SigmaSearchFailed,
    SpemError,
    SubspaceTooLarge,
    TooLargeForDense,
    ValidationError,
    ZeroReference,
)
from .explain import (
    GridSummary,
    PetalGlyphSpec,
    SpectralResponse,
    glyph_data,
    glyph_ref_scale,
    grid_aggregate,
    spectral_response,
)
from .graph import (
    DirectedWeights,
    FuzzyGraph,
    LaplacianMatrix,
    NeighborLists,
    build_knn,
    fuzzy_weights,
    normalized_laplacian,
    symmetrize,
)
from .matrixio import load_csv, load_matrix, load_points, save_csv, save_matrix
from .metrics import (
    DemapResult,
    DistanceSummary,
    MetricReport,
    continuity,
    demap,
    evaluate_stages,
    isotonic_fit,
    mrre_missing,
    pairwise_summary,
    prefix_error_curve,
    reconstruction_error,
    spearman_rho,
    stress_pair,
)
from .optimizer import (
    CurveParams,
    OptimizerConfig,
    ProjectionMatrix,
    dense_loss,
    dense_loss_grad,
    fit_ab,
    optimize,
    pair_gradients,
    q_similarity,
)
from .progressive import (
    StageResult,
    StageSchedule,
    augment,
    init_first_stage,
    make_schedule,
    run_progressive,
)
from .spectral import (
    SpectralSubspace,
    Spectrum,
    eigendecompose,
    project_exact,
    subspace,
)

__version__ = "0.1.0"

__all__ = [
    "CenterPlacementFailed",
    "ConvergenceFailure",
    "CurveParams",
    "DataMatrix",
    "DegenerateDistances",
    "DegenerateSchedule",
    "DemapResult",
    "DirectedWeights",
    "DistanceSummary",
    "EmbeddingArtifact",
    "ExplanationHead",
    "FitDiverged",
    "FormatError",
    "FuzzyGraph",
    "GraphTooFragmented",
    "GridSummary",
    "IsolatedVertex",
    "KTooLarge",
    "LaplacianMatrix",
    "MetricReport",
    "MissingThumbnails",
    "NeighborLists",
    "NonFiniteInput",
    "NonFiniteUpdate",
    "NotSymmetric",
    "OptimizerConfig",
    "PetalGlyphSpec",
    "PortInUse",
    "ProjectionMatrix",
    "RuntimeFailure",
    "ShapeMismatch",
    "SigmaSearchFailed",
    "SpectralResponse",
    "SpectralSubspace",
    "Spectrum",
    "SpemError",
    "StageEntry",
    "StageResult",
    "StageSchedule",
    "SubspaceTooLarge",
    "TooLargeForDense",
    "ValidationError",
    "ZeroReference",
    "augment",
    "build_knn",
    "continuity",
    "demap",
    "dense_loss",
    "dense_loss_grad",
    "eigendecompose",
    "evaluate_stages",
    "fit_ab",
    "fuzzy_weights",
    "gen_gaussian_blobs",
    "gen_multiscale_loop",
    "gen_swiss_roll",
    "glyph_data",
    "glyph_ref_scale",
    "grid_aggregate",
    "init_first_stage",
    "isotonic_fit",
    "load_artifact",
    "load_csv",
    "load_matrix",
    "load_points",
    "make_schedule",
    "mrre_missing",
    "normalized_laplacian",
    "optimize",
    "pair_gradients",
    "pairwise_summary",
    "prefix_error_curve",
    "project_exact",
    "q_similarity",
    "reconstruction_error",
    "run_progressive",
    "save_artifact",
    "save_csv",
    "save_matrix",
    "spearman_rho",
    "spectral_response",
    "stress_pair",
    "subspace",
    "symmetrize",
]

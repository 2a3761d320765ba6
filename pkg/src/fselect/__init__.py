"""Feature-based subset selection engine.

Loads per-sample feature matrices from one or more extractors, scores
samples by fusing intra-class distance ranks with nearest-centroid
pseudo-label agreement, and selects class-balanced, budget-constrained
subsets.  Classic feature-space baselines and analysis metrics ride along.
"""

from .errors import (
    DimensionMismatchError,
    DuplicateExtractorError,
    EmptyClassError,
    FormatError,
    FselectError,
    LabelOutOfRangeError,
    NonFiniteValueError,
    SampleCountMismatchError,
    ValidationError,
    ZeroVectorError,
)
from .io import (
    FeatureBundle,
    FeatureMatrix,
    LabelVector,
    SelectionResult,
    load_bundle,
    load_features,
    load_labels,
    save_features,
    save_features_csv,
    save_labels,
    save_labels_csv,
    save_selection,
    sniff_format,
)
from .geometry import (
    CentroidSet,
    RankTable,
    centroid_distances,
    class_centroids,
    intra_class_ranks,
    own_centroid_distances,
)
from .scoring import (
    AplScore,
    FusionWeights,
    RamScore,
    apl,
    pseudo_labels,
    ram,
    ram_apl_score,
    weights,
)
from .selectors import (
    METHODS,
    BudgetPlan,
    SelectorConfig,
    plan_budget,
    run_selector,
    select_graph_cut,
    select_herding,
    select_kcg,
    select_mds,
    select_min,
    select_ram_apl,
    select_random,
)
from .analysis import (
    CrossModelSimilarity,
    DiversityReport,
    PseudoLabelReport,
    cross_model_similarity,
    pseudo_label_report,
    reduce_pca,
    subset_diversity,
)
from .synth import SynthSpec, generate, inject_symmetric_noise

__version__ = "0.1.0"

__all__ = [
    "AplScore",
    "BudgetPlan",
    "CentroidSet",
    "CrossModelSimilarity",
    "DimensionMismatchError",
    "DiversityReport",
    "DuplicateExtractorError",
    "EmptyClassError",
    "FeatureBundle",
    "FeatureMatrix",
    "FormatError",
    "FselectError",
    "FusionWeights",
    "LabelOutOfRangeError",
    "LabelVector",
    "METHODS",
    "NonFiniteValueError",
    "PseudoLabelReport",
    "RamScore",
    "RankTable",
    "SampleCountMismatchError",
    "SelectionResult",
    "SelectorConfig",
    "SynthSpec",
    "ValidationError",
    "ZeroVectorError",
    "apl",
    "centroid_distances",
    "class_centroids",
    "cross_model_similarity",
    "generate",
    "inject_symmetric_noise",
    "intra_class_ranks",
    "load_bundle",
    "load_features",
    "load_labels",
    "own_centroid_distances",
    "plan_budget",
    "pseudo_label_report",
    "pseudo_labels",
    "ram",
    "ram_apl_score",
    "reduce_pca",
    "run_selector",
    "save_features",
    "save_features_csv",
    "save_labels",
    "save_labels_csv",
    "save_selection",
    "select_graph_cut",
    "select_herding",
    "select_kcg",
    "select_mds",
    "select_min",
    "select_ram_apl",
    "select_random",
    "sniff_format",
    "subset_diversity",
    "weights",
]

"""Predict dependency growth in versioned package graphs and anticipate
the architectural smells (cyclic and hub-like dependencies) the new
edges would introduce."""

from .classifier import (
    PredictionModel,
    PredictionSet,
    TrainConfig,
    load_model,
    predict,
    save_model,
    train,
)
from .content import CHANNELS, ContentCorpus, cosine_similarity, load_corpus, package_bag, save_corpus
from .dataset import (
    Dataset,
    Instance,
    build_test_set,
    build_training_set,
    label_for_evaluation,
    load_dataset,
    save_dataset,
)
from .errors import (
    DataError,
    ParseError,
    SchemaError,
    SmellcastError,
    StructuralError,
    ValidationError,
)
from .evaluation import MetricsReport, edge_metrics, smell_metrics
from .features import (
    ALL_FEATURES,
    CONTENT_FEATURES,
    TOPO_FEATURES,
    content_features,
    information_gain,
    select_features,
    topo_features,
)
from .graph import (
    DependencyGraph,
    DegreeStats,
    GraphDelta,
    apply_delta,
    diff_graphs,
    load_graph,
    save_graph,
)
from .pipeline import PipelineConfig, PipelineResult, make_config, run_pipeline
from .smells import (
    AnticipatedSmells,
    CycleReport,
    HubReport,
    cycle_filter,
    detect_cycles,
    detect_hubs,
    hub_filter,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_FEATURES",
    "AnticipatedSmells",
    "CHANNELS",
    "CONTENT_FEATURES",
    "ContentCorpus",
    "CycleReport",
    "DataError",
    "Dataset",
    "DegreeStats",
    "DependencyGraph",
    "GraphDelta",
    "HubReport",
    "Instance",
    "MetricsReport",
    "ParseError",
    "PipelineConfig",
    "PipelineResult",
    "PredictionModel",
    "PredictionSet",
    "SchemaError",
    "SmellcastError",
    "StructuralError",
    "TOPO_FEATURES",
    "TrainConfig",
    "ValidationError",
    "apply_delta",
    "build_test_set",
    "build_training_set",
    "content_features",
    "cosine_similarity",
    "cycle_filter",
    "detect_cycles",
    "detect_hubs",
    "diff_graphs",
    "edge_metrics",
    "hub_filter",
    "information_gain",
    "label_for_evaluation",
    "load_corpus",
    "load_dataset",
    "load_graph",
    "load_model",
    "make_config",
    "package_bag",
    "predict",
    "run_pipeline",
    "save_corpus",
    "save_dataset",
    "save_graph",
    "save_model",
    "select_features",
    "smell_metrics",
    "topo_features",
    "train",
    "__version__",
]

"""soi-lab: training-dynamics analysis for example-level learning behavior.

The package ingests per-epoch prediction logs, sorts every training example
into one of six learning-behavior categories, draws confidence/variability
maps, counts category transitions between two training settings, selects
second-stage fine-tuning subsets, and ships a small synthetic-data lab that
exercises the entire flow end to end.
"""
__version__ = "0.1.0"

from . import errors, toy
from .cartography import (
    DEFAULT_THRESHOLDS,
    CartographyPoint,
    Region,
    RegionThresholds,
    assign_region,
    build_map,
    confidence,
    render_map,
    variability,
    write_map_csv,
)
from .dynamics import (
    LOG_FORMAT_VERSION,
    ExampleDynamics,
    PredictionRecord,
    TrainingDynamics,
    correctness_sequence,
    ingest_run,
    load_runs,
    parse_record,
    read_records,
    serialize_run,
    write_run,
)
from .selection import (
    DEFAULT_STRATEGY,
    STRATEGY_I_CELLS,
    SelectionResult,
    Strategy,
    export_subset,
    read_subset,
    select,
)
from .soi import (
    CATEGORY_ORDER,
    FORGETTABLE,
    AssignmentEntry,
    EventCounts,
    SOIAssignment,
    SOICategory,
    classify,
    classify_run,
    count_events,
    default_cutoff,
    read_assignment_csv,
    write_assignment_csv,
)
from .transitions import (
    TransitionMatrix,
    build_heatmap,
    render_heatmap,
    shared_example_ids,
    write_matrix_csv,
)

__all__ = [
    "__version__",
    "errors",
    "toy",
    "LOG_FORMAT_VERSION",
    "ExampleDynamics",
    "PredictionRecord",
    "TrainingDynamics",
    "correctness_sequence",
    "ingest_run",
    "load_runs",
    "parse_record",
    "read_records",
    "serialize_run",
    "write_run",
    "CATEGORY_ORDER",
    "FORGETTABLE",
    "AssignmentEntry",
    "EventCounts",
    "SOIAssignment",
    "SOICategory",
    "classify",
    "classify_run",
    "count_events",
    "default_cutoff",
    "read_assignment_csv",
    "write_assignment_csv",
    "DEFAULT_THRESHOLDS",
    "CartographyPoint",
    "Region",
    "RegionThresholds",
    "assign_region",
    "build_map",
    "confidence",
    "render_map",
    "variability",
    "write_map_csv",
    "TransitionMatrix",
    "build_heatmap",
    "render_heatmap",
    "shared_example_ids",
    "write_matrix_csv",
    "DEFAULT_STRATEGY",
    "STRATEGY_I_CELLS",
    "SelectionResult",
    "Strategy",
    "export_subset",
    "read_subset",
    "select",
]

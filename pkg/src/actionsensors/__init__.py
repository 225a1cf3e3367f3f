"""Plan validation, crossover clipping, and action-based sensor synthesis.

Pipeline: a plan that solves a world induces a visitation order on world
states; if that order is acyclic a progress measure exists, its cone
relation pairs observations with guaranteed-progress actions, and
singleton/permissive sensors fall out.  Plans with crossover conflicts
are first split into crossover-free representatives by the clipping
search over their interaction graph.
"""

from .clip import (
    IGraph,
    Representative,
    build_igraph,
    candidate_edges,
    clip,
    is_derived_from,
    oracle_all_subplans,
    policy_plan,
    representative_plan,
)
from .exceptions import (
    ActionNotOffered,
    ActionSensorsError,
    AlphabetMismatch,
    AmbiguousTrace,
    BoundExceeded,
    CapExceeded,
    CrossoverError,
    DeadTrace,
    EmptySelection,
    InvalidMeasure,
    InvariantViolation,
    NoInitialMatch,
    NoRepresentative,
    NotACovering,
    NotASolution,
    NotFinite,
    ParseError,
    PartitionMismatch,
    ScopeViolation,
    SelectionOutsideCone,
    TraceError,
    VersionMismatch,
)
from .fileio import FORMAT_VERSION, Document, export_dot, load, save
from .model import (
    Edge,
    Execution,
    Plan,
    ScopeReport,
    TraceResult,
    World,
    check_scope,
    trace_plan,
    trace_world,
)
from .progress import (
    ComesBefore,
    CrossoverConflict,
    MeasureCheck,
    OperativeActionSet,
    ProgressMeasure,
    comes_before,
    compute_progress_measure,
    find_crossovers,
    operative_action_set,
    verify_progress_measure,
)
from .sensors import (
    ConeRelation,
    IndistinguishabilityConstraint,
    PermissiveSensor,
    SensorPartition,
    SingletonSensor,
    all_sensors,
    cone_relation,
    count_singleton_sensors,
    enumerate_singleton_sensors,
    is_realizable,
    operative_sensor,
    permissive_sensor,
    to_partition,
)
from .validate import (
    JointLanguage,
    OracleReport,
    ProductGraph,
    SolutionReport,
    Transition,
    is_finite_on,
    is_receptive,
    is_safe,
    joint_language,
    oracle_check,
    product_graph,
    solves,
)

__version__ = "0.1.0"

__all__ = [
    "ActionNotOffered",
    "ActionSensorsError",
    "AlphabetMismatch",
    "AmbiguousTrace",
    "BoundExceeded",
    "CapExceeded",
    "ComesBefore",
    "ConeRelation",
    "CrossoverConflict",
    "CrossoverError",
    "DeadTrace",
    "Document",
    "Edge",
    "EmptySelection",
    "Execution",
    "FORMAT_VERSION",
    "IGraph",
    "IndistinguishabilityConstraint",
    "InvalidMeasure",
    "InvariantViolation",
    "JointLanguage",
    "MeasureCheck",
    "NoInitialMatch",
    "NoRepresentative",
    "NotACovering",
    "NotASolution",
    "NotFinite",
    "OperativeActionSet",
    "OracleReport",
    "ParseError",
    "PartitionMismatch",
    "PermissiveSensor",
    "Plan",
    "ProductGraph",
    "ProgressMeasure",
    "Representative",
    "ScopeReport",
    "ScopeViolation",
    "SelectionOutsideCone",
    "SensorPartition",
    "SingletonSensor",
    "SolutionReport",
    "TraceError",
    "TraceResult",
    "Transition",
    "VersionMismatch",
    "World",
    "all_sensors",
    "build_igraph",
    "candidate_edges",
    "check_scope",
    "clip",
    "comes_before",
    "compute_progress_measure",
    "cone_relation",
    "count_singleton_sensors",
    "enumerate_singleton_sensors",
    "export_dot",
    "find_crossovers",
    "is_derived_from",
    "is_finite_on",
    "is_realizable",
    "is_receptive",
    "is_safe",
    "joint_language",
    "load",
    "operative_action_set",
    "operative_sensor",
    "oracle_all_subplans",
    "oracle_check",
    "permissive_sensor",
    "policy_plan",
    "product_graph",
    "representative_plan",
    "save",
    "solves",
    "to_partition",
    "trace_plan",
    "trace_world",
    "verify_progress_measure",
]

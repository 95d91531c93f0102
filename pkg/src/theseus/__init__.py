"""Inverse design of linear-optics experiment graphs.

A quantum state or gate is encoded as the conditioned output of a colored
weighted graph; the discovery loop optimizes complex edge weights against
a fidelity + L1 loss and prunes edges until only the conceptual core of a
setup remains.
"""

from .errors import (
    DegenerateStateError,
    GraphError,
    InvalidStateError,
    ParseError,
    SchemaError,
    SearchFailedError,
    UndefinedFidelityError,
)
from .graphs import (
    ColoredGraph,
    Edge,
    Matching,
    add_edge,
    complete_gate_graph,
    complete_graph,
    enumerate_perfect_matchings,
    remove_edge,
)
from .states import (
    AMPLITUDE_FLOOR,
    NUMBER_RESOLVING,
    THRESHOLD,
    ConditioningSpec,
    HeraldedState,
    count_rate,
    event_probability,
    expand_phi,
    heralded_state,
    leading_pairs,
    postselected,
    postselected_state,
    term_amplitude,
    transformation_outputs,
)
from .objective import (
    CompiledLoss,
    TargetGate,
    TargetState,
    bell_state,
    build_loss,
    cnot_gate,
    fidelity,
    gate_fidelity,
    ghz_state,
    loss,
    loss_gradient,
)
from .optimize import (
    MinimizeResult,
    OptimizerConfig,
    RestartResult,
    minimize,
    optimize_with_restarts,
    random_init,
)
from .discovery import (
    PrunePolicy,
    SchmidtRankVector,
    Solution,
    SrvResult,
    TraceRecord,
    candidate_srv_classes,
    ghz63_scaling_study,
    select_edge_to_prune,
    srv_benchmark,
    srv_of_state,
    srv_target,
    theseus,
)
from .dsl import format_target, parse_target
from .serialize import graph_to_dot, graph_to_json, json_to_graph
from . import catalog

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

"""Instance retrieval over SHI ontologies by rolling ABox assertions into
query-specific concepts and deciding membership with TBox subsumption."""

from .concepts import (
    BOTTOM,
    TOP,
    Atomic,
    Concept,
    ConceptMetrics,
    Nominal,
    Role,
    concept_metrics,
    conj,
    disj,
    inv,
    neg,
    nnf,
    only,
    some,
)
from .dlo import (
    ParseError,
    SourceLocation,
    parse_concept,
    parse_ontology,
    serialize_concept,
    serialize_ontology,
)
from .ontology import (
    ABox,
    Ontology,
    TBox,
    make_abox,
    make_ontology,
    role_closure,
    to_simple_form,
)
from .tableau import (
    Budget,
    Model,
    ResourceLimitExceeded,
    bounded_model_check,
    is_consistent,
    is_instance,
    is_satisfiable,
    is_subsumed,
    model_satisfies,
)
from .syncond import MatchedAxiom, TBoxAnalysis, analyze, syn_cond, syn_cond_star
from .rollup import (
    V1,
    V2,
    V3,
    AssertionGraph,
    RollBudgetExceeded,
    RollResult,
    build_graph,
    roll_up,
    transform_assertion,
)
from .query import (
    BASELINE,
    AnswerSet,
    PreparedQuery,
    UnknownNameError,
    check_instance_msc,
    consistency_gate,
    prepare_query,
    retrieve_instances,
)
from .benchgen import GenConfig, StatsReport, bench, generate, stats, suite_queries

__version__ = "0.1.0"

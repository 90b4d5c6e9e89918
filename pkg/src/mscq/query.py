"""Query pipeline: name the query, prepare the ontology, roll per individual,
answer instance checks and retrieval by subsumption, with a full-reasoning
baseline mode used as the correctness oracle."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .concepts import (
    Atomic,
    Concept,
    ConceptMetrics,
    Nominal,
    atoms_in,
    nominals_in,
    roles_in,
)
from .concepts import And, Exists, Forall, Not, Or
from .ontology import (
    RESERVED_PREFIX,
    Ontology,
    TBox,
    make_abox,
    make_ontology,
    to_simple_form,
)
from .rollup import V2, V3, AssertionGraph, build_graph, roll_up
from .syncond import TBoxAnalysis, analyze
from .tableau import (
    Budget,
    DEFAULT_BUDGET,
    ResourceLimitExceeded,
    is_instance,
    is_subsumed,
    is_consistent,
)

BASELINE = "baseline"
QUERY_NAME = f"{RESERVED_PREFIX}q0"
REP_PREFIX = f"{RESERVED_PREFIX}rep:"


class UnknownNameError(Exception):
    """Query mentions a name the ontology never declares."""


@dataclass(frozen=True)
class PreparedQuery:
    ontology: Ontology
    query: Concept
    rewritten_query: Concept
    query_name: str
    augmented_tbox: TBox
    base_tbox: TBox
    rep_assertions: tuple[tuple[Concept, str], ...]
    aux_names: tuple[str, ...]
    analysis: TBoxAnalysis
    rolling_ontology: Ontology
    baseline_ontology: Ontology


def _rewrite_nominals(c: Concept) -> Concept:
    if isinstance(c, Nominal):
        return Atomic(f"{REP_PREFIX}{c.individual}")
    if isinstance(c, Not):
        return Not(_rewrite_nominals(c.arg))
    if isinstance(c, And):
        from .concepts import conj

        return conj(_rewrite_nominals(a) for a in c.args)
    if isinstance(c, Or):
        from .concepts import disj

        return disj(_rewrite_nominals(a) for a in c.args)
    if isinstance(c, Exists):
        return Exists(c.role, _rewrite_nominals(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, _rewrite_nominals(c.filler))
    return c


def prepare_query(ontology: Ontology, q: Concept) -> PreparedQuery:
    """Assign the query a fresh name, reduce to simple form, recompute analysis."""
    for name in sorted(atoms_in(q)):
        if name.startswith(RESERVED_PREFIX):
            continue
        if name not in ontology.concept_names:
            raise UnknownNameError(f"unknown concept name {name!r} in query")
    for name in sorted(roles_in(q)):
        if name not in ontology.role_names:
            raise UnknownNameError(f"unknown role name {name!r} in query")
    for name in sorted(nominals_in(q)):
        if name not in ontology.individual_names:
            raise UnknownNameError(f"unknown individual {name!r} in query")

    rewritten = _rewrite_nominals(q)
    reps = tuple(
        (Atomic(f"{REP_PREFIX}{ind}"), ind) for ind in sorted(nominals_in(q))
    )
    base_tbox = to_simple_form(ontology.tbox)
    name = Atomic(QUERY_NAME)
    augmented = to_simple_form(
        TBox(
            gcis=base_tbox.gcis + ((name, rewritten), (rewritten, name)),
            role_inclusions=base_tbox.role_inclusions,
            transitive_roles=base_tbox.transitive_roles,
        )
    )
    before = {n for lhs, rhs in base_tbox.gcis for n in atoms_in(lhs) | atoms_in(rhs)}
    after = {n for lhs, rhs in augmented.gcis for n in atoms_in(lhs) | atoms_in(rhs)}
    aux = tuple(sorted(n for n in after - before if n.startswith(RESERVED_PREFIX)))
    abox = make_abox(
        ontology.abox.concept_assertions + reps,
        ontology.abox.role_assertions,
    )
    return PreparedQuery(
        ontology=ontology,
        query=q,
        rewritten_query=rewritten,
        query_name=QUERY_NAME,
        augmented_tbox=augmented,
        base_tbox=base_tbox,
        rep_assertions=reps,
        aux_names=aux,
        analysis=analyze(augmented),
        rolling_ontology=make_ontology(augmented, abox),
        baseline_ontology=make_ontology(base_tbox, abox),
    )


@dataclass(frozen=True)
class GateResult:
    consistent: bool


def consistency_gate(ontology: Ontology, budget: Budget = DEFAULT_BUDGET) -> GateResult:
    """One up-front consistency check; everything downstream assumes it passed."""
    simple = to_simple_form(ontology.tbox)
    return GateResult(
        consistent=is_consistent(make_ontology(simple, ontology.abox), budget)
    )


@dataclass(frozen=True)
class IndividualStats:
    metrics: Optional[ConceptMetrics]
    rolled: int
    roll_ms: float
    subsume_ms: float


@dataclass
class AnswerSet:
    query: PreparedQuery
    mode: str
    members: frozenset[str]
    per_individual_stats: dict[str, IndividualStats] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)
    inconsistent: bool = False
    total_ms: float = 0.0

    @property
    def avg_roll_ms(self) -> float:
        stats = self.per_individual_stats
        return sum(s.roll_ms for s in stats.values()) / len(stats) if stats else 0.0

    @property
    def avg_subsume_ms(self) -> float:
        stats = self.per_individual_stats
        return sum(s.subsume_ms for s in stats.values()) / len(stats) if stats else 0.0

    @property
    def total_rolled(self) -> int:
        return sum(s.rolled for s in self.per_individual_stats.values())


def check_instance_msc(
    pq: PreparedQuery,
    individual: str,
    mode: str,
    budget: Budget = DEFAULT_BUDGET,
    graph: Optional[AssertionGraph] = None,
) -> bool:
    """Instance check by rolling up and testing subsumption by the query name."""
    roll = roll_up(
        pq.rolling_ontology, pq.analysis, individual, mode, graph=graph
    )
    return is_subsumed(pq.augmented_tbox, roll.concept, Atomic(pq.query_name), budget)


def _check_one(
    pq: PreparedQuery,
    individual: str,
    mode: str,
    budget: Budget,
    graph: AssertionGraph,
) -> tuple[str, Optional[bool], IndividualStats | None, Optional[str]]:
    try:
        if mode == BASELINE:
            t0 = time.perf_counter()
            answer = is_instance(
                pq.baseline_ontology,
                pq.rewritten_query,
                individual,
                budget,
                assume_consistent=True,
            )
            elapsed = (time.perf_counter() - t0) * 1000.0
            stats = IndividualStats(None, 0, 0.0, elapsed)
            return individual, answer, stats, None
        t0 = time.perf_counter()
        roll = roll_up(pq.rolling_ontology, pq.analysis, individual, mode, graph=graph)
        t1 = time.perf_counter()
        answer = is_subsumed(
            pq.augmented_tbox, roll.concept, Atomic(pq.query_name), budget
        )
        t2 = time.perf_counter()
        stats = IndividualStats(
            roll.metrics,
            len(roll.rolled_assertions),
            (t1 - t0) * 1000.0,
            (t2 - t1) * 1000.0,
        )
        return individual, answer, stats, None
    except ResourceLimitExceeded as exc:
        return individual, None, None, str(exc)


def retrieve_instances(
    ontology: Ontology,
    pq: PreparedQuery,
    mode: str,
    workers: int = 1,
    budget: Budget = DEFAULT_BUDGET,
) -> AnswerSet:
    """All individuals entailed to belong to the prepared query, by any mode.

    An inconsistent ontology short-circuits: every instance check is
    vacuously true, so the answer set is flagged and contains everyone.
    """
    if mode not in (BASELINE, V2, V3):
        raise ValueError(f"unknown retrieval mode {mode!r}")
    start = time.perf_counter()
    individuals = sorted(ontology.abox.individuals)
    gate = consistency_gate(ontology, budget)
    if not gate.consistent:
        return AnswerSet(
            query=pq,
            mode=mode,
            members=frozenset(individuals),
            inconsistent=True,
            total_ms=(time.perf_counter() - start) * 1000.0,
        )
    graph = build_graph(pq.rolling_ontology.abox)
    answer = AnswerSet(query=pq, mode=mode, members=frozenset())
    members: set[str] = set()

    def work(ind: str):
        return _check_one(pq, ind, mode, budget, graph)

    if workers <= 1:
        results = [work(ind) for ind in individuals]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, individuals))
    for ind, verdict, stats, error in results:
        if error is not None:
            answer.errors[ind] = error
        else:
            if verdict:
                members.add(ind)
            answer.per_individual_stats[ind] = stats
    answer.members = frozenset(members)
    answer.total_ms = (time.perf_counter() - start) * 1000.0
    return answer

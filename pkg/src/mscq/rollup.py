"""Rolling-up of ABox assertions into a single concept for one individual.

The assertion graph is traversed depth-first in a canonical order (concept
assertions first, then edges by role name, outgoing before incoming, then
neighbor, then assertion id). Every assertion is consumed at most once per
invocation. Re-entering an individual on the current path cuts the cycle
there: the re-entering branch ends in that individual's nominal and the
individual's own conjunction gains it as well. The three modes differ only
in which edges they follow: all of them, those passing the static trigger
test, or those also passing the assertion-level refinement.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

from .concepts import (
    Concept,
    ConceptMetrics,
    Nominal,
    Role,
    concept_metrics,
    conj,
    inv,
    some,
)
from .ontology import ABox, Ontology
from .syncond import TOWARD_X, TOWARD_Y, TBoxAnalysis, syn_cond, syn_cond_star

V1 = "v1"
V2 = "v2"
V3 = "v3"
MODES = (V1, V2, V3)


class RollBudgetExceeded(Exception):
    """Raised when more edges than the configured cap would be rolled."""


@dataclass(frozen=True)
class GraphEdge:
    id: int
    role: str
    subject: str
    object: str


class AssertionGraph:
    """Undirected view of the role assertions, one edge per assertion.

    Assertion ids: concept assertions take 0..n-1 in ABox order, role
    assertions continue from n.
    """

    def __init__(self, abox: ABox):
        self.abox = abox
        self.concept_base = 0
        self.edge_base = len(abox.concept_assertions)
        self.concepts: dict[str, list[tuple[int, Concept]]] = {}
        for idx, (c, ind) in enumerate(abox.concept_assertions):
            self.concepts.setdefault(ind, []).append((idx, c))
        for entries in self.concepts.values():
            entries.sort(key=lambda e: (e[1].key, e[0]))
        self.edges: list[GraphEdge] = [
            GraphEdge(self.edge_base + i, r, a, b)
            for i, (r, a, b) in enumerate(abox.role_assertions)
        ]
        self.adjacency: dict[str, list[tuple[GraphEdge, bool]]] = {}
        for edge in self.edges:
            self.adjacency.setdefault(edge.subject, []).append((edge, True))
            if edge.object != edge.subject:
                self.adjacency.setdefault(edge.object, []).append((edge, False))
            else:
                self.adjacency[edge.subject].append((edge, False))
        for node, entries in self.adjacency.items():
            entries.sort(
                key=lambda e: (
                    e[0].role,
                    0 if e[1] else 1,
                    e[0].object if e[1] else e[0].subject,
                    e[0].id,
                )
            )
        self.nodes = frozenset(abox.individuals)

    def concept_entries(self, individual: str) -> list[tuple[int, Concept]]:
        return self.concepts.get(individual, [])

    def adjacent(self, individual: str) -> list[tuple[GraphEdge, bool]]:
        return self.adjacency.get(individual, [])


def build_graph(abox: ABox) -> AssertionGraph:
    return AssertionGraph(abox)


@dataclass
class RollContext:
    mode: str
    visited_edges: set[int] = field(default_factory=set)
    visit_stack: list[str] = field(default_factory=list)
    joint_marks: set[str] = field(default_factory=set)
    rolled: set[int] = field(default_factory=set)
    max_rolled: Optional[int] = None

    def on_stack(self, individual: str) -> bool:
        return individual in self._stack_set

    def __post_init__(self):
        self._stack_set: set[str] = set(self.visit_stack)

    def push(self, individual: str) -> None:
        self.visit_stack.append(individual)
        self._stack_set.add(individual)

    def pop(self) -> None:
        self._stack_set.discard(self.visit_stack.pop())


@dataclass(frozen=True)
class RollResult:
    concept: Concept
    rolled_assertions: frozenset[int]
    metrics: ConceptMetrics
    joint_nodes: frozenset[str]


def transform_assertion(
    assertion: tuple,
    ctx: RollContext,
    filler: Optional[Concept] = None,
) -> Concept:
    """Single-assertion transformation table, relative to the context's
    current individual (top of the visit stack).

    ``assertion`` is ``("concept", C, x)`` or ``("role", R, subject, object)``.
    """
    x = ctx.visit_stack[-1]
    if x in ctx.visit_stack[:-1]:
        # Cycle tail: everything at the re-entered individual collapses to it.
        return Nominal(x)
    if assertion[0] == "concept":
        return assertion[1]
    _, role_name, subject, obj = assertion
    rho = Role(role_name) if subject == x else Role(role_name, True)
    base = some(rho, filler if filler is not None else Nominal(obj if subject == x else subject))
    if x in ctx.joint_marks:
        return conj((Nominal(x), base))
    return base


def roll_up(
    ontology: Ontology,
    analysis: Optional[TBoxAnalysis],
    individual: str,
    mode: str,
    graph: Optional[AssertionGraph] = None,
    subsume: Optional[Callable[[Concept, Concept], bool]] = None,
    max_rolled: Optional[int] = None,
) -> RollResult:
    """Compute the rolled-up concept for one individual under the given mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode != V1 and analysis is None:
        raise ValueError(f"mode {mode} needs a TBox analysis")
    if graph is None:
        graph = build_graph(ontology.abox)
    if mode == V3 and subsume is None:
        subsume = analysis.subsumes
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)
    ctx = RollContext(mode=mode, max_rolled=max_rolled)

    def visit(u: str) -> Concept:
        if ctx.on_stack(u):
            ctx.joint_marks.add(u)
            return Nominal(u)
        ctx.push(u)
        conjuncts: list[Concept] = []
        for cid, c in graph.concept_entries(u):
            if cid in ctx.rolled:
                continue
            ctx.rolled.add(cid)
            conjuncts.append(c)
        for edge, as_subject in graph.adjacent(u):
            if edge.id in ctx.visited_edges:
                continue
            rho = Role(edge.role) if as_subject else Role(edge.role, True)
            if mode != V1 and not syn_cond(analysis, rho):
                continue
            if mode == V3 and not syn_cond_star(
                analysis,
                ontology,
                (edge.role, edge.subject, edge.object),
                TOWARD_X if as_subject else TOWARD_Y,
                subsume,
            ):
                continue
            if (
                ctx.max_rolled is not None
                and len(ctx.visited_edges) >= ctx.max_rolled
            ):
                raise RollBudgetExceeded(
                    f"roll budget {ctx.max_rolled} exceeded at {u!r}"
                )
            ctx.visited_edges.add(edge.id)
            ctx.rolled.add(edge.id)
            neighbor = edge.object if as_subject else edge.subject
            filler = visit(neighbor)
            conjuncts.append(some(rho, filler))
        ctx.pop()
        if u in ctx.joint_marks:
            conjuncts.append(Nominal(u))
        return conj(conjuncts)

    concept = visit(individual)
    return RollResult(
        concept=concept,
        rolled_assertions=frozenset(ctx.rolled),
        metrics=concept_metrics(concept),
        joint_nodes=frozenset(ctx.joint_marks),
    )

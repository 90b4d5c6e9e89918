"""Static TBox analysis deciding which directed roles can influence
classification at all (trigger roles), and the per-assertion refinement that
also consults explicit ABox facts before an edge is rolled.

A directed role triggers when some axiom, read through the standard
equivalences, has an existential over a super-role on the left-hand side of
an implication. Existentials on the left are detected on the NNF of the
left-hand side; universals written on the right-hand side are kept in both
directions, which over-approximates the canonical reading but never prunes
an edge that could matter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .concepts import (
    TOP,
    And,
    Concept,
    Exists,
    Forall,
    Or,
    Role,
    conj,
    disj,
    inv,
    neg,
    nnf,
    walk,
)
from .ontology import Ontology, RoleClosure, TBox, role_closure
from . import tableau

MEET = "meet"
JOIN = "join"


@dataclass(frozen=True)
class MatchedAxiom:
    """An axiom recognizable as `exists R'.C1 <meet|join> C2 subsumed-by C3`."""

    role: Role
    c1: Concept
    connective: str
    c2: Concept
    c3: Concept

    def sort_key(self):
        return (self.role.key, self.c1.key, self.connective, self.c2.key, self.c3.key)


@dataclass
class TBoxAnalysis:
    tbox: TBox
    closure: RoleClosure
    trigger_roots: frozenset[Role]
    trigger_roles: frozenset[Role]
    matched: dict[Role, tuple[MatchedAxiom, ...]]
    subsumption_cache: dict = field(default_factory=dict)

    def subsumes(self, sub: Concept, sup: Concept, budget=tableau.DEFAULT_BUDGET) -> bool:
        key = (sub.key, sup.key)
        hit = self.subsumption_cache.get(key)
        if hit is None:
            hit = tableau.is_subsumed(self.tbox, sub, sup, budget)
            self.subsumption_cache[key] = hit
        return hit


def _lhs_patterns(lhs_nnf: Concept, rhs: Concept) -> list[MatchedAxiom]:
    patterns: list[MatchedAxiom] = []
    if isinstance(lhs_nnf, Exists):
        patterns.append(MatchedAxiom(lhs_nnf.role, lhs_nnf.filler, MEET, TOP, rhs))
    elif isinstance(lhs_nnf, And):
        for part in lhs_nnf.args:
            if isinstance(part, Exists):
                siblings = conj(p for p in lhs_nnf.args if p is not part)
                patterns.append(
                    MatchedAxiom(part.role, part.filler, MEET, siblings, rhs)
                )
    elif isinstance(lhs_nnf, Or):
        for part in lhs_nnf.args:
            if isinstance(part, Exists):
                rest = disj(p for p in lhs_nnf.args if p is not part)
                patterns.append(
                    MatchedAxiom(part.role, part.filler, JOIN, rest, rhs)
                )
    # Any remaining existential occurrence (nested under the shapes above)
    # still marks its role; top and sibling context default to the weakest.
    covered = {(p.role.key, p.c1.key) for p in patterns}
    for sub in walk(lhs_nnf):
        if isinstance(sub, Exists) and (sub.role.key, sub.filler.key) not in covered:
            patterns.append(MatchedAxiom(sub.role, sub.filler, MEET, TOP, rhs))
    return patterns


def _rhs_universal_patterns(lhs: Concept, rhs_nnf: Concept) -> list[MatchedAxiom]:
    lhs_n = nnf(lhs)
    patterns: list[MatchedAxiom] = []

    def context_for(f: Forall) -> Concept:
        if isinstance(rhs_nnf, Or) and f in rhs_nnf.args:
            rest = disj(p for p in rhs_nnf.args if p is not f)
            return conj((lhs_n, nnf(neg(rest))))
        return lhs_n

    for sub in walk(rhs_nnf):
        if isinstance(sub, Forall):
            ctx = context_for(sub)
            # Canonical reading: X subsumed-by all S.Y  ==  exists Inv(S).X subsumed-by Y.
            patterns.append(MatchedAxiom(inv(sub.role), ctx, MEET, TOP, sub.filler))
            # Contrapositive direction, kept so pruning stays conservative.
            patterns.append(
                MatchedAxiom(sub.role, nnf(neg(sub.filler)), MEET, TOP, nnf(neg(ctx)))
            )
    return patterns


def analyze(tbox: TBox) -> TBoxAnalysis:
    """Scan the TBox (in simple form) for trigger roles and matched axioms."""
    closure = role_closure(tbox)
    matched: dict[Role, list[MatchedAxiom]] = {}

    def record(p: MatchedAxiom) -> None:
        matched.setdefault(p.role, []).append(p)

    for lhs, rhs in tbox.gcis:
        for p in _lhs_patterns(nnf(lhs), rhs):
            record(p)
        for p in _rhs_universal_patterns(lhs, nnf(rhs)):
            record(p)

    roots = frozenset(matched)
    universe: set[Role] = set(roots)
    for r, _ in tbox.role_inclusions:
        universe.update((r, inv(r)))
    for _, r in tbox.role_inclusions:
        universe.update((r, inv(r)))
    for name in tbox.transitive_roles:
        universe.update((Role(name), Role(name, True)))
    for concept in tbox.concepts():
        for sub in walk(concept):
            if isinstance(sub, (Exists, Forall)):
                universe.update((sub.role, inv(sub.role)))
    trigger_roles = frozenset(
        r for r in universe if any(s in roots for s in closure.supers(r))
    )
    matched_final = {
        role: tuple(sorted(set(ps), key=MatchedAxiom.sort_key))
        for role, ps in matched.items()
    }
    return TBoxAnalysis(
        tbox=tbox,
        closure=closure,
        trigger_roots=roots,
        trigger_roles=trigger_roles,
        matched=matched_final,
    )


def syn_cond(analysis: TBoxAnalysis, r: Role) -> bool:
    """Can rolling an assertion in direction r possibly matter to classification?"""
    return any(s in analysis.trigger_roots for s in analysis.closure.supers(r))


def matched_for(analysis: TBoxAnalysis, r: Role) -> tuple[MatchedAxiom, ...]:
    out: list[MatchedAxiom] = []
    for s in sorted(analysis.closure.supers(r)):
        out.extend(analysis.matched.get(s, ()))
    return tuple(sorted(set(out), key=MatchedAxiom.sort_key))


TOWARD_X = "toward-x"
TOWARD_Y = "toward-y"


def explicit_concepts(ontology: Ontology, individual: str) -> tuple[Concept, ...]:
    return tuple(
        c for c, ind in ontology.abox.concept_assertions if ind == individual
    )


def syn_cond_star(
    analysis: TBoxAnalysis,
    ontology: Ontology,
    assertion: tuple[str, str, str],
    direction: str,
    subsume: Optional[Callable[[Concept, Concept], bool]] = None,
) -> bool:
    """Refined relevance test for one role assertion and one roll direction.

    Requires a consistent ABox (the query pipeline gates on that). An axiom is
    discounted when the neighbor's explicit types contradict the existential
    filler (case 1) or the rolled individual's explicit types contradict the
    axiom's conclusion (case 2); the assertion survives if any matched axiom
    survives both cases.
    """
    if subsume is None:
        subsume = analysis.subsumes
    role_name, x, y = assertion
    if direction == TOWARD_X:
        rho, rolled, neighbor = Role(role_name), x, y
    else:
        rho, rolled, neighbor = Role(role_name, True), y, x
    if not syn_cond(analysis, rho):
        return False
    rolled_types = explicit_concepts(ontology, rolled)
    neighbor_types = explicit_concepts(ontology, neighbor)
    for ax in matched_for(analysis, rho):
        not_c1 = nnf(neg(ax.c1))
        if any(subsume(b0, not_c1) for b0 in neighbor_types):
            continue
        if ax.connective == MEET:
            blocked_conclusion = nnf(neg(Or((ax.c3, neg(ax.c2)))))
        else:
            blocked_conclusion = nnf(neg(ax.c3))
        if any(subsume(a0, blocked_conclusion) for a0 in rolled_types):
            continue
        return True
    return False

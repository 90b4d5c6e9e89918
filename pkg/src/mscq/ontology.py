"""Ontology containers (TBox, ABox), the role hierarchy closure, and the
simple-form reduction that keeps every axiom side below quantifier depth 2."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .concepts import (
    Atomic,
    Concept,
    Role,
    atoms_in,
    inv,
    nnf,
    quantification_depth,
    roles_in,
    walk,
)
from .concepts import And, Exists, Forall, Nominal, Not, Or

RESERVED_PREFIX = "_:"
_SF_NAME = re.compile(r"^_:sf(\d+)$")


@dataclass(frozen=True)
class TBox:
    """GCIs plus role inclusion and transitivity axioms. Equivalences arrive pre-split."""

    gcis: tuple[tuple[Concept, Concept], ...] = ()
    role_inclusions: tuple[tuple[Role, Role], ...] = ()
    transitive_roles: frozenset[str] = frozenset()

    def is_transitive(self, r: Role) -> bool:
        return r.base in self.transitive_roles

    def concepts(self) -> Iterable[Concept]:
        for lhs, rhs in self.gcis:
            yield lhs
            yield rhs


@dataclass(frozen=True)
class ABox:
    """Assertional facts. Role assertions always use named (non-inverted) roles."""

    concept_assertions: tuple[tuple[Concept, str], ...] = ()
    role_assertions: tuple[tuple[str, str, str], ...] = ()
    individuals: frozenset[str] = frozenset()


def make_abox(
    concept_assertions: Iterable[tuple[Concept, str]] = (),
    role_assertions: Iterable[tuple[str, str, str]] = (),
    extra_individuals: Iterable[str] = (),
) -> ABox:
    """Build an ABox, deriving the individual set from the assertions."""
    cas = tuple(concept_assertions)
    ras = tuple(role_assertions)
    individuals = set(extra_individuals)
    for _, ind in cas:
        individuals.add(ind)
    for _, a, b in ras:
        individuals.add(a)
        individuals.add(b)
    return ABox(cas, ras, frozenset(individuals))


@dataclass(frozen=True)
class Ontology:
    """A TBox/ABox pair plus the signature tables populated at load time."""

    tbox: TBox = TBox()
    abox: ABox = ABox()
    concept_names: frozenset[str] = frozenset()
    role_names: frozenset[str] = frozenset()
    individual_names: frozenset[str] = frozenset()


def make_ontology(tbox: TBox = TBox(), abox: ABox = ABox()) -> Ontology:
    """Assemble an ontology, interning every name referenced by axioms or assertions."""
    concept_names: set[str] = set()
    role_names: set[str] = set()
    individual_names: set[str] = set(abox.individuals)
    for c in tbox.concepts():
        concept_names |= atoms_in(c)
        role_names |= roles_in(c)
        for sub in walk(c):
            if isinstance(sub, Nominal):
                individual_names.add(sub.individual)
    for sub_r, sup_r in tbox.role_inclusions:
        role_names.add(sub_r.base)
        role_names.add(sup_r.base)
    role_names |= tbox.transitive_roles
    for c, _ in abox.concept_assertions:
        concept_names |= atoms_in(c)
        role_names |= roles_in(c)
        for sub in walk(c):
            if isinstance(sub, Nominal):
                individual_names.add(sub.individual)
    for r, _, _ in abox.role_assertions:
        role_names.add(r)
    return Ontology(
        tbox=tbox,
        abox=abox,
        concept_names=frozenset(concept_names),
        role_names=frozenset(role_names),
        individual_names=frozenset(individual_names),
    )


class RoleClosure:
    """Reflexive-transitive sub-role relation over directed roles, closed under inversion."""

    def __init__(self, tbox: TBox):
        pairs: set[tuple[Role, Role]] = set()
        universe: set[Role] = set()
        for name in tbox.transitive_roles:
            universe.add(Role(name))
            universe.add(Role(name, True))
        for sub_r, sup_r in tbox.role_inclusions:
            pairs.add((sub_r, sup_r))
            pairs.add((inv(sub_r), inv(sup_r)))
            universe.update((sub_r, sup_r, inv(sub_r), inv(sup_r)))
        supers: dict[Role, set[Role]] = {r: {r} for r in universe}
        changed = True
        while changed:
            changed = False
            for sub_r, sup_r in pairs:
                target = supers[sub_r]
                before = len(target)
                target.add(sup_r)
                target |= supers[sup_r]
                if len(target) != before:
                    changed = True
        self._supers: dict[Role, frozenset[Role]] = {
            r: frozenset(s) for r, s in supers.items()
        }
        self.transitive_names = tbox.transitive_roles

    def supers(self, r: Role) -> frozenset[Role]:
        """All directed roles s with r subsumed by s (always includes r)."""
        return self._supers.get(r, frozenset((r,)))

    def is_sub(self, r: Role, s: Role) -> bool:
        return r == s or s in self.supers(r)

    def is_transitive(self, r: Role) -> bool:
        return r.base in self.transitive_names

    def transitive_subroles(self, s: Role) -> list[Role]:
        """Transitive directed roles below s, for the transitivity propagation rule."""
        out = [r for r in self._supers if self.is_transitive(r) and self.is_sub(r, s)]
        if self.is_transitive(s) and s not in out:
            out.append(s)
        return sorted(set(out))


def role_closure(tbox: TBox) -> RoleClosure:
    return RoleClosure(tbox)


def _next_fresh_index(tbox: TBox) -> int:
    highest = -1
    for c in tbox.concepts():
        for name in atoms_in(c):
            m = _SF_NAME.match(name)
            if m:
                highest = max(highest, int(m.group(1)))
    return highest + 1


class _SimpleFormRewriter:
    def __init__(self, start_index: int):
        self.index = start_index
        self.defined: dict[str, Atomic] = {}
        self.new_gcis: list[tuple[Concept, Concept]] = []

    def name_for(self, filler: Concept) -> Atomic:
        existing = self.defined.get(filler.key)
        if existing is not None:
            return existing
        fresh = Atomic(f"{RESERVED_PREFIX}sf{self.index}")
        self.index += 1
        self.defined[filler.key] = fresh
        # Definitional equivalence, stored as two GCIs.
        self.new_gcis.append((fresh, filler))
        self.new_gcis.append((filler, fresh))
        return fresh

    def reduce(self, c: Concept) -> Concept:
        if isinstance(c, (Atomic, Nominal)) or c.key in ("Top", "Bottom"):
            return c
        if isinstance(c, Not):
            return Not(self.reduce(c.arg))
        if isinstance(c, And):
            from .concepts import conj

            return conj(self.reduce(a) for a in c.args)
        if isinstance(c, Or):
            from .concepts import disj

            return disj(self.reduce(a) for a in c.args)
        assert isinstance(c, (Exists, Forall))
        filler = self.reduce(c.filler)
        if quantification_depth(filler) >= 1:
            filler = self.name_for(filler)
        return type(c)(c.role, filler)


def to_simple_form(tbox: TBox) -> TBox:
    """Rewrite so every concept in the TBox has quantifier depth below 2.

    Deep quantifier fillers get fresh definitional names with the reserved
    prefix; the result is a conservative extension of the input.
    """
    rewriter = _SimpleFormRewriter(_next_fresh_index(tbox))
    gcis: list[tuple[Concept, Concept]] = []
    for lhs, rhs in tbox.gcis:
        gcis.append((rewriter.reduce(lhs), rewriter.reduce(rhs)))
    pending = rewriter.new_gcis
    while pending:
        rewriter.new_gcis = []
        for lhs, rhs in pending:
            gcis.append((rewriter.reduce(lhs), rewriter.reduce(rhs)))
        pending = rewriter.new_gcis
    return TBox(
        gcis=tuple(gcis),
        role_inclusions=tbox.role_inclusions,
        transitive_roles=tbox.transitive_roles,
    )


def internalized_clauses(tbox: TBox) -> tuple[Concept, ...]:
    """One NNF clause per GCI: the disjunction holding at every domain element."""
    from .concepts import disj, neg

    clauses = []
    for lhs, rhs in tbox.gcis:
        clause = nnf(disj((neg(lhs), rhs)))
        clauses.append(clause)
    clauses = sorted(set(clauses), key=lambda c: c.key)
    return tuple(c for c in clauses if c.key != "Top")

"""Core term language: directed roles, concepts, canonical construction, NNF, size metrics.

Concepts are immutable and carry their canonical serialization in ``key``.
Structural equality, hashing, and ordering all go through that string, so
two concepts are equal exactly when they serialize identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class Role:
    """A directed role: a named role or its inverse (never doubly inverted)."""

    __slots__ = ("base", "inverted", "key", "_hash")

    def __init__(self, base: str, inverted: bool = False):
        self.base = base
        self.inverted = inverted
        self.key = f"ObjectInverseOf({base})" if inverted else base
        self._hash = hash(self.key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Role) and self.key == other.key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Role") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return self.key


def inv(r: Role) -> Role:
    """Inverse of a directed role; involutive by construction."""
    return Role(r.base, not r.inverted)


class Concept:
    """Base class for concept terms. ``key`` is the canonical text form."""

    __slots__ = ("key", "_hash")

    def __init__(self, key: str):
        self.key = key
        self._hash = hash(key)

    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, Concept) and self.key == other.key)

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Concept") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return self.key


class Atomic(Concept):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


class Nominal(Concept):
    __slots__ = ("individual",)

    def __init__(self, individual: str):
        super().__init__(f"ObjectOneOf({individual})")
        self.individual = individual


class Top(Concept):
    __slots__ = ()

    def __init__(self):
        super().__init__("Top")


class Bottom(Concept):
    __slots__ = ()

    def __init__(self):
        super().__init__("Bottom")


class Not(Concept):
    __slots__ = ("arg",)

    def __init__(self, arg: Concept):
        super().__init__(f"ObjectComplementOf({arg.key})")
        self.arg = arg


class And(Concept):
    __slots__ = ("args",)

    def __init__(self, args: tuple):
        super().__init__(f"ObjectIntersectionOf({' '.join(a.key for a in args)})")
        self.args = args


class Or(Concept):
    __slots__ = ("args",)

    def __init__(self, args: tuple):
        super().__init__(f"ObjectUnionOf({' '.join(a.key for a in args)})")
        self.args = args


class Exists(Concept):
    __slots__ = ("role", "filler")

    def __init__(self, role: Role, filler: Concept):
        super().__init__(f"ObjectSomeValuesFrom({role.key} {filler.key})")
        self.role = role
        self.filler = filler


class Forall(Concept):
    __slots__ = ("role", "filler")

    def __init__(self, role: Role, filler: Concept):
        super().__init__(f"ObjectAllValuesFrom({role.key} {filler.key})")
        self.role = role
        self.filler = filler


TOP = Top()
BOTTOM = Bottom()


def atom(name: str) -> Atomic:
    return Atomic(name)


def nominal(individual: str) -> Nominal:
    return Nominal(individual)


def neg(c: Concept) -> Concept:
    """Complement with the obvious unit simplifications (involution, top/bottom)."""
    if isinstance(c, Not):
        return c.arg
    if isinstance(c, Top):
        return BOTTOM
    if isinstance(c, Bottom):
        return TOP
    return Not(c)


def conj(items: Iterable[Concept]) -> Concept:
    """Canonical conjunction: flattened, deduplicated, sorted; absorbs Top/Bottom."""
    seen: dict[str, Concept] = {}
    for item in items:
        if isinstance(item, And):
            for a in item.args:
                seen[a.key] = a
        elif isinstance(item, Bottom):
            return BOTTOM
        elif isinstance(item, Top):
            continue
        else:
            seen[item.key] = item
    if BOTTOM.key in seen:
        return BOTTOM
    seen.pop(TOP.key, None)
    if not seen:
        return TOP
    if len(seen) == 1:
        return next(iter(seen.values()))
    return And(tuple(seen[k] for k in sorted(seen)))


def disj(items: Iterable[Concept]) -> Concept:
    """Canonical disjunction, dual to :func:`conj`."""
    seen: dict[str, Concept] = {}
    for item in items:
        if isinstance(item, Or):
            for a in item.args:
                seen[a.key] = a
        elif isinstance(item, Top):
            return TOP
        elif isinstance(item, Bottom):
            continue
        else:
            seen[item.key] = item
    if TOP.key in seen:
        return TOP
    seen.pop(BOTTOM.key, None)
    if not seen:
        return BOTTOM
    if len(seen) == 1:
        return next(iter(seen.values()))
    return Or(tuple(seen[k] for k in sorted(seen)))


def some(role: Role, filler: Concept) -> Exists:
    return Exists(role, filler)


def only(role: Role, filler: Concept) -> Forall:
    return Forall(role, filler)


def nnf(c: Concept) -> Concept:
    """Negation normal form: negation pushed onto atomic concepts and nominals."""
    if isinstance(c, (Atomic, Nominal, Top, Bottom)):
        return c
    if isinstance(c, And):
        return conj(nnf(a) for a in c.args)
    if isinstance(c, Or):
        return disj(nnf(a) for a in c.args)
    if isinstance(c, Exists):
        return Exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, nnf(c.filler))
    assert isinstance(c, Not)
    a = c.arg
    if isinstance(a, (Atomic, Nominal)):
        return c
    if isinstance(a, Top):
        return BOTTOM
    if isinstance(a, Bottom):
        return TOP
    if isinstance(a, Not):
        return nnf(a.arg)
    if isinstance(a, And):
        return disj(nnf(neg(x)) for x in a.args)
    if isinstance(a, Or):
        return conj(nnf(neg(x)) for x in a.args)
    if isinstance(a, Exists):
        return Forall(a.role, nnf(neg(a.filler)))
    assert isinstance(a, Forall)
    return Exists(a.role, nnf(neg(a.filler)))


@dataclass(frozen=True)
class ConceptMetrics:
    """Size measures of a concept: quantifier nesting, top-level conjuncts, existentials."""

    quantification_depth: int
    conjunct_count: int
    existential_count: int


def quantification_depth(c: Concept) -> int:
    """Maximum nesting level of quantifiers; 0 for quantifier-free concepts."""
    # Iterative: depth values propagate bottom-up over an explicit stack.
    best = 0
    stack: list[tuple[Concept, int]] = [(c, 0)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, (Exists, Forall)):
            depth += 1
            if depth > best:
                best = depth
            stack.append((node.filler, depth))
        elif isinstance(node, (And, Or)):
            for a in node.args:
                stack.append((a, depth))
        elif isinstance(node, Not):
            stack.append((node.arg, depth))
    return best


def existential_count(c: Concept) -> int:
    total = 0
    stack = [c]
    while stack:
        node = stack.pop()
        if isinstance(node, Exists):
            total += 1
            stack.append(node.filler)
        elif isinstance(node, Forall):
            stack.append(node.filler)
        elif isinstance(node, (And, Or)):
            stack.extend(node.args)
        elif isinstance(node, Not):
            stack.append(node.arg)
    return total


def conjunct_count(c: Concept) -> int:
    return len(c.args) if isinstance(c, And) else 1


def concept_metrics(c: Concept) -> ConceptMetrics:
    return ConceptMetrics(
        quantification_depth=quantification_depth(c),
        conjunct_count=conjunct_count(c),
        existential_count=existential_count(c),
    )


def walk(c: Concept) -> Iterator[Concept]:
    """All subconcepts, depth-first, each occurrence once."""
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (And, Or)):
            stack.extend(node.args)
        elif isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, (Exists, Forall)):
            stack.append(node.filler)


def atoms_in(c: Concept) -> set[str]:
    return {n.name for n in walk(c) if isinstance(n, Atomic)}


def nominals_in(c: Concept) -> set[str]:
    return {n.individual for n in walk(c) if isinstance(n, Nominal)}


def roles_in(c: Concept) -> set[str]:
    return {n.role.base for n in walk(c) if isinstance(n, (Exists, Forall))}

"""Tableau engine for satisfiability, subsumption, consistency, and instance
checking, plus an independent bounded-model enumerator used as a test oracle.

The completion graph is expanded by a deterministic worklist: items carry a
rule priority (nominal merge, conjunction, value restrictions, disjunction,
existential generation, in that order), the owning node id, and a global
sequence number, so identical inputs replay identical traces. Disjunctions
backtrack chronologically over a trail of undoable operations; axioms are
internalized as one clause per GCI and asserted at every node. Blockable
nodes stop generating successors under pairwise anywhere blocking; root and
nominal-carrying nodes never block and are never blocked.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from heapq import heappop, heappush
from itertools import product
from typing import Iterable, Optional

from .concepts import (
    BOTTOM,
    TOP,
    And,
    Atomic,
    Bottom,
    Concept,
    Exists,
    Forall,
    Nominal,
    Not,
    Or,
    Role,
    Top,
    conj,
    inv,
    neg,
    nnf,
)
from .ontology import ABox, Ontology, RoleClosure, TBox, internalized_clauses, role_closure


class ResourceLimitExceeded(Exception):
    """Raised when the node or wall-clock budget runs out; distinct from unsat."""


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 100_000
    timeout_ms: Optional[int] = None


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class TableauResult:
    satisfiable: bool
    created_nodes: int
    live_nodes: int


# Rule priorities; lower runs first. Clash detection is eager, inside label adds.
# Disjunctions are visited early so unit consequences fire with the other
# deterministic rules, but actual branching is deferred to the lowest
# priority: choice points only come into being once nothing forced is left.
_P_NOMINAL = 0
_P_AND = 1
_P_FORALL = 2
_P_OR = 4
_P_EXISTS = 5
_P_BRANCH = 6

_ROOT = 0
_BLOCKABLE = 1


class _Node:
    __slots__ = (
        "id",
        "kind",
        "alive",
        "label",
        "order",
        "foralls",
        "out",
        "inn",
        "parent",
        "nominal_tags",
        "has_nominal",
    )

    def __init__(self, node_id: int, kind: int, parent: Optional[int]):
        self.id = node_id
        self.kind = kind
        self.alive = True
        self.label: set[Concept] = set()
        self.order: list[Concept] = []
        self.foralls: list[Forall] = []
        self.out: dict[int, set[Role]] = {}
        self.inn: dict[int, set[Role]] = {}
        self.parent = parent
        self.nominal_tags: list[str] = []
        self.has_nominal = False


class _CompiledTBox:
    def __init__(self, tbox: TBox):
        self.clauses = internalized_clauses(tbox)
        self.closure = role_closure(tbox)


@lru_cache(maxsize=64)
def _compile(tbox: TBox) -> _CompiledTBox:
    return _CompiledTBox(tbox)


def _branch_key(c: Concept) -> tuple[int, str]:
    # Least-commitment order: negated literals, then value restrictions, then the rest.
    if isinstance(c, Not):
        return (0, c.key)
    if isinstance(c, Forall):
        return (1, c.key)
    return (2, c.key)


class _Choice:
    __slots__ = ("mark", "node_id", "alternatives")

    def __init__(self, mark: int, node_id: int, alternatives: list[Concept]):
        self.mark = mark
        self.node_id = node_id
        self.alternatives = alternatives


class _Engine:
    def __init__(self, compiled: _CompiledTBox, budget: Budget):
        self.compiled = compiled
        self.closure = compiled.closure
        self.budget = budget
        self.deadline = (
            time.monotonic() + budget.timeout_ms / 1000.0
            if budget.timeout_ms is not None
            else None
        )
        self.nodes: list[_Node] = []
        self.heap: list[tuple[int, int, int, Concept]] = []
        self.seq = 0
        self.trail: list[tuple] = []
        self.choices: list[_Choice] = []
        self.nominal_owner: dict[str, int] = {}
        self.parked: list[tuple[int, Concept]] = []
        self.clash = False
        self.created = 0
        self.steps = 0

    # -- construction ------------------------------------------------------

    def new_node(self, kind: int, parent: Optional[int] = None) -> _Node:
        if self.created >= self.budget.max_nodes:
            raise ResourceLimitExceeded(f"node budget {self.budget.max_nodes} exceeded")
        node = _Node(len(self.nodes), kind, parent)
        self.nodes.append(node)
        self.created += 1
        self.trail.append(("N",))
        for clause in self.compiled.clauses:
            self.add(node, clause)
        return node

    def add(self, node: _Node, c: Concept) -> None:
        if not node.alive or c in node.label:
            return
        node.label.add(c)
        node.order.append(c)
        self.trail.append(("L", node.id, c))
        if isinstance(c, Bottom):
            self.clash = True
            return
        if isinstance(c, (Atomic, Nominal)):
            if Not(c) in node.label:
                self.clash = True
            if isinstance(c, Nominal):
                node.has_nominal = True
                self._push(_P_NOMINAL, node.id, c)
            return
        if isinstance(c, Not):
            if c.arg in node.label:
                self.clash = True
            return
        if isinstance(c, And):
            self._push(_P_AND, node.id, c)
        elif isinstance(c, Or):
            self._push(_P_OR, node.id, c)
        elif isinstance(c, Forall):
            node.foralls.append(c)
            self._push(_P_FORALL, node.id, c)
        elif isinstance(c, Exists):
            self._push(_P_EXISTS, node.id, c)

    def add_edge(self, a: _Node, b: _Node, role: Role) -> None:
        roles = a.out.get(b.id)
        if roles is not None and role in roles:
            return
        if roles is None:
            a.out[b.id] = set()
        a.out[b.id].add(role)
        if a.id not in b.inn:
            b.inn[a.id] = set()
        b.inn[a.id].add(role)
        self.trail.append(("E", a.id, b.id, role))
        self._refire_foralls(a)
        self._refire_foralls(b)

    def _refire_foralls(self, node: _Node) -> None:
        for c in node.foralls:
            self._push(_P_FORALL, node.id, c)

    def _push(self, prio: int, node_id: int, payload: Concept) -> None:
        self.seq += 1
        heappush(self.heap, (prio, node_id, self.seq, payload))

    def _set_owner(self, name: str, node_id: int) -> None:
        self.trail.append(("O", name, self.nominal_owner.get(name)))
        self.nominal_owner[name] = node_id

    def _add_tag(self, node: _Node, tag: str) -> None:
        if tag in node.nominal_tags:
            return
        node.nominal_tags.append(tag)
        node.has_nominal = True
        self.trail.append(("T", node.id))

    # -- trail -------------------------------------------------------------

    def _undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            op = self.trail.pop()
            tag = op[0]
            if tag == "L":
                _, node_id, c = op
                node = self.nodes[node_id]
                node.label.discard(c)
                node.order.pop()
                if isinstance(c, Forall):
                    node.foralls.pop()
                if isinstance(c, Nominal):
                    node.has_nominal = bool(node.nominal_tags) or any(
                        isinstance(x, Nominal) for x in node.label
                    )
            elif tag == "P":
                heappush(self.heap, op[1])
            elif tag == "E":
                _, a_id, b_id, role = op
                a, b = self.nodes[a_id], self.nodes[b_id]
                a.out[b_id].discard(role)
                if not a.out[b_id]:
                    del a.out[b_id]
                b.inn[a_id].discard(role)
                if not b.inn[a_id]:
                    del b.inn[a_id]
            elif tag == "N":
                self.nodes.pop()
            elif tag == "O":
                _, name, prev = op
                if prev is None:
                    del self.nominal_owner[name]
                else:
                    self.nominal_owner[name] = prev
            elif tag == "A":
                self.nodes[op[1]].alive = True
            elif tag == "T":
                node = self.nodes[op[1]]
                node.nominal_tags.pop()
                node.has_nominal = bool(node.nominal_tags) or any(
                    isinstance(x, Nominal) for x in node.label
                )

    # -- neighbors ---------------------------------------------------------

    def neighbors(self, node: _Node, s: Role) -> Iterable[_Node]:
        is_sub = self.closure.is_sub
        for other_id, roles in node.out.items():
            other = self.nodes[other_id]
            if other.alive and any(is_sub(r, s) for r in roles):
                yield other
        for other_id, roles in node.inn.items():
            other = self.nodes[other_id]
            if other.alive and any(is_sub(inv(r), s) for r in roles):
                yield other

    # -- blocking ----------------------------------------------------------

    def _blockable_pair(self, node: _Node) -> Optional[_Node]:
        if node.kind != _BLOCKABLE or node.has_nominal or node.parent is None:
            return None
        parent = self.nodes[node.parent]
        if parent.kind != _BLOCKABLE or parent.has_nominal or not parent.alive:
            return None
        return parent

    def _edge_sig(self, parent: _Node, child: _Node):
        down = parent.out.get(child.id) or frozenset()
        up = child.out.get(parent.id) or frozenset()
        return (frozenset(down), frozenset(up))

    def _directly_blocked(self, node: _Node, memo: dict[int, bool]) -> bool:
        cached = memo.get(node.id)
        if cached is not None:
            return cached
        memo[node.id] = False
        parent = self._blockable_pair(node)
        result = False
        if parent is not None:
            sig = self._edge_sig(parent, node)
            for witness in self.nodes[: node.id]:
                if not witness.alive or witness.id == node.id:
                    continue
                w_parent = self._blockable_pair(witness)
                if w_parent is None:
                    continue
                if (
                    witness.label == node.label
                    and w_parent.label == parent.label
                    and self._edge_sig(w_parent, witness) == sig
                    and not self._directly_blocked(witness, memo)
                ):
                    result = True
                    break
        memo[node.id] = result
        return result

    def blocked(self, node: _Node) -> bool:
        memo: dict[int, bool] = {}
        current: Optional[_Node] = node
        while current is not None:
            if self._directly_blocked(current, memo):
                return True
            current = (
                self.nodes[current.parent] if current.parent is not None else None
            )
        return False

    # -- rules -------------------------------------------------------------

    def _rule_and(self, node: _Node, c: And) -> None:
        for child in c.args:
            self.add(node, child)
            if self.clash:
                return

    def _lit_impossible(self, node: _Node, c: Concept) -> bool:
        if isinstance(c, Bottom):
            return True
        if isinstance(c, (Atomic, Nominal)):
            return Not(c) in node.label
        if isinstance(c, Not):
            return c.arg in node.label
        return False

    def _rule_or(self, node: _Node, c: Or, branching: bool) -> None:
        for d in c.args:
            if d in node.label:
                return
        viable = [d for d in c.args if not self._lit_impossible(node, d)]
        if not viable:
            self.clash = True
            return
        if len(viable) == 1:
            self.add(node, viable[0])
            return
        if not branching:
            self._push(_P_BRANCH, node.id, c)
            return
        viable.sort(key=_branch_key)
        self.choices.append(_Choice(len(self.trail), node.id, viable[1:]))
        self.add(node, viable[0])

    def _rule_forall(self, node: _Node, c: Forall) -> None:
        for other in list(self.neighbors(node, c.role)):
            self.add(other, c.filler)
            if self.clash:
                return
        for r in self.closure.transitive_subroles(c.role):
            propagated = Forall(r, c.filler)
            for other in list(self.neighbors(node, r)):
                self.add(other, propagated)
                if self.clash:
                    return

    def _rule_exists(self, node: _Node, c: Exists) -> None:
        for other in self.neighbors(node, c.role):
            if c.filler in other.label:
                return
        if self.blocked(node):
            self.parked.append((node.id, c))
            return
        child = self.new_node(_BLOCKABLE, parent=node.id)
        self.add_edge(node, child, c.role)
        self.add(child, c.filler)

    def _rule_nominal(self, node: _Node, c: Nominal) -> None:
        name = c.individual
        owner_id = self.nominal_owner.get(name)
        if owner_id is None or not self.nodes[owner_id].alive:
            self._set_owner(name, node.id)
            return
        if owner_id == node.id:
            return
        owner = self.nodes[owner_id]
        if node.kind == _ROOT and owner.kind != _ROOT:
            target, victim = node, owner
        elif owner.kind == _ROOT and node.kind != _ROOT:
            target, victim = owner, node
        else:
            target, victim = (node, owner) if node.id < owner.id else (owner, node)
        self._merge(victim, target)

    def _merge(self, victim: _Node, target: _Node) -> None:
        for name, owner_id in list(self.nominal_owner.items()):
            if owner_id == victim.id:
                self._set_owner(name, target.id)
        for tag in list(victim.nominal_tags):
            self._add_tag(target, tag)
        # Predecessor edges move to the target; so do successor edges, except
        # those into the victim's own blockable subtree, which gets pruned and
        # re-grown from the unioned label.
        for z_id, roles in list(victim.inn.items()):
            z = self.nodes[z_id]
            if not z.alive:
                continue
            dest = target if z_id == victim.id else z
            for role in sorted(roles):
                self.add_edge(dest, target, role)
        for w_id, roles in list(victim.out.items()):
            w = self.nodes[w_id]
            if not w.alive or w_id == victim.id:
                continue
            if w.kind == _BLOCKABLE and w.parent == victim.id and not w.has_nominal:
                continue
            for role in sorted(roles):
                self.add_edge(target, w, role)
        for c in list(victim.order):
            self.add(target, c)
        self._prune(victim)

    def _prune(self, node: _Node) -> None:
        node.alive = False
        self.trail.append(("A", node.id))
        # In-neighbors may have relied on this node as an existential witness.
        for z_id in list(node.inn.keys()):
            z = self.nodes[z_id]
            if z.alive:
                for c in z.order:
                    if isinstance(c, Exists):
                        self._push(_P_EXISTS, z_id, c)
        for child_id in list(node.out.keys()):
            child = self.nodes[child_id]
            if (
                child.alive
                and child.kind == _BLOCKABLE
                and child.parent == node.id
                and not child.has_nominal
            ):
                self._prune(child)

    # -- search ------------------------------------------------------------

    def _pop(self) -> Optional[tuple[int, int, int, Concept]]:
        while self.heap:
            item = heappop(self.heap)
            self.trail.append(("P", item))
            _, node_id, _, payload = item
            if node_id >= len(self.nodes):
                continue
            node = self.nodes[node_id]
            if node.alive and payload in node.label:
                return item
        return None

    def _dispatch(self, item: tuple[int, int, int, Concept]) -> None:
        prio, node_id, _, payload = item
        node = self.nodes[node_id]
        if prio == _P_AND:
            self._rule_and(node, payload)
        elif prio == _P_OR:
            self._rule_or(node, payload, branching=False)
        elif prio == _P_BRANCH:
            self._rule_or(node, payload, branching=True)
        elif prio == _P_FORALL:
            self._rule_forall(node, payload)
        elif prio == _P_EXISTS:
            self._rule_exists(node, payload)
        elif prio == _P_NOMINAL:
            self._rule_nominal(node, payload)

    def _backtrack(self) -> bool:
        while self.choices:
            choice = self.choices[-1]
            self._undo_to(choice.mark)
            self.clash = False
            if choice.alternatives:
                alt = choice.alternatives.pop(0)
                self.add(self.nodes[choice.node_id], alt)
                return True
            self.choices.pop()
            self.clash = True
        return False

    def _unpark(self) -> bool:
        # Re-enqueue parked existentials whose node is no longer blocked; the
        # rule handler re-checks satisfaction itself, and trail-recorded pops
        # keep obligations alive across backtracking.
        progressed = False
        still_parked: list[tuple[int, Concept]] = []
        for node_id, c in self.parked:
            if node_id >= len(self.nodes):
                continue
            node = self.nodes[node_id]
            if not node.alive or c not in node.label:
                continue
            if self.blocked(node):
                still_parked.append((node_id, c))
                continue
            self._push(_P_EXISTS, node_id, c)
            progressed = True
        self.parked = still_parked
        return progressed

    def run(self) -> bool:
        while True:
            self.steps += 1
            if self.deadline is not None and self.steps % 512 == 0:
                if time.monotonic() > self.deadline:
                    raise ResourceLimitExceeded("wall-clock budget exceeded")
            if self.clash:
                if not self._backtrack():
                    return False
                continue
            item = self._pop()
            if item is None:
                if self._unpark():
                    continue
                return True
            self._dispatch(item)

    def live_count(self) -> int:
        return sum(1 for n in self.nodes if n.alive)


# -- public entry points -----------------------------------------------------


def _seed_concept(engine: _Engine, c: Concept) -> None:
    root = engine.new_node(_ROOT)
    engine.add(root, nnf(c))


def satisfiability_report(
    tbox: TBox, c: Concept, budget: Budget = DEFAULT_BUDGET
) -> TableauResult:
    engine = _Engine(_compile(tbox), budget)
    _seed_concept(engine, c)
    sat = engine.run()
    return TableauResult(sat, engine.created, engine.live_count())


def is_satisfiable(tbox: TBox, c: Concept, budget: Budget = DEFAULT_BUDGET) -> bool:
    return satisfiability_report(tbox, c, budget).satisfiable


def is_subsumed(
    tbox: TBox, sub: Concept, sup: Concept, budget: Budget = DEFAULT_BUDGET
) -> bool:
    return not is_satisfiable(tbox, conj((nnf(sub), nnf(neg(sup)))), budget)


class _AboxIndex:
    """Connected components of the assertion graph, nominal references included."""

    def __init__(self, ontology: Ontology):
        from .concepts import nominals_in

        parent: dict[str, str] = {}

        def find(x: str) -> str:
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: str, b: str) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        abox = ontology.abox
        for ind in abox.individuals:
            find(ind)
        for _, a, b in abox.role_assertions:
            union(a, b)
        for c, a in abox.concept_assertions:
            for other in nominals_in(c):
                if other in abox.individuals:
                    union(a, other)
        self.component: dict[str, str] = {ind: find(ind) for ind in abox.individuals}
        self.tbox_has_nominals = any(
            nominals_in(concept) for concept in ontology.tbox.concepts()
        )

    def members(self, roots: set[str]) -> set[str]:
        return {i for i, comp in self.component.items() if comp in roots}


@lru_cache(maxsize=16)
def _abox_index(ontology: Ontology) -> _AboxIndex:
    return _AboxIndex(ontology)


def _seed_abox(
    engine: _Engine, ontology: Ontology, restrict_to: Optional[set[str]] = None
) -> dict[str, _Node]:
    roots: dict[str, _Node] = {}
    for ind in sorted(ontology.abox.individuals):
        if restrict_to is not None and ind not in restrict_to:
            continue
        node = engine.new_node(_ROOT)
        node.nominal_tags.append(ind)
        node.has_nominal = True
        engine.nominal_owner[ind] = node.id
        roots[ind] = node
    for c, ind in ontology.abox.concept_assertions:
        if ind in roots:
            engine.add(roots[ind], nnf(c))
    for r, a, b in ontology.abox.role_assertions:
        if a in roots and b in roots:
            engine.add_edge(roots[a], roots[b], Role(r))
    return roots


def consistency_report(
    ontology: Ontology, budget: Budget = DEFAULT_BUDGET
) -> TableauResult:
    engine = _Engine(_compile(ontology.tbox), budget)
    _seed_abox(engine, ontology)
    sat = engine.run()
    return TableauResult(sat, engine.created, engine.live_count())


def is_consistent(ontology: Ontology, budget: Budget = DEFAULT_BUDGET) -> bool:
    return consistency_report(ontology, budget).satisfiable


def is_instance(
    ontology: Ontology,
    c: Concept,
    individual: str,
    budget: Budget = DEFAULT_BUDGET,
    assume_consistent: bool = False,
) -> bool:
    """Does every model of the ontology place the individual in the concept?

    With ``assume_consistent`` the completion graph is restricted to the
    connected components reachable from the individual and from any nominals
    in the query, which is sound only after a positive consistency check and
    with a nominal-free TBox.
    """
    if individual not in ontology.abox.individuals:
        raise KeyError(f"unknown individual {individual!r}")
    restrict: Optional[set[str]] = None
    if assume_consistent:
        index = _abox_index(ontology)
        if not index.tbox_has_nominals:
            from .concepts import nominals_in

            wanted = {individual} | {
                n for n in nominals_in(c) if n in index.component
            }
            roots = {index.component[i] for i in wanted}
            restrict = index.members(roots)
    engine = _Engine(_compile(ontology.tbox), budget)
    roots_map = _seed_abox(engine, ontology, restrict)
    engine.add(roots_map[individual], nnf(neg(c)))
    return not engine.run()


# -- bounded model enumeration (independent oracle) ---------------------------


@dataclass(frozen=True)
class Model:
    domain_size: int
    concept_extensions: dict
    role_extensions: dict
    individual_assignment: dict


def _eval3(
    c: Concept,
    e: int,
    domain: range,
    concept_vals: dict,
    role_vals: dict,
    ind_assign: dict,
):
    """Three-valued evaluation: True, False, or None when undetermined."""
    if isinstance(c, Top):
        return True
    if isinstance(c, Bottom):
        return False
    if isinstance(c, Atomic):
        return concept_vals.get((c.name, e))
    if isinstance(c, Nominal):
        return ind_assign[c.individual] == e
    if isinstance(c, Not):
        v = _eval3(c.arg, e, domain, concept_vals, role_vals, ind_assign)
        return None if v is None else (not v)
    if isinstance(c, And):
        unknown = False
        for a in c.args:
            v = _eval3(a, e, domain, concept_vals, role_vals, ind_assign)
            if v is False:
                return False
            if v is None:
                unknown = True
        return None if unknown else True
    if isinstance(c, Or):
        unknown = False
        for a in c.args:
            v = _eval3(a, e, domain, concept_vals, role_vals, ind_assign)
            if v is True:
                return True
            if v is None:
                unknown = True
        return None if unknown else False

    def role3(role: Role, x: int, y: int):
        if role.inverted:
            x, y = y, x
        return role_vals.get((role.base, x, y))

    if isinstance(c, Exists):
        unknown = False
        for f in domain:
            rv = role3(c.role, e, f)
            if rv is False:
                continue
            cv = _eval3(c.filler, f, domain, concept_vals, role_vals, ind_assign)
            if rv is True and cv is True:
                return True
            if cv is not False:
                unknown = True
        return None if unknown else False
    assert isinstance(c, Forall)
    unknown = False
    for f in domain:
        rv = role3(c.role, e, f)
        if rv is False:
            continue
        cv = _eval3(c.filler, f, domain, concept_vals, role_vals, ind_assign)
        if rv is True and cv is False:
            return False
        if cv is not True:
            unknown = True
    return None if unknown else True


def bounded_model_check(
    tbox: TBox,
    abox: Optional[ABox] = None,
    concept: Optional[Concept] = None,
    max_domain: int = 3,
) -> Optional[Model]:
    """Exhaustive search for a model over domains of size 1..max_domain.

    Sound and complete within the bound; used as the independent cross-check
    for the tableau, so it shares no expansion machinery with it.
    """
    from .concepts import atoms_in, nominals_in, roles_in

    concept_names: set[str] = set()
    role_names: set[str] = set()
    individuals: set[str] = set()
    pieces: list[Concept] = [lhs for lhs, _ in tbox.gcis] + [r for _, r in tbox.gcis]
    if concept is not None:
        pieces.append(concept)
    if abox is not None:
        individuals |= set(abox.individuals)
        for c, _ in abox.concept_assertions:
            pieces.append(c)
        for r, _, _ in abox.role_assertions:
            role_names.add(r)
    for piece in pieces:
        concept_names |= atoms_in(piece)
        role_names |= roles_in(piece)
        individuals |= nominals_in(piece)
    for sub, sup in tbox.role_inclusions:
        role_names.add(sub.base)
        role_names.add(sup.base)
    role_names |= set(tbox.transitive_roles)
    names = sorted(concept_names)
    roles = sorted(role_names)
    inds = sorted(individuals)

    for d in range(1, max_domain + 1):
        domain = range(d)
        for assignment in product(domain, repeat=len(inds)):
            ind_assign = dict(zip(inds, assignment))
            model = _search_model(
                tbox, abox, concept, d, names, roles, ind_assign
            )
            if model is not None:
                return model
    return None


def _search_model(
    tbox: TBox,
    abox: Optional[ABox],
    concept: Optional[Concept],
    d: int,
    names: list[str],
    roles: list[str],
    ind_assign: dict,
) -> Optional[Model]:
    domain = range(d)
    concept_vals: dict = {}
    role_vals: dict = {}

    def check(c: Concept, e: int):
        return _eval3(c, e, domain, concept_vals, role_vals, ind_assign)

    constraints: list = []
    var_index: dict = {}

    def register(constraint_id: int, used_names: set[str], used_roles: set[str]):
        for n in used_names:
            for e in domain:
                var_index.setdefault(("c", n, e), []).append(constraint_id)
        for r in used_roles:
            for e in domain:
                for f in domain:
                    var_index.setdefault(("r", r, e, f), []).append(constraint_id)

    from .concepts import atoms_in, roles_in

    def add_concept_constraint(c: Concept, e: int):
        cid = len(constraints)
        constraints.append(lambda c=c, e=e: check(c, e))
        register(cid, atoms_in(c), roles_in(c))

    for lhs, rhs in tbox.gcis:
        for e in domain:
            cid = len(constraints)
            constraints.append(
                lambda lhs=lhs, rhs=rhs, e=e: _or3(check(neg(lhs), e), check(rhs, e))
            )
            register(cid, atoms_in(lhs) | atoms_in(rhs), roles_in(lhs) | roles_in(rhs))
    for sub, sup in tbox.role_inclusions:
        for e in domain:
            for f in domain:

                def incl(sub=sub, sup=sup, e=e, f=f):
                    def rv(role: Role, x: int, y: int):
                        if role.inverted:
                            x, y = y, x
                        return role_vals.get((role.base, x, y))

                    return _or3(_not3(rv(sub, e, f)), rv(sup, e, f))

                cid = len(constraints)
                constraints.append(incl)
                register(cid, set(), {sub.base, sup.base})
    for name in tbox.transitive_roles:
        for e in domain:
            for f in domain:
                for g in domain:

                    def trans(name=name, e=e, f=f, g=g):
                        a = role_vals.get((name, e, f))
                        b = role_vals.get((name, f, g))
                        c = role_vals.get((name, e, g))
                        return _or3(_not3(a), _or3(_not3(b), c))

                    cid = len(constraints)
                    constraints.append(trans)
                    register(cid, set(), {name})
    if abox is not None:
        for c, ind in abox.concept_assertions:
            add_concept_constraint(c, ind_assign[ind])
        for r, a, b in abox.role_assertions:

            def asserted(r=r, a=a, b=b):
                return role_vals.get((r, ind_assign[a], ind_assign[b]))

            cid = len(constraints)
            constraints.append(asserted)
            register(cid, set(), {r})
    if concept is not None:

        def witness(concept=concept):
            vals = [check(concept, e) for e in domain]
            if any(v is True for v in vals):
                return True
            if all(v is False for v in vals):
                return False
            return None

        cid = len(constraints)
        constraints.append(witness)
        register(cid, atoms_in(concept), roles_in(concept))

    variables: list = [("c", n, e) for n in names for e in domain]
    variables += [("r", r, e, f) for r in roles for e in domain for f in domain]

    def violated(ids: Iterable[int]) -> bool:
        return any(constraints[i]() is False for i in ids)

    if violated(range(len(constraints))):
        return None

    def assign(var, value) -> None:
        if var[0] == "c":
            concept_vals[(var[1], var[2])] = value
        else:
            role_vals[(var[1], var[2], var[3])] = value

    def unassign(var) -> None:
        if var[0] == "c":
            del concept_vals[(var[1], var[2])]
        else:
            del role_vals[(var[1], var[2], var[3])]

    def dfs(i: int) -> bool:
        if i == len(variables):
            return all(c() is True for c in constraints)
        var = variables[i]
        affected = var_index.get(var, ())
        for value in (False, True):
            assign(var, value)
            if not violated(affected) and dfs(i + 1):
                return True
            unassign(var)
        return False

    if not dfs(0):
        return None
    concept_ext = {
        n: frozenset(e for e in domain if concept_vals.get((n, e))) for n in names
    }
    role_ext = {
        r: frozenset(
            (e, f) for e in domain for f in domain if role_vals.get((r, e, f))
        )
        for r in roles
    }
    return Model(
        domain_size=d,
        concept_extensions=concept_ext,
        role_extensions=role_ext,
        individual_assignment=dict(ind_assign),
    )


def _or3(a, b):
    if a is True or b is True:
        return True
    if a is False and b is False:
        return False
    return None


def _not3(a):
    return None if a is None else (not a)


def model_satisfies(
    model: Model,
    tbox: TBox,
    abox: Optional[ABox] = None,
    concept: Optional[Concept] = None,
) -> bool:
    """Two-valued check that a returned model really satisfies everything."""
    domain = range(model.domain_size)
    concept_vals = {
        (n, e): e in ext for n, ext in model.concept_extensions.items() for e in domain
    }
    role_vals = {
        (r, e, f): (e, f) in ext
        for r, ext in model.role_extensions.items()
        for e in domain
        for f in domain
    }
    ind_assign = model.individual_assignment

    def check(c: Concept, e: int) -> bool:
        v = _eval3(c, e, domain, concept_vals, role_vals, ind_assign)
        return bool(v)

    for lhs, rhs in tbox.gcis:
        for e in domain:
            if check(lhs, e) and not check(rhs, e):
                return False
    for sub, sup in tbox.role_inclusions:
        for e in domain:
            for f in domain:
                se, sf = (f, e) if sub.inverted else (e, f)
                pe, pf = (f, e) if sup.inverted else (e, f)
                if role_vals.get((sub.base, se, sf)) and not role_vals.get(
                    (sup.base, pe, pf)
                ):
                    return False
    for name in tbox.transitive_roles:
        for e in domain:
            for f in domain:
                for g in domain:
                    if (
                        role_vals.get((name, e, f))
                        and role_vals.get((name, f, g))
                        and not role_vals.get((name, e, g))
                    ):
                        return False
    if abox is not None:
        for c, ind in abox.concept_assertions:
            if not check(c, ind_assign[ind]):
                return False
        for r, a, b in abox.role_assertions:
            if not role_vals.get((r, ind_assign[a], ind_assign[b])):
                return False
    if concept is not None and not any(check(concept, e) for e in domain):
        return False
    return True

"""Reader and writer for the ``.dlo`` interchange format.

One statement per line, ``#`` comments, whitespace-insensitive inside a
statement. The writer emits canonical text: set-valued constructors come out
with their children in sorted order, so equal ontologies serialize equally.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .concepts import (
    BOTTOM,
    TOP,
    Atomic,
    Concept,
    Role,
    conj,
    disj,
    neg,
    nominal,
    only,
    some,
)
from .concepts import And, Bottom, Exists, Forall, Nominal, Not, Or, Top
from .ontology import RESERVED_PREFIX, Ontology, TBox, make_abox, make_ontology

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_.\-]*")
_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


class ParseError(Exception):
    """Syntax or validation failure, always tied to a source location."""

    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{message} ({location})")
        self.message = message
        self.location = location


class _Tokens:
    def __init__(self, line_text: str, line_no: int):
        self.items: list[tuple[str, int]] = []
        for m in _TOKEN_RE.finditer(line_text):
            self.items.append((m.group(0), m.start() + 1))
        self.pos = 0
        self.line_no = line_no
        self.line_len = len(line_text)

    def loc(self) -> SourceLocation:
        if self.pos < len(self.items):
            return SourceLocation(self.line_no, self.items[self.pos][1])
        return SourceLocation(self.line_no, self.line_len + 1)

    def peek(self) -> str | None:
        if self.pos < len(self.items):
            return self.items[self.pos][0]
        return None

    def next(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(
                f"unexpected end of statement, expected {expected or 'more input'}",
                self.loc(),
            )
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.loc())
        self.pos += 1
        return tok

    def done(self) -> bool:
        return self.pos >= len(self.items)


def _check_name(name: str, toks: _Tokens, what: str) -> str:
    if name.startswith(RESERVED_PREFIX):
        raise ParseError(f"{what} {name!r} uses the reserved '_:' prefix", toks.loc())
    if not NAME_RE.fullmatch(name):
        raise ParseError(f"invalid {what} {name!r}", toks.loc())
    return name


def _parse_name(toks: _Tokens, what: str) -> str:
    tok = toks.peek()
    if tok is None or tok in ("(", ")"):
        raise ParseError(f"expected {what}", toks.loc())
    _check_name(tok, toks, what)
    toks.next()
    return tok


def _parse_role(toks: _Tokens) -> Role:
    tok = toks.peek()
    if tok == "ObjectInverseOf":
        toks.next()
        toks.next("(")
        inner = _parse_role(toks)
        toks.next(")")
        return Role(inner.base, not inner.inverted)
    return Role(_parse_name(toks, "role name"))


def _parse_concept_expr(toks: _Tokens) -> Concept:
    tok = toks.peek()
    if tok is None or tok in ("(", ")"):
        raise ParseError("expected a concept", toks.loc())
    if tok == "Top":
        toks.next()
        return TOP
    if tok == "Bottom":
        toks.next()
        return BOTTOM
    if tok == "ObjectComplementOf":
        toks.next()
        toks.next("(")
        arg = _parse_concept_expr(toks)
        toks.next(")")
        return neg(arg)
    if tok in ("ObjectIntersectionOf", "ObjectUnionOf"):
        head = toks.next()
        toks.next("(")
        args = []
        while toks.peek() != ")":
            args.append(_parse_concept_expr(toks))
        toks.next(")")
        if len(args) < 2:
            raise ParseError(f"{head} needs at least two operands", toks.loc())
        return conj(args) if head == "ObjectIntersectionOf" else disj(args)
    if tok in ("ObjectSomeValuesFrom", "ObjectAllValuesFrom"):
        head = toks.next()
        toks.next("(")
        role = _parse_role(toks)
        filler = _parse_concept_expr(toks)
        toks.next(")")
        return some(role, filler) if head == "ObjectSomeValuesFrom" else only(role, filler)
    if tok == "ObjectOneOf":
        toks.next()
        toks.next("(")
        ind = _parse_name(toks, "individual name")
        toks.next(")")
        return nominal(ind)
    return Atomic(_parse_name(toks, "concept name"))


def parse_concept(text: str, line_no: int = 1) -> Concept:
    """Parse a single concept expression."""
    toks = _Tokens(text, line_no)
    c = _parse_concept_expr(toks)
    if not toks.done():
        raise ParseError(f"trailing input {toks.peek()!r} after concept", toks.loc())
    return c


def parse_role(text: str, line_no: int = 1) -> Role:
    toks = _Tokens(text, line_no)
    r = _parse_role(toks)
    if not toks.done():
        raise ParseError(f"trailing input {toks.peek()!r} after role", toks.loc())
    return r


def serialize_concept(c: Concept) -> str:
    """Canonical text form of a concept (also its identity key)."""
    return c.key


def serialize_role(r: Role) -> str:
    return r.key


def _assertion_concept_ok(c: Concept) -> bool:
    return isinstance(c, Atomic) or (isinstance(c, Not) and isinstance(c.arg, Atomic))


def parse_ontology(text: str) -> Ontology:
    """Parse full ``.dlo`` content into an interned ontology."""
    gcis: list[tuple[Concept, Concept]] = []
    role_inclusions: list[tuple[Role, Role]] = []
    transitive: set[str] = set()
    concept_assertions: list[tuple[Concept, str]] = []
    role_assertions: list[tuple[str, str, str]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = _Tokens(raw.split("#", 1)[0], line_no)
        head_loc = toks.loc()
        head = toks.next()
        if head == "SubClassOf":
            toks.next("(")
            lhs = _parse_concept_expr(toks)
            rhs = _parse_concept_expr(toks)
            toks.next(")")
            gcis.append((lhs, rhs))
        elif head == "EquivalentClasses":
            toks.next("(")
            lhs = _parse_concept_expr(toks)
            rhs = _parse_concept_expr(toks)
            toks.next(")")
            gcis.append((lhs, rhs))
            gcis.append((rhs, lhs))
        elif head == "SubObjectPropertyOf":
            toks.next("(")
            sub = _parse_role(toks)
            sup = _parse_role(toks)
            toks.next(")")
            role_inclusions.append((sub, sup))
        elif head == "TransitiveObjectProperty":
            toks.next("(")
            r = _parse_role(toks)
            toks.next(")")
            transitive.add(r.base)
        elif head == "ClassAssertion":
            toks.next("(")
            c = _parse_concept_expr(toks)
            ind = _parse_name(toks, "individual name")
            toks.next(")")
            if not _assertion_concept_ok(c):
                raise ParseError(
                    "concept assertions take an atomic or negated atomic concept",
                    head_loc,
                )
            concept_assertions.append((c, ind))
        elif head == "ObjectPropertyAssertion":
            toks.next("(")
            if toks.peek() == "ObjectInverseOf":
                raise ParseError(
                    "role assertions take a named role, not an inverse", toks.loc()
                )
            role_name = _parse_name(toks, "role name")
            a = _parse_name(toks, "individual name")
            b = _parse_name(toks, "individual name")
            toks.next(")")
            role_assertions.append((role_name, a, b))
        else:
            raise ParseError(f"unknown statement {head!r}", head_loc)
        if not toks.done():
            raise ParseError(f"trailing input {toks.peek()!r}", toks.loc())

    tbox = TBox(
        gcis=tuple(gcis),
        role_inclusions=tuple(role_inclusions),
        transitive_roles=frozenset(transitive),
    )
    abox = make_abox(concept_assertions, role_assertions)
    return make_ontology(tbox, abox)


def serialize_ontology(o: Ontology) -> str:
    """Canonical ``.dlo`` text: TBox statements, then the ABox, one per line."""
    lines: list[str] = []
    for lhs, rhs in o.tbox.gcis:
        lines.append(f"SubClassOf({lhs.key} {rhs.key})")
    for sub, sup in o.tbox.role_inclusions:
        lines.append(f"SubObjectPropertyOf({sub.key} {sup.key})")
    for name in sorted(o.tbox.transitive_roles):
        lines.append(f"TransitiveObjectProperty({name})")
    for c, ind in o.abox.concept_assertions:
        lines.append(f"ClassAssertion({c.key} {ind})")
    for r, a, b in o.abox.role_assertions:
        lines.append(f"ObjectPropertyAssertion({r} {a} {b})")
    return "\n".join(lines) + ("\n" if lines else "")

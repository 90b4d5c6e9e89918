"""Deterministic synthetic ontology generator (university-flavored) and the
size/time reporters.

One seed fixes a per-unit template; a scale-s ontology is s structurally
identical copies of that template, with the unit hubs joined in a line by a
role that no axiom defines. Cycle-closing assertions (direct department
memberships, second course enrollments, co-authorships, collaboration
cycles, citation links) are added in proportion to ``cycle_rate``; at zero
the assertion graph is a forest.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .concepts import (
    BOTTOM,
    Atomic,
    Concept,
    Role,
    conj,
    only,
    some,
)
from .ontology import Ontology, TBox, make_abox, make_ontology
from .query import prepare_query, retrieve_instances
from .rollup import MODES, AssertionGraph, RollBudgetExceeded, build_graph, roll_up
from .syncond import TBoxAnalysis, analyze
from .tableau import Budget, DEFAULT_BUDGET, ResourceLimitExceeded


@dataclass(frozen=True)
class GenConfig:
    seed: int = 1
    scale: int = 1
    fanout: int = 130
    cycle_rate: float = 0.3
    trigger_fraction: float = 0.8


_C = {
    name: Atomic(name)
    for name in (
        "Organization",
        "Department",
        "Person",
        "Employee",
        "Faculty",
        "SeniorFaculty",
        "Professor",
        "AssociateProfessor",
        "Lecturer",
        "Chair",
        "Student",
        "GraduateStudent",
        "Course",
        "GraduateCourse",
        "Publication",
        "Researcher",
    )
}

ROLE_NAMES = (
    "memberOf",
    "worksFor",
    "headOf",
    "teaches",
    "takesCourse",
    "advisorOf",
    "authorOf",
    "cites",
    "collaboratesWith",
    "connectedTo",
)


def _tbox(trigger_fraction: float) -> TBox:
    c = _C
    hierarchy = [
        (c["Department"], c["Organization"]),
        (c["AssociateProfessor"], c["Professor"]),
        (c["Professor"], c["Faculty"]),
        (c["Lecturer"], c["Faculty"]),
        (c["SeniorFaculty"], c["Faculty"]),
        (c["Faculty"], c["Employee"]),
        (c["Employee"], c["Person"]),
        (c["GraduateStudent"], c["Student"]),
        (c["Student"], c["Person"]),
        (c["Chair"], c["Professor"]),
        (c["GraduateCourse"], c["Course"]),
        (c["Researcher"], c["Person"]),
    ]
    disjoint = [
        (conj((c["Course"], c["Person"])), BOTTOM),
        (conj((c["Lecturer"], c["SeniorFaculty"])), BOTTOM),
    ]
    pool = [
        (some(Role("headOf"), c["Department"]), c["Chair"]),
        (c["Organization"], only(Role("memberOf", True), c["Person"])),
        (some(Role("takesCourse"), c["Course"]), c["Student"]),
        (some(Role("advisorOf"), c["GraduateStudent"]), c["Professor"]),
        (some(Role("authorOf"), c["Publication"]), c["Researcher"]),
        (some(Role("cites"), c["Publication"]), c["Publication"]),
        (some(Role("teaches"), c["GraduateCourse"]), c["SeniorFaculty"]),
        (some(Role("collaboratesWith"), c["Faculty"]), c["Researcher"]),
        (some(Role("worksFor"), c["Organization"]), c["Employee"]),
        (some(Role("connectedTo"), c["Organization"]), c["Organization"]),
    ]
    take = max(0, min(len(pool), round(trigger_fraction * len(pool))))
    gcis = hierarchy + disjoint + pool[:take]
    return TBox(
        gcis=tuple(gcis),
        role_inclusions=(
            (Role("headOf"), Role("worksFor")),
            (Role("worksFor"), Role("memberOf")),
        ),
        transitive_roles=frozenset({"collaboratesWith", "connectedTo"}),
    )


@dataclass
class _Template:
    """Per-unit wiring, drawn once from the seed and stamped per unit."""

    n_prof: int
    n_lect: int
    n_grad: int
    n_stud: int
    n_course: int
    n_grad_course: int
    n_pub: int
    course_teacher: list[int]
    lecturer_course: list[int]
    student_course: list[int]
    student_member: list[int]
    student_second: list[tuple[int, int]]
    grad_advisor: list[int]
    grad_member: list[int]
    grad_course: list[tuple[int, int]]
    pub_author: list[int]
    pub_coauthor: list[tuple[int, int]]
    cites_links: list[tuple[int, int]]
    triangles: list[tuple[int, int, int]]
    pairs: list[tuple[int, int]]


def _make_template(config: GenConfig) -> _Template:
    rnd = random.Random(config.seed)
    f = max(20, config.fanout)
    n_prof = max(3, f // 16)
    n_lect = 2
    n_grad = max(2, f // 16)
    n_stud = max(4, f - n_prof - n_lect - n_grad)
    n_course = max(4, f // 10)
    n_grad_course = max(1, n_course // 4)
    n_pub = max(3, f // 13)
    rate = min(1.0, max(0.0, config.cycle_rate))

    non_grad = list(range(n_grad_course, n_course))
    course_teacher = [rnd.randrange(n_prof) for _ in range(n_course)]
    lecturer_course = [non_grad[rnd.randrange(len(non_grad))] for _ in range(n_lect)]
    student_course = [rnd.randrange(n_course) for _ in range(n_stud)]
    student_member = sorted(rnd.sample(range(n_stud), round(rate * n_stud)))
    second_pool = sorted(rnd.sample(range(n_stud), round(rate * n_stud / 2)))
    student_second = [(s, rnd.randrange(n_course)) for s in second_pool]
    grad_advisor = [rnd.randrange(n_prof) for _ in range(n_grad)]
    grad_member = sorted(rnd.sample(range(n_grad), round(rate * n_grad)))
    grad_course = [
        (g, rnd.randrange(n_grad_course)) for g in sorted(rnd.sample(range(n_grad), round(rate * n_grad)))
    ]
    pub_author = [rnd.randrange(n_prof) for _ in range(n_pub)]
    coauth_pool = sorted(rnd.sample(range(n_pub), round(rate * n_pub / 2)))
    pub_coauthor = [(m, rnd.randrange(n_grad)) for m in coauth_pool]
    cites_links = [(m, m + 1) for m in range(min(n_pub - 1, round(rate * (n_pub - 1))))]
    triangles = []
    pairs = []
    if rate > 0 and n_prof >= 3:
        triangles.append((0, 1, 2))
    if rate > 0:
        a = 3 % n_prof
        b = 4 % n_prof
        if a != b:
            pairs.append((a, b))
        else:
            pairs.append((0, 1 % n_prof))
    return _Template(
        n_prof=n_prof,
        n_lect=n_lect,
        n_grad=n_grad,
        n_stud=n_stud,
        n_course=n_course,
        n_grad_course=n_grad_course,
        n_pub=n_pub,
        course_teacher=course_teacher,
        lecturer_course=lecturer_course,
        student_course=student_course,
        student_member=student_member,
        student_second=student_second,
        grad_advisor=grad_advisor,
        grad_member=grad_member,
        grad_course=grad_course,
        pub_author=pub_author,
        pub_coauthor=pub_coauthor,
        cites_links=cites_links,
        triangles=triangles,
        pairs=pairs,
    )


def generate(config: GenConfig) -> Ontology:
    """Deterministic ontology for the config; same config, same bytes."""
    if config.scale < 1:
        raise ValueError("scale must be at least 1")
    t = _make_template(config)
    c = _C
    cas: list[tuple[Concept, str]] = []
    ras: list[tuple[str, str, str]] = []

    def stamp(u: int) -> None:
        tag = f"u{u:02d}"
        dept = f"Dept_{tag}"
        prof = [f"P{i:03d}_{tag}" for i in range(t.n_prof)]
        lect = [f"L{i:03d}_{tag}" for i in range(t.n_lect)]
        stud = [f"S{i:03d}_{tag}" for i in range(t.n_stud)]
        grad = [f"G{i:03d}_{tag}" for i in range(t.n_grad)]
        course = [f"C{i:03d}_{tag}" for i in range(t.n_course)]
        pub = [f"Pub{i:03d}_{tag}" for i in range(t.n_pub)]

        cas.append((c["Department"], dept))
        cas.append((c["AssociateProfessor"], prof[0]))
        for p in prof[1:]:
            cas.append((c["Professor"], p))
        for l in lect:
            cas.append((c["Lecturer"], l))
        for s in stud:
            cas.append((c["Student"], s))
        for g in grad:
            cas.append((c["GraduateStudent"], g))
        for i, co in enumerate(course):
            kind = "GraduateCourse" if i < t.n_grad_course else "Course"
            cas.append((c[kind], co))
        for p in pub:
            cas.append((c["Publication"], p))

        # Tree skeleton: everyone hangs off the department through one path.
        ras.append(("headOf", prof[0], dept))
        for p in prof[1:]:
            ras.append(("worksFor", p, dept))
        for l in lect:
            ras.append(("worksFor", l, dept))
        for i, co in enumerate(course):
            ras.append(("teaches", prof[t.course_teacher[i]], co))
        for j, l in enumerate(lect):
            ras.append(("teaches", l, course[t.lecturer_course[j]]))
        for m, s in enumerate(stud):
            ras.append(("takesCourse", s, course[t.student_course[m]]))
        for j, g in enumerate(grad):
            ras.append(("advisorOf", prof[t.grad_advisor[j]], g))
        for m, p in enumerate(pub):
            ras.append(("authorOf", prof[t.pub_author[m]], p))

        # Cycle-closing extras, proportional to cycle_rate.
        for m in t.student_member:
            ras.append(("memberOf", stud[m], dept))
        for m, co in t.student_second:
            ras.append(("takesCourse", stud[m], course[co]))
        for j in t.grad_member:
            ras.append(("memberOf", grad[j], dept))
        for j, gc in t.grad_course:
            ras.append(("takesCourse", grad[j], course[gc]))
        for m, j in t.pub_coauthor:
            ras.append(("authorOf", grad[j], pub[m]))
        for m, n in t.cites_links:
            ras.append(("cites", pub[m], pub[n]))
        for a, b, d in t.triangles:
            ras.append(("collaboratesWith", prof[a], prof[b]))
            ras.append(("collaboratesWith", prof[b], prof[d]))
            ras.append(("collaboratesWith", prof[d], prof[a]))
        for a, b in t.pairs:
            ras.append(("collaboratesWith", prof[a], prof[b]))
            ras.append(("collaboratesWith", prof[b], prof[a]))

    for u in range(config.scale):
        stamp(u)
    for u in range(config.scale - 1):
        ras.append(("connectedTo", f"Dept_u{u:02d}", f"Dept_u{u + 1:02d}"))

    return make_ontology(_tbox(config.trigger_fraction), make_abox(cas, ras))


def suite_queries() -> list[Concept]:
    """The five fixed retrieval queries used across the benchmark suite."""
    c = _C
    return [
        c["Chair"],
        some(Role("headOf"), c["Department"]),
        conj((c["Professor"], some(Role("advisorOf"), c["GraduateStudent"]))),
        some(Role("memberOf"), c["Organization"]),
        some(
            Role("authorOf"),
            conj((c["Publication"], some(Role("cites"), c["Publication"]))),
        ),
    ]


_HIST_BOUNDS = (0, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)


def _hist_label(i: int) -> str:
    if i == 0:
        return "0"
    lo = _HIST_BOUNDS[i - 1] + 1
    hi = _HIST_BOUNDS[i]
    return f"{lo}-{hi}"


def _hist_bin(count: int) -> int:
    if count <= 0:
        return 0
    for i in range(1, len(_HIST_BOUNDS)):
        if count <= _HIST_BOUNDS[i]:
            return i
    return len(_HIST_BOUNDS) - 1


@dataclass
class StatsReport:
    """Aggregated size measures of the rolled concepts for one mode."""

    mode: str
    individuals: int
    errors: int
    max_depth: int
    avg_depth: float
    max_conjuncts: int
    avg_conjuncts: float
    histogram: tuple[tuple[str, int], ...]
    wall_ms: float

    def header(self) -> str:
        bins = "\t".join(f"e[{label}]" for label, _ in self.histogram)
        return (
            "# existential-count histogram bins are powers of two: 0, 1-2, 3-4, ...\n"
            "mode\tindividuals\terrors\tmax_depth\tavg_depth\t"
            f"max_conjuncts\tavg_conjuncts\t{bins}"
        )

    def row(self) -> str:
        bins = "\t".join(str(count) for _, count in self.histogram)
        return (
            f"{self.mode}\t{self.individuals}\t{self.errors}\t{self.max_depth}\t"
            f"{self.avg_depth:.4f}\t{self.max_conjuncts}\t{self.avg_conjuncts:.4f}\t{bins}"
        )


def stats(
    ontology: Ontology,
    analysis: Optional[TBoxAnalysis],
    mode: str,
    graph: Optional[AssertionGraph] = None,
    budget: Budget = DEFAULT_BUDGET,
    max_rolled: Optional[int] = None,
) -> StatsReport:
    """Roll every individual under one mode and aggregate the concept metrics."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    start = time.perf_counter()
    if graph is None:
        graph = build_graph(ontology.abox)
    depths: list[int] = []
    conjuncts: list[int] = []
    hist = [0] * len(_HIST_BOUNDS)
    errors = 0
    for ind in sorted(ontology.abox.individuals):
        try:
            roll = roll_up(
                ontology, analysis, ind, mode, graph=graph, max_rolled=max_rolled
            )
        except (ResourceLimitExceeded, RollBudgetExceeded):
            errors += 1
            continue
        depths.append(roll.metrics.quantification_depth)
        conjuncts.append(roll.metrics.conjunct_count)
        hist[_hist_bin(roll.metrics.existential_count)] += 1
    wall = (time.perf_counter() - start) * 1000.0
    n = len(depths)
    return StatsReport(
        mode=mode,
        individuals=n,
        errors=errors,
        max_depth=max(depths) if depths else 0,
        avg_depth=sum(depths) / n if n else 0.0,
        max_conjuncts=max(conjuncts) if conjuncts else 0,
        avg_conjuncts=sum(conjuncts) / n if n else 0.0,
        histogram=tuple((_hist_label(i), hist[i]) for i in range(len(hist))),
        wall_ms=wall,
    )


@dataclass(frozen=True)
class BenchRow:
    ontology: str
    query: str
    mode: str
    workers: int
    individuals: int
    members: int
    avg_check_ms: float
    total_ms: float

    @staticmethod
    def header() -> str:
        return "ontology\tquery\tmode\tworkers\tindividuals\tmembers\tavg_check_ms\ttotal_ms"

    def row(self) -> str:
        return (
            f"{self.ontology}\t{self.query}\t{self.mode}\t{self.workers}\t"
            f"{self.individuals}\t{self.members}\t{self.avg_check_ms:.3f}\t{self.total_ms:.1f}"
        )


def bench(
    config: GenConfig,
    queries: Sequence[Concept],
    modes: Sequence[str],
    workers: int = 1,
    budget: Budget = DEFAULT_BUDGET,
    scales: Optional[Sequence[int]] = None,
) -> tuple[list[BenchRow], dict[tuple[str, str, str], frozenset[str]]]:
    """Timing table over generated ontologies; loading time is excluded.

    Returns the rows plus the member sets keyed by (ontology, query, mode) so
    callers can assert mode agreement without reparsing the table.
    """
    rows: list[BenchRow] = []
    member_sets: dict[tuple[str, str, str], frozenset[str]] = {}
    for scale in scales or [config.scale]:
        cfg = GenConfig(
            seed=config.seed,
            scale=scale,
            fanout=config.fanout,
            cycle_rate=config.cycle_rate,
            trigger_fraction=config.trigger_fraction,
        )
        ontology = generate(cfg)
        label = f"gen(seed={cfg.seed},scale={cfg.scale})"
        for q in queries:
            pq = prepare_query(ontology, q)
            for mode in modes:
                answer = retrieve_instances(ontology, pq, mode, workers, budget)
                n = len(answer.per_individual_stats) + len(answer.errors)
                avg_check = (
                    answer.total_ms / n if n else 0.0
                )
                rows.append(
                    BenchRow(
                        ontology=label,
                        query=q.key,
                        mode=mode,
                        workers=workers,
                        individuals=len(ontology.abox.individuals),
                        members=len(answer.members),
                        avg_check_ms=avg_check,
                        total_ms=answer.total_ms,
                    )
                )
                member_sets[(label, q.key, mode)] = answer.members
    return rows, member_sets

"""Command-line interface. Answers go to stdout, diagnostics and timing
summaries to stderr; exit codes are stable: 0 answer, 1 usage or parse error,
2 resource budget exceeded, 3 inconsistent ontology where that is exceptional."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .benchgen import BenchRow, GenConfig, bench, generate, stats, suite_queries
from .concepts import Atomic, Concept
from .dlo import ParseError, parse_concept, parse_ontology, serialize_ontology
from .ontology import Ontology, make_ontology, to_simple_form
from .query import (
    BASELINE,
    UnknownNameError,
    consistency_gate,
    prepare_query,
    retrieve_instances,
)
from .rollup import MODES, RollBudgetExceeded, roll_up
from .syncond import analyze
from .tableau import (
    Budget,
    ResourceLimitExceeded,
    is_consistent,
    is_instance,
    is_satisfiable,
    is_subsumed,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_INCONSISTENT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; keep our code 1
        raise UsageError(message)


def _bool(value: bool) -> str:
    return "true" if value else "false"


def build_parser() -> _Parser:
    parser = _Parser(prog="mscq", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timeout-ms", type=int, default=None)
    common.add_argument("--max-nodes", type=int, default=100_000)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--mode", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_text, ontology_arg=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if ontology_arg:
            p.add_argument("ontology", help="path to a .dlo file, or - for stdin")
        return p

    p = cmd("sat", "concept satisfiability against the TBox")
    p.add_argument("--concept", required=True)
    p = cmd("subsume", "concept subsumption against the TBox")
    p.add_argument("--sub", required=True)
    p.add_argument("--sup", required=True)
    cmd("consistent", "TBox+ABox consistency")
    p = cmd("instance", "instance checking by full reasoning")
    p.add_argument("--concept", required=True)
    p.add_argument("--individual", required=True)
    cmd("analyze", "dump trigger roles and matched axioms")
    p = cmd("msc", "roll one individual up into a concept")
    p.add_argument("--individual", required=True)
    p.add_argument("--query", default=None)
    p.add_argument("--max-rolled", type=int, default=None)
    p = cmd("check", "instance check via the rolled concept (or baseline)")
    p.add_argument("--query", required=True)
    p.add_argument("--individual", required=True)
    p = cmd("retrieve", "retrieve all instances of a query concept")
    p.add_argument("--query", required=True)
    p = cmd("gen", "generate a synthetic ontology", ontology_arg=False)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--fanout", type=int, default=130)
    p.add_argument("--cycle-rate", type=float, default=0.3)
    p.add_argument("--trigger-fraction", type=float, default=0.8)
    p.add_argument("--out", default=None)
    p = cmd("stats", "roll every individual and report size metrics")
    p.add_argument("--query", default=None)
    p.add_argument("--figures", default=None)
    p = cmd("bench", "timing table over generated ontologies", ontology_arg=False)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--scales", default="1")
    p.add_argument("--fanout", type=int, default=130)
    p.add_argument("--cycle-rate", type=float, default=0.3)
    p.add_argument("--trigger-fraction", type=float, default=0.8)
    p.add_argument("--modes", default="baseline,v3")
    p.add_argument("--query", action="append", default=None)
    p.add_argument("--figures", default=None)
    return parser


def _read_ontology(path: str) -> Ontology:
    if path == "-":
        return parse_ontology(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as handle:
        return parse_ontology(handle.read())


def _budget(args) -> Budget:
    return Budget(max_nodes=args.max_nodes, timeout_ms=args.timeout_ms)


def _simple(ontology: Ontology) -> Ontology:
    return make_ontology(to_simple_form(ontology.tbox), ontology.abox)


def _mode(args, allowed, default) -> str:
    mode = args.mode or default
    if mode not in allowed:
        raise UsageError(f"--mode must be one of {', '.join(allowed)}")
    return mode


def _summary(answer) -> str:
    return json.dumps(
        {
            "mode": answer.mode,
            "members": len(answer.members),
            "errors": len(answer.errors),
            "total_ms": round(answer.total_ms, 3),
            "avg_roll_ms": round(answer.avg_roll_ms, 4),
            "avg_subsume_ms": round(answer.avg_subsume_ms, 4),
            "inconsistent": answer.inconsistent,
            "aux_names": list(answer.query.aux_names),
        },
        sort_keys=True,
    )


def _run(args) -> int:
    out = sys.stdout
    err = sys.stderr
    if args.command == "sat":
        k = _simple(_read_ontology(args.ontology))
        c = parse_concept(args.concept)
        print(_bool(is_satisfiable(k.tbox, c, _budget(args))), file=out)
    elif args.command == "subsume":
        k = _simple(_read_ontology(args.ontology))
        print(
            _bool(
                is_subsumed(
                    k.tbox,
                    parse_concept(args.sub),
                    parse_concept(args.sup),
                    _budget(args),
                )
            ),
            file=out,
        )
    elif args.command == "consistent":
        k = _simple(_read_ontology(args.ontology))
        print(_bool(is_consistent(k, _budget(args))), file=out)
    elif args.command == "instance":
        k = _simple(_read_ontology(args.ontology))
        c = parse_concept(args.concept)
        print(_bool(is_instance(k, c, args.individual, _budget(args))), file=out)
    elif args.command == "analyze":
        k = _simple(_read_ontology(args.ontology))
        analysis = analyze(k.tbox)
        for role in sorted(analysis.trigger_roles, key=lambda r: r.key):
            print(f"trigger\t{role.key}", file=out)
        for role in sorted(analysis.matched, key=lambda r: r.key):
            for ax in analysis.matched[role]:
                print(
                    f"matched\t{role.key}\t{ax.c1.key}\t{ax.connective}\t"
                    f"{ax.c2.key}\t{ax.c3.key}",
                    file=out,
                )
    elif args.command == "msc":
        ontology = _read_ontology(args.ontology)
        mode = _mode(args, MODES, "v1")
        gate = consistency_gate(ontology, _budget(args))
        if not gate.consistent:
            # The rolled concept of any individual in an inconsistent ABox.
            print("Bottom", file=out)
            print("depth=0 conjuncts=1 existentials=0 rolled=0", file=out)
            print("ontology is inconsistent", file=err)
            return EXIT_OK
        if args.query is not None:
            pq = prepare_query(ontology, parse_concept(args.query))
            target, analysis = pq.rolling_ontology, pq.analysis
        else:
            simple = _simple(ontology)
            target, analysis = simple, analyze(simple.tbox)
        if args.individual not in target.abox.individuals:
            raise UsageError(f"unknown individual {args.individual!r}")
        roll = roll_up(
            target, analysis, args.individual, mode, max_rolled=args.max_rolled
        )
        print(roll.concept.key, file=out)
        m = roll.metrics
        print(
            f"depth={m.quantification_depth} conjuncts={m.conjunct_count} "
            f"existentials={m.existential_count} rolled={len(roll.rolled_assertions)}",
            file=out,
        )
    elif args.command == "check":
        ontology = _read_ontology(args.ontology)
        mode = _mode(args, (BASELINE, "v2", "v3"), "v3")
        pq = prepare_query(ontology, parse_concept(args.query))
        if args.individual not in ontology.abox.individuals:
            raise UsageError(f"unknown individual {args.individual!r}")
        gate = consistency_gate(ontology, _budget(args))
        if not gate.consistent:
            print("true", file=out)
            print('{"inconsistent": true}', file=err)
            return EXIT_OK
        from .query import check_instance_msc
        from .tableau import is_instance as baseline_check

        if mode == BASELINE:
            verdict = baseline_check(
                pq.baseline_ontology,
                pq.rewritten_query,
                args.individual,
                _budget(args),
                assume_consistent=True,
            )
        else:
            verdict = check_instance_msc(pq, args.individual, mode, _budget(args))
        print(_bool(verdict), file=out)
    elif args.command == "retrieve":
        ontology = _read_ontology(args.ontology)
        mode = _mode(args, (BASELINE, "v2", "v3"), "v3")
        pq = prepare_query(ontology, parse_concept(args.query))
        answer = retrieve_instances(
            ontology, pq, mode, workers=args.workers, budget=_budget(args)
        )
        for member in sorted(answer.members):
            print(member, file=out)
        print(_summary(answer), file=err)
    elif args.command == "gen":
        config = GenConfig(
            seed=args.seed,
            scale=args.scale,
            fanout=args.fanout,
            cycle_rate=args.cycle_rate,
            trigger_fraction=args.trigger_fraction,
        )
        text = serialize_ontology(generate(config))
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        else:
            out.write(text)
    elif args.command == "stats":
        ontology = _read_ontology(args.ontology)
        mode = _mode(args, MODES, "v1")
        gate = consistency_gate(ontology, _budget(args))
        if not gate.consistent:
            print("ontology is inconsistent", file=err)
            return EXIT_INCONSISTENT
        if args.query is not None:
            pq = prepare_query(ontology, parse_concept(args.query))
            target, analysis = pq.rolling_ontology, pq.analysis
        else:
            simple = _simple(ontology)
            target, analysis = simple, analyze(simple.tbox)
        report = stats(target, analysis, mode, budget=_budget(args))
        print(report.header(), file=out)
        print(report.row(), file=out)
        print(f"wall_ms={report.wall_ms:.1f}", file=err)
        if args.figures:
            from .plots import render_stats_figure

            path = render_stats_figure([report], args.figures)
            print(f"figure written to {path}", file=err)
    elif args.command == "bench":
        scales = [int(s) for s in args.scales.split(",") if s]
        modes = [m for m in args.modes.split(",") if m]
        for m in modes:
            if m not in (BASELINE, "v2", "v3"):
                raise UsageError(f"unknown mode {m!r}")
        if args.query:
            queries = [parse_concept(q) for q in args.query]
        else:
            queries = suite_queries()
        config = GenConfig(
            seed=args.seed,
            fanout=args.fanout,
            cycle_rate=args.cycle_rate,
            trigger_fraction=args.trigger_fraction,
        )
        rows, _ = bench(
            config, queries, modes, workers=args.workers, budget=_budget(args), scales=scales
        )
        print(BenchRow.header(), file=out)
        for row in rows:
            print(row.row(), file=out)
        if args.figures:
            from .plots import render_bench_figure

            path = render_bench_figure(rows, args.figures)
            print(f"figure written to {path}", file=err)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, UnknownNameError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitExceeded, RollBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())

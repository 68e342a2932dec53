"""Command-line workbench.

    slotq run        --trace f.qtrace --algo grq|greedy [--out F --format csv|json]
    slotq oracle     --trace f.qtrace --algo bounded|unbounded [--max-nodes N]
    slotq charge     --trace f.qtrace [--enumerate K] [--max-nodes N]
    slotq gen        killer --b 10 --eps 1/10 [--out F]
    slotq gen        random --n 8 --horizon 6 --b 2 --seed 1 [--max-weight 16]
    slotq search     --n 8 --b 3 --horizon 8 --seed 1 --iters 1000
    slotq experiment --config exp.json [--out F --format csv|json]

Exit codes: 0 every check passed, 1 a property violation was found (that is
the interesting outcome — the trace involved is printed or persisted),
2 usage or configuration problems, including oracle budget overruns.
"""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .charging import ChargeConstructionError, build_charge_map, verify_charge_map
from .experiment import (
    ConfigError,
    load_config,
    report_to_csv,
    report_to_json,
    run_experiment,
    trace_digest,
)
from .generate import GeneratorParams, gen_killer, gen_random
from .model import InvalidTraceError, Transcript, check_transcript_invariants
from .oracle import (
    DEFAULT_NODE_BUDGET,
    BudgetExceededError,
    enumerate_feasible,
    optimal_bounded,
    optimal_unbounded,
    relax_capacity,
    verify_schedule,
)
from .schedulers import check_slot_monotonicity, run_grq, run_naive_greedy
from .traceio import TraceSyntaxError, emit_trace, format_weight, load_trace


def _emit(text: str, out: "str | None") -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _transcript_rows(transcript: Transcript) -> list[dict]:
    rows = []
    for rec in transcript.steps:
        rows.append({
            "step": rec.time,
            "arrivals": " ".join(map(str, rec.arrivals)),
            "transmitted": "" if rec.transmitted is None else rec.transmitted,
            "weight": format_weight(transcript.transmitted_weight(rec.time)),
            "rejections": " ".join(f"{r.packet_id}:{r.cause}" for r in rec.rejections),
        })
    return rows


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _cmd_run(args) -> int:
    trace = load_trace(args.trace)
    runner = run_grq if args.algo == "grq" else run_naive_greedy
    transcript = runner(trace)
    violations = check_transcript_invariants(transcript)
    if args.algo == "grq":
        violations += check_slot_monotonicity(transcript)
    rows = _transcript_rows(transcript)
    if args.format == "json":
        text = json.dumps(
            {"rows": rows, "total": format_weight(transcript.total_weight),
             "violations": violations},
            indent=2,
        ) + "\n"
    else:
        text = _rows_to_csv(rows)
    _emit(text, args.out)
    print(f"{args.algo} total: {format_weight(transcript.total_weight)}")
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return 1 if violations else 0


def _cmd_oracle(args) -> int:
    trace = load_trace(args.trace)
    if args.algo == "bounded":
        schedule = optimal_bounded(trace, max_nodes=args.max_nodes)
        violations = verify_schedule(trace, schedule)
    else:
        schedule = optimal_unbounded(trace)
        violations = verify_schedule(relax_capacity(trace), schedule)
    rows = [
        {"packet": pid, "step": t,
         "weight": format_weight(trace.by_id[pid].weight)}
        for pid, t in sorted(schedule.assignment.items())
    ]
    if args.format == "json":
        text = json.dumps(
            {"rows": rows, "value": format_weight(schedule.value),
             "violations": violations},
            indent=2,
        ) + "\n"
    else:
        text = _rows_to_csv(rows)
    _emit(text, args.out)
    print(f"{args.algo} optimum: {format_weight(schedule.value)}")
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return 1 if violations else 0


def _check_one_adversary(grq, adv) -> tuple[list[str], "object"]:
    try:
        report = verify_charge_map(build_charge_map(grq, adv), grq, adv)
    except ChargeConstructionError as e:
        return [f"construction: {e}"], None
    return report.failures(), report


def _cmd_charge(args) -> int:
    trace = load_trace(args.trace)
    grq = run_grq(trace)
    adv = optimal_bounded(trace, max_nodes=args.max_nodes)
    failures, report = _check_one_adversary(grq, adv)
    if report is not None:
        for c in report.checks:
            print(f"check {c.number} {c.name}: {'pass' if c.passed else 'FAIL'}")
        print(
            f"adversary value {format_weight(report.adversary_value)}, "
            f"slot-queue value {format_weight(report.grq_value)}"
        )
    for f in failures:
        print(f"violation: {f}", file=sys.stderr)

    enum_failures: list[str] = []
    if args.enumerate:
        schedules = enumerate_feasible(trace, args.enumerate)
        for i, alt in enumerate(schedules):
            fs, _ = _check_one_adversary(grq, alt)
            enum_failures += [f"adversary {i}: {f}" for f in fs]
        print(f"enumerated adversaries checked: {len(schedules)}, "
              f"failures: {len(enum_failures)}")
        for f in enum_failures:
            print(f"violation: {f}", file=sys.stderr)

    if args.out is not None and report is not None:
        payload = {
            "checks": [
                {"number": c.number, "name": c.name, "passed": c.passed,
                 "violations": list(c.violations)}
                for c in report.checks
            ],
            "adversary_value": format_weight(report.adversary_value),
            "grq_value": format_weight(report.grq_value),
        }
        if args.format == "json":
            _emit(json.dumps(payload, indent=2) + "\n", args.out)
        else:
            rows = [
                {"check": c["number"], "name": c["name"],
                 "result": "pass" if c["passed"] else "fail",
                 "violations": " | ".join(c["violations"])}
                for c in payload["checks"]
            ]
            _emit(_rows_to_csv(rows), args.out)
    return 1 if failures or enum_failures else 0


def _cmd_gen(args) -> int:
    if args.kind == "killer":
        trace = gen_killer(args.b, args.eps)
    else:
        params = GeneratorParams(
            n=args.n, horizon=args.horizon, buffer_size=args.b, seed=args.seed,
            max_weight=args.max_weight, max_span=args.max_span, burst=args.burst,
        )
        trace = gen_random(params)
    _emit(emit_trace(trace), args.out)
    return 0


def _cmd_search(args) -> int:
    from .search import adversarial_search  # local import: keeps startup light

    params = GeneratorParams(
        n=args.n, horizon=args.horizon, buffer_size=args.b, seed=args.seed,
        max_weight=args.max_weight,
    )
    result = adversarial_search(params, args.iters, max_nodes=args.max_nodes)
    print(f"iterations: {result.iterations}, evaluated: {result.evaluated}, "
          f"skipped on budget: {result.skipped}")
    print(f"worst ratio: {format_weight(result.ratio)}")
    if result.trace is not None:
        print(f"worst trace digest: {trace_digest(result.trace)}")
        if args.out is not None:
            _emit(emit_trace(result.trace), args.out)
    if result.ratio > 2:
        print("violation: ratio exceeds 2 — counterexample found", file=sys.stderr)
        return 1
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    report = run_experiment(config, counterexample_dir=args.counterexamples)
    text = report_to_json(report) if args.format == "json" else report_to_csv(report)
    _emit(text, args.out)
    if args.out is not None:
        mr = "" if report.max_ratio is None else format_weight(report.max_ratio)
        print(f"traces: {len(report.rows)}, max ratio: {mr}, "
              f"violations: {report.violation_count}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slotq",
        description="Slot-queue packet scheduling workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--out", help="write machine-readable output to this file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("run", help="run a scheduler over a qtrace file")
    p.add_argument("--trace", required=True)
    p.add_argument("--algo", choices=("grq", "greedy"), default="grq")
    add_output(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("oracle", help="exact offline optimum of a qtrace file")
    p.add_argument("--trace", required=True)
    p.add_argument("--algo", choices=("bounded", "unbounded"), default="bounded")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_NODE_BUDGET)
    add_output(p)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("charge", help="build and verify the charge map")
    p.add_argument("--trace", required=True)
    p.add_argument("--enumerate", type=int, default=0, metavar="K",
                   help="also verify against up to K enumerated feasible adversaries")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_NODE_BUDGET)
    add_output(p)
    p.set_defaults(fn=_cmd_charge)

    p = sub.add_parser("gen", help="emit a generated qtrace")
    gsub = p.add_subparsers(dest="kind", required=True)
    k = gsub.add_parser("killer", help="greedy-sinking burst instance")
    k.add_argument("--b", type=int, required=True)
    k.add_argument("--eps", type=Fraction, required=True)
    k.add_argument("--out")
    k.set_defaults(fn=_cmd_gen)
    r = gsub.add_parser("random", help="seeded random instance")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--horizon", type=int, required=True)
    r.add_argument("--b", type=int, required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-weight", type=int, default=16)
    r.add_argument("--max-span", type=int, default=None)
    r.add_argument("--burst", type=Fraction, default=Fraction(0))
    r.add_argument("--out")
    r.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("search", help="adversarial search for high ratios")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--max-weight", type=int, default=16)
    p.add_argument("--max-nodes", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--out", help="write the worst trace found as qtrace")
    p.set_defaults(fn=_cmd_search)

    p = sub.add_parser("experiment", help="run a config-driven experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--counterexamples", help="persist failing traces here")
    add_output(p)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (TraceSyntaxError, InvalidTraceError, ConfigError,
            BudgetExceededError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Experiment harness: run the full pipeline over generated traces.

A config (JSON file or equivalent dict) names trace sources and what to run
on each: both schedulers, both oracles, the structural checks, and the charge
verifier against the bounded optimum.  Example:

    {
      "traces": [
        {"kind": "random", "count": 100, "seed": 7,
         "n": 8, "horizon": 6, "buffer_size": 3, "max_weight": 16},
        {"kind": "killer", "buffer_size": 10, "eps": "1/10"}
      ],
      "algorithms": ["grq", "greedy"],
      "oracles": ["bounded", "unbounded"],
      "verify": true,
      "max_nodes": 2000000,
      "counterexample_dir": null
    }

Every row is a pure function of the config (seeds included).  Ratios are
exact rationals end to end; serialization writes them as num/den.  Any
violation — structural, monotonicity, or charging — marks the row failed,
and when a counterexample directory is configured the offending trace is
persisted there with its violations, because a failing instance is the most
valuable output this tool can produce.
"""

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .charging import ChargeConstructionError, build_charge_map, verify_charge_map
from .generate import GeneratorParams, gen_killer, gen_random
from .model import Trace, check_transcript_invariants
from .oracle import (
    DEFAULT_NODE_BUDGET,
    BudgetExceededError,
    optimal_bounded,
    optimal_unbounded,
    relax_capacity,
    verify_schedule,
)
from .schedulers import check_slot_monotonicity, run_grq, run_naive_greedy
from .traceio import emit_trace, format_weight


class ConfigError(ValueError):
    """Malformed experiment config."""


@dataclass(frozen=True)
class ExperimentRow:
    index: int
    digest: str
    n: int
    buffer_size: int
    grq_value: "Fraction | None"
    greedy_value: "Fraction | None"
    bounded_value: "Fraction | None"
    unbounded_value: "Fraction | None"
    ratio: "Fraction | None"  # bounded optimum / grq
    charging: str  # "pass" | "fail" | "skipped"
    violations: tuple[str, ...]

    @property
    def failed(self) -> bool:
        return bool(self.violations) or self.charging == "fail"


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ExperimentRow, ...]
    max_ratio: "Fraction | None"
    mean_ratio: "Fraction | None"
    violation_count: int

    @property
    def passed(self) -> bool:
        return self.violation_count == 0


def load_config(path: "str | Path") -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    return config


def _traces_from_config(config: dict) -> list[Trace]:
    sources = config.get("traces", [])
    if not isinstance(sources, list):
        raise ConfigError("'traces' must be a list")
    out: list[Trace] = []
    for i, source in enumerate(sources):
        if not isinstance(source, dict) or "kind" not in source:
            raise ConfigError(f"trace source {i}: expected an object with a 'kind'")
        kind = source["kind"]
        try:
            if kind == "random":
                count = int(source.get("count", 1))
                seed = int(source.get("seed", 0))
                base = dict(
                    n=int(source["n"]),
                    horizon=int(source["horizon"]),
                    buffer_size=int(source["buffer_size"]),
                    max_weight=int(source.get("max_weight", 16)),
                    max_span=source.get("max_span"),
                    burst=Fraction(source.get("burst", 0)),
                )
                out.extend(
                    gen_random(GeneratorParams(seed=seed + k, **base))
                    for k in range(count)
                )
            elif kind == "killer":
                out.append(gen_killer(int(source["buffer_size"]), Fraction(source["eps"])))
            else:
                raise ConfigError(f"trace source {i}: unknown kind {kind!r}")
        except (KeyError, ValueError, TypeError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"trace source {i}: {e}") from e
    return out


def trace_digest(trace: Trace) -> str:
    return hashlib.sha256(emit_trace(trace).encode()).hexdigest()[:12]


def evaluate_trace(
    trace: Trace,
    index: int = 0,
    algorithms: tuple[str, ...] = ("grq", "greedy"),
    oracles: tuple[str, ...] = ("bounded", "unbounded"),
    verify: bool = True,
    max_nodes: int = DEFAULT_NODE_BUDGET,
) -> ExperimentRow:
    """Run the selected components on one trace and collect every violation."""
    violations: list[str] = []
    grq_value = greedy_value = bounded_value = unbounded_value = ratio = None
    charging = "skipped"

    grq = None
    if "grq" in algorithms:
        grq = run_grq(trace)
        grq_value = grq.total_weight
        violations += [f"transcript: {v}" for v in check_transcript_invariants(grq)]
        violations += [f"monotonicity: {v}" for v in check_slot_monotonicity(grq)]
    if "greedy" in algorithms:
        greedy = run_naive_greedy(trace)
        greedy_value = greedy.total_weight
        violations += [f"greedy transcript: {v}" for v in check_transcript_invariants(greedy)]

    bounded = None
    if "bounded" in oracles:
        bounded = optimal_bounded(trace, max_nodes=max_nodes)
        bounded_value = bounded.value
        violations += [f"bounded oracle: {v}" for v in verify_schedule(trace, bounded)]
    if "unbounded" in oracles:
        unbounded = optimal_unbounded(trace)
        unbounded_value = unbounded.value
        violations += [
            f"unbounded oracle: {v}"
            for v in verify_schedule(relax_capacity(trace), unbounded)
        ]
        if bounded is not None and bounded.value > unbounded.value:
            violations.append(
                f"oracle order: bounded {bounded.value} > unbounded {unbounded.value}"
            )

    if grq is not None and bounded is not None:
        if grq_value == 0:
            ratio = Fraction(1)
            if bounded_value > 0:
                violations.append(f"GRQ sent nothing against optimum {bounded_value}")
        else:
            ratio = bounded_value / grq_value
        if bounded_value > 2 * grq_value:
            violations.append(
                f"ratio: optimum {bounded_value} exceeds twice GRQ value {grq_value}"
            )
        if verify:
            try:
                report = verify_charge_map(build_charge_map(grq, bounded), grq, bounded)
                charging = "pass" if report.passed else "fail"
                violations += [f"charging: {f}" for f in report.failures()]
            except ChargeConstructionError as e:
                charging = "fail"
                violations.append(f"charging construction: {e}")

    return ExperimentRow(
        index=index,
        digest=trace_digest(trace),
        n=len(trace.packets),
        buffer_size=trace.buffer_size,
        grq_value=grq_value,
        greedy_value=greedy_value,
        bounded_value=bounded_value,
        unbounded_value=unbounded_value,
        ratio=ratio,
        charging=charging,
        violations=tuple(violations),
    )


def run_experiment(config: dict, counterexample_dir: "str | Path | None" = None) -> ExperimentReport:
    """Evaluate every configured trace; deterministic for a fixed config.

    A BudgetExceededError from the exact oracle propagates — the config asked
    for an instance the budget cannot certify, which is a config problem, not
    a data point.
    """
    algorithms = tuple(config.get("algorithms", ("grq", "greedy")))
    oracles = tuple(config.get("oracles", ("bounded", "unbounded")))
    for a in algorithms:
        if a not in ("grq", "greedy"):
            raise ConfigError(f"unknown algorithm {a!r}")
    for o in oracles:
        if o not in ("bounded", "unbounded"):
            raise ConfigError(f"unknown oracle {o!r}")
    verify = bool(config.get("verify", True))
    max_nodes = int(config.get("max_nodes", DEFAULT_NODE_BUDGET))
    ce_dir = counterexample_dir or config.get("counterexample_dir")

    traces = _traces_from_config(config)
    rows: list[ExperimentRow] = []
    for i, trace in enumerate(traces):
        row = evaluate_trace(
            trace, index=i, algorithms=algorithms, oracles=oracles,
            verify=verify, max_nodes=max_nodes,
        )
        rows.append(row)
        if row.failed and ce_dir is not None:
            _persist_counterexample(Path(ce_dir), trace, row)

    ratios = [r.ratio for r in rows if r.ratio is not None]
    max_ratio = max(ratios) if ratios else None
    mean_ratio = sum(ratios, Fraction(0)) / len(ratios) if ratios else None
    return ExperimentReport(
        rows=tuple(rows),
        max_ratio=max_ratio,
        mean_ratio=mean_ratio,
        violation_count=sum(1 for r in rows if r.failed),
    )


def _persist_counterexample(directory: Path, trace: Trace, row: ExperimentRow) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    stem = directory / f"trace-{row.index:05d}-{row.digest}"
    stem.with_suffix(".qtrace").write_text(emit_trace(trace))
    stem.with_suffix(".violations.txt").write_text(
        "\n".join(row.violations) + "\n" if row.violations else "charging failed\n"
    )


# --- serialization ---------------------------------------------------------

def _cell(value: "Fraction | None") -> str:
    return "" if value is None else format_weight(value)


_COLUMNS = (
    "index", "digest", "n", "buffer_size", "grq", "greedy",
    "bounded_opt", "unbounded_opt", "ratio", "charging", "violations",
)


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COLUMNS)
    for r in report.rows:
        w.writerow([
            r.index, r.digest, r.n, r.buffer_size,
            _cell(r.grq_value), _cell(r.greedy_value),
            _cell(r.bounded_value), _cell(r.unbounded_value),
            _cell(r.ratio), r.charging, " | ".join(r.violations),
        ])
    w.writerow([])
    w.writerow([
        "aggregate", "", len(report.rows), "", "", "", "",
        "", _cell(report.max_ratio), f"mean={_cell(report.mean_ratio)}",
        f"violations={report.violation_count}",
    ])
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    payload = {
        "rows": [
            {
                "index": r.index,
                "digest": r.digest,
                "n": r.n,
                "buffer_size": r.buffer_size,
                "grq": _cell(r.grq_value),
                "greedy": _cell(r.greedy_value),
                "bounded_opt": _cell(r.bounded_value),
                "unbounded_opt": _cell(r.unbounded_value),
                "ratio": _cell(r.ratio),
                "charging": r.charging,
                "violations": list(r.violations),
            }
            for r in report.rows
        ],
        "aggregate": {
            "traces": len(report.rows),
            "max_ratio": _cell(report.max_ratio),
            "mean_ratio": _cell(report.mean_ratio),
            "violations": report.violation_count,
        },
    }
    return json.dumps(payload, indent=2) + "\n"

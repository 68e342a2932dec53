"""Adversarial search for high offline-vs-online ratios.

Seeded random restarts mixed with small mutations of the best instance found
so far (nudge one packet's weight, deadline, or release).  The score of a
candidate is bounded-optimum value over slot-queue value, computed exactly.
The search never clips or hides a score: if an instance ever scored above 2
it would be returned as found — that would be a counterexample to the
competitiveness bound, which is precisely what the search exists to hunt for.

Candidates whose exact oracle run exceeds its node budget are skipped and
counted; they are never scored approximately.
"""

from dataclasses import dataclass, replace
from fractions import Fraction

from .generate import GeneratorParams, SplitMix64, gen_random
from .model import Packet, Trace, validate_trace
from .oracle import BudgetExceededError, optimal_bounded
from .schedulers import run_grq

ONE = Fraction(1)


@dataclass(frozen=True)
class SearchResult:
    trace: "Trace | None"
    ratio: Fraction
    iterations: int
    evaluated: int
    skipped: int  # candidates abandoned on oracle budget


def competitive_ratio(trace: Trace, max_nodes: "int | None" = None) -> Fraction:
    """Exact bounded-OPT / slot-queue ratio for one instance.

    Both values are zero only together (if anything of positive weight exists,
    the slot queue sends something positive), and 0/0 counts as ratio 1.
    """
    kwargs = {} if max_nodes is None else {"max_nodes": max_nodes}
    opt = optimal_bounded(trace, **kwargs).value
    online = run_grq(trace).total_weight
    if online == 0:
        assert opt == 0, "online total 0 against positive optimum"
        return ONE
    return opt / online


def _mutate(trace: Trace, rng: SplitMix64, params: GeneratorParams) -> Trace:
    """One small random edit; always returns a valid trace."""
    packets = list(trace.packets)
    if not packets:
        return trace
    i = rng.below(len(packets))
    p = packets[i]
    op = rng.below(3)
    if op == 0:
        p = replace(p, weight=Fraction(1 + rng.below(params.max_weight)))
    elif op == 1:
        span = params.horizon - p.release
        p = replace(p, deadline=p.release + rng.below(span + 1))
    else:
        release = 1 + rng.below(params.horizon)
        deadline = release + rng.below(params.horizon - release + 1)
        p = replace(p, release=release, deadline=deadline)
    packets[i] = p
    return validate_trace(trace.buffer_size, packets)


def adversarial_search(
    params: GeneratorParams,
    iterations: int,
    max_nodes: "int | None" = None,
    restart_every: int = 4,
) -> SearchResult:
    """Hunt for the worst ratio reachable within the parameter box.

    Every `restart_every`-th candidate is a fresh random trace; the others
    mutate the best instance so far.  Deterministic for fixed inputs.
    """
    if iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    if restart_every < 1:
        raise ValueError(f"restart_every must be >= 1, got {restart_every}")
    rng = SplitMix64(params.seed)
    best_trace: Trace | None = None
    best_ratio = ONE
    evaluated = skipped = 0
    for it in range(iterations):
        if best_trace is None or it % restart_every == 0:
            candidate = gen_random(replace(params, seed=rng.next_u64()))
        else:
            candidate = _mutate(best_trace, rng, params)
        try:
            ratio = competitive_ratio(candidate, max_nodes)
        except BudgetExceededError:
            skipped += 1
            continue
        evaluated += 1
        if best_trace is None or ratio > best_ratio:
            best_trace, best_ratio = candidate, ratio
    return SearchResult(best_trace, best_ratio, iterations, evaluated, skipped)

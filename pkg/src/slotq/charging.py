"""Charge-map construction and verification for slot-queue transcripts.

The 2-competitiveness argument maps every adversary transmission onto a GRQ
transmission step so that no step absorbs more than twice the weight it sent.
Given a GRQ transcript and any feasible adversary schedule, each adversary
send (t, x) is classified:

  S (self):     GRQ sent the same packet x at an earlier step; charge that step.
  D (downward): w(x) <= weight GRQ sent at t (idle counts as 0); charge step t.
  F (forward):  otherwise.  GRQ must have rejected x at some step t0 with
                t0 + B <= t and a buffer full of >=w(x) packets — that is the
                rejection-window property, and its absence is a verifier
                failure, not a recoverable condition.

S and D targets are forced.  F-charges are placed afterwards: groups in
ascending rejection time t0, within a group in ascending adversary send time,
each onto the earliest GRQ transmission step >= t0 that holds fewer than two
charges so far.  Placements are never revised, and a placement falling outside
[t0, t0 + B - 1] raises immediately — the induction behind the proof says it
cannot happen, so an escape would be either an implementation bug or a genuine
counterexample, and both must surface loudly.

verify_charge_map then re-checks everything from scratch — the seven checks
below — without trusting how the map was built, so tampered maps fail too.
"""

from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property

from .model import Trace, Transcript, ZERO
from .oracle import OfflineSchedule, verify_schedule

S_CHARGE = "S"
D_CHARGE = "D"
F_CHARGE = "F"


class ChargeConstructionError(RuntimeError):
    """The charge map the proof promises could not be built for this instance."""


@dataclass(frozen=True)
class Charge:
    """One adversary send (source_time, source_id) mapped onto GRQ step `target`.

    F-charges carry the GRQ rejection step of the packet; classification
    leaves their target None until placement assigns it.
    """

    kind: str
    source_time: int
    source_id: int
    target: "int | None"
    rejection_time: "int | None" = None

    def __post_init__(self):
        assert self.kind in (S_CHARGE, D_CHARGE, F_CHARGE)


@dataclass(frozen=True)
class ChargeMap:
    charges: tuple["Charge", ...]

    @cached_property
    def by_target(self) -> dict["int | None", tuple["Charge", ...]]:
        out: dict[int | None, list[Charge]] = {}
        for c in self.charges:
            out.setdefault(c.target, []).append(c)
        return {t: tuple(cs) for t, cs in out.items()}

    def count_at(self, target: int) -> int:
        return len(self.by_target.get(target, ()))

    def of_kind(self, kind: str) -> tuple["Charge", ...]:
        return tuple(c for c in self.charges if c.kind == kind)


def classify_charges(grq: Transcript, adv: OfflineSchedule) -> tuple[Charge, ...]:
    """Assign a charge kind to every adversary send, in send-time order.

    S and D charges come back with their (forced) targets; F charges carry
    their rejection time and an unassigned target.  Raises
    ChargeConstructionError if an F-classified packet has no recorded GRQ
    rejection — the rejection-window property says it must have one.

    A zero-weight adversary send at a GRQ-idle step classifies as D targeting
    the idle step; the charge is vacuous (0 <= 2*0) and at most one adversary
    send exists per step, so idle targets never absorb real weight.
    """
    errs = verify_schedule(grq.trace, adv)
    assert not errs, f"adversary schedule infeasible: {errs}"
    trace = grq.trace
    out: list[Charge] = []
    for t in sorted(adv.by_time):
        pid = adv.by_time[t]
        x = trace.by_id[pid]
        sent_at = grq.send_time.get(pid)
        if sent_at is not None and sent_at < t:
            out.append(Charge(S_CHARGE, t, pid, target=sent_at))
        elif x.weight <= grq.transmitted_weight(t):
            out.append(Charge(D_CHARGE, t, pid, target=t))
        else:
            # x outweighs GRQ's send at t, so GRQ cannot still hold x (the
            # front packet is heaviest) and never sent it: it was rejected.
            assert sent_at is None
            rec = grq.rejected_at.get(pid)
            if rec is None:
                raise ChargeConstructionError(
                    f"packet {pid} needs an F-charge at t={t} but GRQ never "
                    f"rejected it — rejection-window property violated"
                )
            out.append(Charge(F_CHARGE, t, pid, target=None, rejection_time=rec[0]))
    return tuple(out)


def assign_f_charges(grq: Transcript, classified: tuple[Charge, ...]) -> ChargeMap:
    """Place every F-charge; S/D targets are installed first and never move.

    All fixed S/D charges count toward slot availability from the start, even
    ones whose adversary time lies beyond the group being processed — the
    two-per-step cap must hold against the finished map, so placement has to
    see them.  Groups go in ascending rejection time; within a group,
    ascending adversary send time.  Each F-charge takes the earliest GRQ
    transmission step >= its rejection time with fewer than two charges;
    landing after rejection_time + B - 1 (or nowhere) is a construction
    failure.
    """
    counts: Counter[int] = Counter()
    fixed: list[Charge] = []
    pending: list[Charge] = []
    for c in classified:
        if c.kind == F_CHARGE:
            assert c.rejection_time is not None
            pending.append(c)
        else:
            assert c.target is not None
            counts[c.target] += 1
            fixed.append(c)

    send_steps = [rec.time for rec in grq.steps if rec.transmitted is not None]
    bsize = grq.trace.buffer_size
    placed: list[Charge] = []
    for c in sorted(pending, key=lambda c: (c.rejection_time, c.source_time)):
        t0 = c.rejection_time
        target = next(
            (s for s in send_steps if s >= t0 and counts[s] < 2), None
        )
        if target is None or target > t0 + bsize - 1:
            raise ChargeConstructionError(
                f"F-charge for packet {c.source_id} (adversary t={c.source_time}, "
                f"rejected t0={t0}) found no transmission step with spare capacity "
                f"in [{t0}, {t0 + bsize - 1}]; earliest available: {target}"
            )
        counts[target] += 1
        placed.append(replace(c, target=target))
    return ChargeMap(tuple(fixed) + tuple(placed))


def build_charge_map(grq: Transcript, adv: OfflineSchedule) -> ChargeMap:
    return assign_f_charges(grq, classify_charges(grq, adv))


# --- verification ----------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ChargeReport:
    checks: tuple[CheckResult, ...]
    adversary_value: Fraction
    grq_value: Fraction

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [
            f"check {c.number} ({c.name}): {v}"
            for c in self.checks
            for v in c.violations
        ]


def verify_charge_map(
    cmap: ChargeMap, grq: Transcript, adv: OfflineSchedule
) -> ChargeReport:
    """Re-check a charge map against the transcripts; seven independent checks.

    1. coverage: every adversary send is the source of exactly one charge.
    2. capacity: no target step carries more than two charges.
    3. domination: each source weight <= the weight GRQ sent at its target.
    4. forward window: every F-charge has rejection_time + B <= source time
       and a target within [rejection_time, rejection_time + B - 1].
    5. rejection evidence: each F-charged packet was recorded rejected at its
       rejection_time, with every occupied post-rebuild slot there weighing
       at least the packet.
    6. counting: at each rejection step with F-activity the two window
       inequalities hold (in-window sources, and later sources, each fit in B).
    7. headline: adversary value <= 2 x GRQ value.

    Nothing is trusted from construction; a tampered map fails the relevant
    check rather than crashing the verifier.
    """
    trace: Trace = grq.trace
    bsize = trace.buffer_size

    # 1: coverage of adversary sends, exactly once each
    v1: list[str] = []
    sends = {(t, pid) for t, pid in adv.by_time.items()}
    sources = Counter((c.source_time, c.source_id) for c in cmap.charges)
    for t, pid in sorted(sends):
        n = sources.get((t, pid), 0)
        if n != 1:
            v1.append(f"adversary send ({t}, packet {pid}) has {n} charges")
    for (t, pid), n in sorted(sources.items()):
        if (t, pid) not in sends:
            v1.append(f"charge source ({t}, packet {pid}) is not an adversary send")

    # 2: at most two charges per target step
    v2: list[str] = []
    per_target = Counter(c.target for c in cmap.charges if c.target is not None)
    for t in sorted(t for t, n in per_target.items() if n > 2):
        v2.append(f"target step {t} carries {per_target[t]} charges")

    # 3: weight domination per charge
    v3: list[str] = []
    horizon = trace.horizon
    for c in cmap.charges:
        if c.target is None or not 1 <= c.target <= horizon:
            v3.append(f"{c.kind}-charge from packet {c.source_id}: bad target {c.target}")
            continue
        sw = trace.by_id[c.source_id].weight
        tw = grq.transmitted_weight(c.target)
        if sw > tw:
            v3.append(
                f"{c.kind}-charge from packet {c.source_id} (w={sw}) "
                f"lands on step {c.target} which sent only w={tw}"
            )

    # 4: forward-window arithmetic on F-charges
    v4: list[str] = []
    f_charges = cmap.of_kind(F_CHARGE)
    for c in f_charges:
        t0 = c.rejection_time
        if t0 is None:
            v4.append(f"F-charge from packet {c.source_id} lacks a rejection time")
            continue
        if t0 + bsize > c.source_time:
            v4.append(
                f"F-charge from packet {c.source_id}: rejection {t0} + B={bsize} "
                f"> adversary time {c.source_time}"
            )
        if c.target is None or not t0 <= c.target <= t0 + bsize - 1:
            v4.append(
                f"F-charge from packet {c.source_id}: target {c.target} outside "
                f"[{t0}, {t0 + bsize - 1}]"
            )

    # 5: the rejection-time buffer really was uniformly >= the charged weight
    v5: list[str] = []
    for c in f_charges:
        t0 = c.rejection_time
        if t0 is None or not 1 <= t0 <= horizon:
            v5.append(f"F-charge from packet {c.source_id}: no usable rejection step")
            continue
        recorded = grq.rejected_at.get(c.source_id)
        if recorded is None or recorded[0] != t0:
            v5.append(
                f"F-charge from packet {c.source_id}: transcript records rejection "
                f"{recorded}, charge claims t0={t0}"
            )
            continue
        w = trace.by_id[c.source_id].weight
        buf = grq.step(t0).slots
        assert buf is not None
        for label, p in buf.occupied():
            if p.weight < w:
                v5.append(
                    f"F-charge from packet {c.source_id} (w={w}): slot {label} at "
                    f"t0={t0} holds packet {p.id} with smaller weight {p.weight}"
                )

    # 6: the two counting inequalities at every rejection step with F-activity
    v6: list[str] = []
    groups: dict[int, list[Charge]] = {}
    for c in f_charges:
        if c.rejection_time is not None:
            groups.setdefault(c.rejection_time, []).append(c)
    s_charges = cmap.of_kind(S_CHARGE)
    d_charges = cmap.of_kind(D_CHARGE)
    for t0 in sorted(groups):
        hi = t0 + bsize - 1
        in_win = lambda s: t0 <= s <= hi  # noqa: E731

        d_n = sum(1 for c in d_charges if c.target is not None and in_win(c.target))
        s_in = [c for c in s_charges if c.target is not None and in_win(c.target)]
        s1 = sum(1 for c in s_in if in_win(c.source_time))
        s2 = len(s_in) - s1
        earlier = [
            c for c in f_charges
            if c.rejection_time is not None and c.rejection_time < t0
            and c.target is not None and c.target >= t0
        ]
        g1 = sum(1 for c in earlier if in_win(c.source_time))
        g2 = len(earlier) - g1
        f_n = len(groups[t0])

        if g1 + d_n + s1 > bsize:
            v6.append(
                f"t0={t0}: in-window sources {g1}+{d_n}+{s1} "
                f"(carried-F + D + same-window-S) exceed B={bsize}"
            )
        if g2 + f_n + s2 > bsize:
            v6.append(
                f"t0={t0}: later sources {g2}+{f_n}+{s2} "
                f"(carried-F + new-F + later-S) exceed B={bsize}"
            )

    # 7: the headline bound
    v7: list[str] = []
    grq_value = grq.total_weight
    if adv.value > 2 * grq_value:
        v7.append(f"adversary value {adv.value} > 2 x GRQ value {grq_value}")

    checks = (
        CheckResult(1, "coverage", tuple(v1)),
        CheckResult(2, "two-per-target", tuple(v2)),
        CheckResult(3, "weight-domination", tuple(v3)),
        CheckResult(4, "forward-window", tuple(v4)),
        CheckResult(5, "rejection-evidence", tuple(v5)),
        CheckResult(6, "window-counting", tuple(v6)),
        CheckResult(7, "twice-value-bound", tuple(v7)),
    )
    return ChargeReport(checks, adversary_value=adv.value, grq_value=grq_value)

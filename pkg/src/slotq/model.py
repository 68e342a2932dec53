"""Data model for deadline packet scheduling in a size-limited buffer.

Time is discrete, starting at t = 1, and every step has two stages: packets
whose release time equals t arrive and admission decisions are made, then at
most one packet is transmitted.  A packet earns its weight only if it is sent
at some step within [release, deadline]; afterwards it is worthless.

Weights are exact rationals (fractions.Fraction).  The charge-map verifier
needs exact weight comparisons, so nothing in this package goes through
floating point.

The slot-queue scheduler names buffer positions after absolute time steps: a
buffer of size B at time t exposes the labels t..t+B-1 and transmits from the
slot labeled t.  SlotBuffer is one such labeled snapshot; Transcript is the
full per-step record an algorithm run leaves behind.

All types here are immutable values; the operations are pure functions, so
distinct traces can be processed concurrently without coordination.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Literal

# Rejection causes recorded in transcripts.
ADMISSION_REFUSED = "admission-refused"  # arrival found no usable slot
PREEMPTED = "preempted"                  # buffered packet squeezed out at a rebuild
EXPIRED = "expired"                      # buffered packet reached its deadline unsent

Phase = Literal["post-rebuild", "post-transmit"]

ZERO = Fraction(0)


@dataclass(frozen=True)
class Packet:
    """One unit-size packet: worth `weight` if sent during [release, deadline]."""

    id: int
    release: int
    deadline: int
    weight: Fraction

    def __post_init__(self):
        if not isinstance(self.weight, Fraction):
            object.__setattr__(self, "weight", Fraction(self.weight))


@dataclass(frozen=True)
class Trace:
    """A complete problem instance: buffer capacity plus every packet that will arrive."""

    buffer_size: int
    packets: tuple[Packet, ...]

    def __post_init__(self):
        object.__setattr__(self, "packets", tuple(self.packets))

    @cached_property
    def horizon(self) -> int:
        """Last step worth simulating: the maximum deadline (0 for an empty trace)."""
        return max((p.deadline for p in self.packets), default=0)

    @cached_property
    def by_id(self) -> dict[int, Packet]:
        return {p.id: p for p in self.packets}

    @cached_property
    def _arrivals(self) -> dict[int, tuple[Packet, ...]]:
        out: dict[int, list[Packet]] = {}
        for p in self.packets:
            out.setdefault(p.release, []).append(p)
        return {t: tuple(ps) for t, ps in out.items()}

    def arrivals_at(self, t: int) -> tuple[Packet, ...]:
        return self._arrivals.get(t, ())


class InvalidTraceError(ValueError):
    """Raised by validate_trace; carries the full list of violations."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


def validate_trace(buffer_size: int, packets: Iterable[Packet]) -> Trace:
    """Build a Trace, checking every model invariant.

    Collects ALL violations (duplicate id, deadline < release, negative
    weight, release < 1, buffer_size < 1) before raising InvalidTraceError,
    so callers can report a malformed instance in one pass.
    """
    packets = tuple(packets)
    violations: list[str] = []
    if buffer_size < 1:
        violations.append(f"buffer size must be >= 1, got {buffer_size}")
    seen: set[int] = set()
    for p in packets:
        if p.id < 0:
            violations.append(f"packet {p.id}: id must be non-negative")
        if p.id in seen:
            violations.append(f"packet {p.id}: duplicate id")
        seen.add(p.id)
        if p.release < 1:
            violations.append(f"packet {p.id}: release {p.release} < 1")
        if p.deadline < p.release:
            violations.append(
                f"packet {p.id}: deadline {p.deadline} < release {p.release}"
            )
        if p.weight < 0:
            violations.append(f"packet {p.id}: negative weight {p.weight}")
    if violations:
        raise InvalidTraceError(violations)
    return Trace(buffer_size, packets)


def slot_window(t: int, buffer_size: int) -> tuple[int, int]:
    """Inclusive label range [t, t+B-1] of a size-B buffer at time t."""
    if t < 1 or buffer_size < 1:
        raise ValueError(f"slot_window needs t >= 1 and B >= 1, got t={t}, B={buffer_size}")
    return t, t + buffer_size - 1


@dataclass(frozen=True)
class SlotBuffer:
    """Labeled buffer snapshot: slots[i] holds the packet at label base_time + i."""

    base_time: int
    slots: tuple["Packet | None", ...]

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))

    @property
    def size(self) -> int:
        return len(self.slots)

    @property
    def window(self) -> tuple[int, int]:
        return slot_window(self.base_time, len(self.slots))

    @property
    def front(self) -> "Packet | None":
        """Packet at the label-base_time slot, the one due to transmit."""
        return self.slots[0] if self.slots else None

    def at_label(self, label: int) -> "Packet | None":
        lo, hi = self.window
        if not lo <= label <= hi:
            raise ValueError(f"label {label} outside window [{lo}, {hi}]")
        return self.slots[label - self.base_time]

    def occupied(self) -> list[tuple[int, Packet]]:
        """(label, packet) pairs for the non-empty slots, in label order."""
        return [
            (self.base_time + i, p) for i, p in enumerate(self.slots) if p is not None
        ]

    def packets(self) -> tuple[Packet, ...]:
        return tuple(p for p in self.slots if p is not None)


def check_buffer_invariants(buffer: SlotBuffer, phase: Phase = "post-rebuild") -> list[str]:
    """Violations of the slot-labeling rules; an empty list means the snapshot is sound.

    Deadline-vs-label must hold in any phase.  Right after an arrival-stage
    rebuild the occupied slots must additionally form a contiguous prefix of
    the label range with non-increasing weights (ties allowed).  A
    post-transmit snapshot has an empty front slot, so those two checks are
    skipped for it.
    """
    out: list[str] = []
    occ = buffer.occupied()
    for label, p in occ:
        if p.deadline < label:
            out.append(
                f"slot {label}: packet {p.id} has deadline {p.deadline} < label {label}"
            )
    if phase == "post-rebuild":
        gap_at = None
        for i, p in enumerate(buffer.slots):
            if p is None:
                if gap_at is None:
                    gap_at = buffer.base_time + i
            elif gap_at is not None:
                out.append(
                    f"slot {buffer.base_time + i}: occupied after empty slot {gap_at}"
                )
                break
        for (la, pa), (lb, pb) in zip(occ, occ[1:]):
            if pb.weight > pa.weight:
                out.append(
                    f"slot {lb}: weight {pb.weight} exceeds weight {pa.weight} at slot {la}"
                )
    return out


@dataclass(frozen=True)
class Rejection:
    packet_id: int
    cause: str  # ADMISSION_REFUSED, PREEMPTED, or EXPIRED


@dataclass(frozen=True)
class StepRecord:
    """What one algorithm did during one time step.

    `held` is the post-arrival-stage buffer content (ids, ascending); `slots`
    is the labeled view of the same content for schedulers that keep one, None
    otherwise.  `transmitted` is None on idle steps.
    """

    time: int
    arrivals: tuple[int, ...]
    slots: "SlotBuffer | None"
    held: tuple[int, ...]
    rejections: tuple[Rejection, ...]
    transmitted: "int | None"


@dataclass(frozen=True)
class Transcript:
    """Full per-step record of one algorithm run over one trace."""

    trace: Trace
    steps: tuple[StepRecord, ...]

    def step(self, t: int) -> StepRecord:
        rec = self.steps[t - 1]
        assert rec.time == t
        return rec

    @cached_property
    def send_time(self) -> dict[int, int]:
        """Packet id -> the step at which it was transmitted."""
        out: dict[int, int] = {}
        for rec in self.steps:
            if rec.transmitted is not None:
                out[rec.transmitted] = rec.time
        return out

    @cached_property
    def rejected_at(self) -> dict[int, tuple[int, str]]:
        """Packet id -> (step, cause) of its recorded rejection."""
        out: dict[int, tuple[int, str]] = {}
        for rec in self.steps:
            for rej in rec.rejections:
                out.setdefault(rej.packet_id, (rec.time, rej.cause))
        return out

    def transmitted_weight(self, t: int) -> Fraction:
        """Weight sent at step t; idle steps count as weight 0."""
        pid = self.steps[t - 1].transmitted
        return self.trace.by_id[pid].weight if pid is not None else ZERO

    @cached_property
    def total_weight(self) -> Fraction:
        return sum(
            (self.trace.by_id[r.transmitted].weight
             for r in self.steps if r.transmitted is not None),
            ZERO,
        )


def check_transcript_invariants(transcript: Transcript) -> list[str]:
    """Structural soundness of a transcript; empty list means sound.

    Every packet of the trace must terminate exactly once, as a transmission
    or a rejection, at a step within its [release, deadline] window; each step
    transmits at most one packet (structural, one field per step) and never a
    packet foreign to the trace; recorded arrivals must match the trace.
    """
    trace = transcript.trace
    out: list[str] = []
    events: dict[int, list[tuple[str, int]]] = {p.id: [] for p in trace.packets}

    for rec in transcript.steps:
        expected = tuple(sorted(p.id for p in trace.arrivals_at(rec.time)))
        if rec.arrivals != expected:
            out.append(
                f"step {rec.time}: recorded arrivals {rec.arrivals} != released {expected}"
            )
        if rec.transmitted is not None:
            if rec.transmitted not in events:
                out.append(f"step {rec.time}: transmitted unknown packet {rec.transmitted}")
            else:
                events[rec.transmitted].append(("sent", rec.time))
        for rej in rec.rejections:
            if rej.packet_id not in events:
                out.append(f"step {rec.time}: rejected unknown packet {rej.packet_id}")
            else:
                events[rej.packet_id].append(("rejected", rec.time))

    for pid, evs in events.items():
        p = trace.by_id[pid]
        if len(evs) != 1:
            out.append(f"packet {pid}: expected exactly one terminal event, got {evs}")
            continue
        kind, t = evs[0]
        if not p.release <= t <= p.deadline:
            out.append(
                f"packet {pid}: {kind} at {t} outside window [{p.release}, {p.deadline}]"
            )
    return out

"""Online schedulers: the slot-queue algorithm and a naive greedy baseline.

The slot-queue scheduler (run_grq) keeps a buffer of B slots labeled with the
next B time steps.  Each step it rebuilds the buffer from scratch: survivors
plus fresh arrivals are considered in descending weight order and each packet
goes to the smallest-labeled empty slot that does not exceed its deadline, or
is rejected.  The front slot (labeled with the current step) is then
transmitted.  Because heavy packets grab small labels first, the front packet
is always a heaviest one — asserted on every step.

The naive greedy baseline (run_naive_greedy) just keeps the B heaviest live
packets and sends the heaviest each step.  It ignores deadlines when choosing
what to keep, which is exactly how it loses: a burst of mid-weight
short-deadline packets can crowd out slightly lighter packets that had time
to be sent later (see generate.gen_killer).

Both runners return a Transcript over steps t = 1..horizon with idle steps
recorded explicitly.
"""

from dataclasses import dataclass
from typing import Callable, Iterable

from .model import (
    ADMISSION_REFUSED,
    EXPIRED,
    PREEMPTED,
    Packet,
    Rejection,
    SlotBuffer,
    StepRecord,
    Trace,
    Transcript,
    check_buffer_invariants,
)


def _deadline_then_id(p: Packet) -> tuple[int, int]:
    return p.deadline, p.id


@dataclass(frozen=True)
class SchedulerConfig:
    """Pins the ordering applied among equal-weight packets.

    Packets are always processed in descending weight order; `tie_break` maps
    a packet to a sort key that breaks exact weight ties.  The default —
    deadline ascending, then id ascending — is a strict total order on any
    packet set (ids are unique) and favors tight deadlines, which never hurts
    placement.
    """

    tie_break: Callable[[Packet], tuple] = _deadline_then_id

    def order_key(self, p: Packet) -> tuple:
        return (-p.weight, *self.tie_break(p))


DEFAULT_CONFIG = SchedulerConfig()


def grq_rebuild(
    buffered: Iterable[Packet],
    arrivals: Iterable[Packet],
    t: int,
    buffer_size: int,
    config: SchedulerConfig = DEFAULT_CONFIG,
) -> tuple[SlotBuffer, tuple[Rejection, ...]]:
    """Arrival-stage rebuild at step t: place survivors + arrivals, reject the rest.

    Packets are placed in descending weight order (ties per config); each goes
    to the smallest-labeled empty slot whose label is <= its deadline.  A
    packet with no such slot is rejected — cause "preempted" if it was already
    buffered, "admission-refused" if it just arrived.  Both inputs must be
    live at t (release <= t <= deadline); offering an expired or future packet
    is a programming error.
    """
    buffered = tuple(buffered)
    arrivals = tuple(arrivals)
    assert len(buffered) <= buffer_size, "carried packets exceed buffer size"
    for p in buffered + arrivals:
        assert p.release <= t <= p.deadline, f"packet {p.id} not live at t={t}"
    buffered_ids = {p.id for p in buffered}

    slots: list[Packet | None] = [None] * buffer_size
    rejections: list[Rejection] = []
    for p in sorted(buffered + arrivals, key=config.order_key):
        # slot i carries label t + i; usable iff label <= deadline
        last = min(buffer_size - 1, p.deadline - t)
        for i in range(last + 1):
            if slots[i] is None:
                slots[i] = p
                break
        else:
            cause = PREEMPTED if p.id in buffered_ids else ADMISSION_REFUSED
            rejections.append(Rejection(p.id, cause))

    buffer = SlotBuffer(t, tuple(slots))
    assert not check_buffer_invariants(buffer, "post-rebuild")
    return buffer, tuple(rejections)


def grq_transmit(buffer: SlotBuffer, t: int) -> tuple["Packet | None", tuple[Packet, ...]]:
    """Transmission stage: send the front-slot packet (or idle), return survivors.

    The front packet is always a maximum-weight packet in the buffer; this is
    a consequence of the rebuild order and is asserted, not assumed.
    """
    assert buffer.base_time == t
    sent = buffer.front
    if sent is not None:
        assert all(p.weight <= sent.weight for p in buffer.packets()), (
            f"front packet {sent.id} is not heaviest at t={t}"
        )
    remaining = tuple(p for p in buffer.slots[1:] if p is not None)
    return sent, remaining


def run_grq(trace: Trace, config: SchedulerConfig = DEFAULT_CONFIG) -> Transcript:
    """Run the slot-queue scheduler over the whole trace."""
    steps: list[StepRecord] = []
    held: tuple[Packet, ...] = ()
    for t in range(1, trace.horizon + 1):
        arrivals = trace.arrivals_at(t)
        buffer, rejections = grq_rebuild(held, arrivals, t, trace.buffer_size, config)
        sent, held = grq_transmit(buffer, t)
        # survivors sat at labels >= t+1, so none can be past deadline at t+1
        assert all(p.deadline > t for p in held)
        steps.append(
            StepRecord(
                time=t,
                arrivals=tuple(sorted(p.id for p in arrivals)),
                slots=buffer,
                held=tuple(sorted(p.id for p in buffer.packets())),
                rejections=rejections,
                transmitted=sent.id if sent is not None else None,
            )
        )
    assert not held
    return Transcript(trace, tuple(steps))


def run_naive_greedy(trace: Trace, config: SchedulerConfig = DEFAULT_CONFIG) -> Transcript:
    """Run the keep-the-heaviest baseline over the whole trace.

    Per step: add arrivals, and if the buffer overflows drop the lightest
    packets (among equals, larger deadline goes first, then larger id — the
    drop order most charitable to greedy); transmit the heaviest packet
    (ties per config).  Packets that reach their deadline unsent are recorded
    as expired at that deadline step, right after the transmission they lost.
    """
    steps: list[StepRecord] = []
    held: list[Packet] = []
    for t in range(1, trace.horizon + 1):
        assert all(p.deadline >= t for p in held)
        arrivals = trace.arrivals_at(t)
        pool = sorted(held + list(arrivals), key=config.order_key)
        held, overflow = pool[: trace.buffer_size], pool[trace.buffer_size :]
        arrived_ids = {p.id for p in arrivals}
        rejections = [
            Rejection(p.id, ADMISSION_REFUSED if p.id in arrived_ids else PREEMPTED)
            for p in overflow
        ]
        held_ids = tuple(sorted(p.id for p in held))

        sent = held[0] if held else None  # pool order puts a heaviest packet first
        if sent is not None:
            held = held[1:]
        # unsent packets whose deadline is t are lost; record while in window
        expired = [p for p in held if p.deadline == t]
        held = [p for p in held if p.deadline > t]
        rejections.extend(Rejection(p.id, EXPIRED) for p in expired)

        steps.append(
            StepRecord(
                time=t,
                arrivals=tuple(sorted(arrived_ids)),
                slots=None,
                held=held_ids,
                rejections=tuple(rejections),
                transmitted=sent.id if sent is not None else None,
            )
        )
    assert not held
    return Transcript(trace, tuple(steps))


def check_slot_monotonicity(transcript: Transcript) -> list[str]:
    """Per-label weight monotonicity across consecutive rebuilt buffers.

    For every slot label, the weight sitting at that label never decreases
    between one post-rebuild snapshot and the next, for as long as the label
    is in both windows (an empty slot counts as bottom).  Returns violation
    strings; empty means the property held at every step.
    """
    out: list[str] = []
    prev: SlotBuffer | None = None
    for rec in transcript.steps:
        buf = rec.slots
        assert buf is not None, "slot monotonicity needs labeled snapshots"
        if prev is not None:
            lo = max(prev.window[0], buf.window[0])
            hi = min(prev.window[1], buf.window[1])
            for label in range(lo, hi + 1):
                before = prev.at_label(label)
                if before is None:
                    continue
                after = buf.at_label(label)
                if after is None or after.weight < before.weight:
                    got = "empty" if after is None else str(after.weight)
                    out.append(
                        f"label {label}: weight dropped from {before.weight} "
                        f"at t={prev.base_time} to {got} at t={buf.base_time}"
                    )
        prev = buf
    return out

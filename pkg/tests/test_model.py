from fractions import Fraction

import pytest

from slotq.model import (
    ADMISSION_REFUSED,
    EXPIRED,
    InvalidTraceError,
    Packet,
    Rejection,
    SlotBuffer,
    StepRecord,
    Trace,
    Transcript,
    check_buffer_invariants,
    check_transcript_invariants,
    slot_window,
    validate_trace,
)


def P(pid, r, d, w):
    return Packet(pid, r, d, Fraction(w))


class TestSlotWindow:
    def test_basic(self):
        assert slot_window(1, 3) == (1, 3)

    def test_degenerate_single_slot(self):
        assert slot_window(2, 1) == (2, 2)

    def test_offset(self):
        assert slot_window(5, 4) == (5, 8)

    def test_shift_by_one_step(self):
        # label persistence: the window at t+1 is the window at t shifted by one
        for t in range(1, 10):
            lo, hi = slot_window(t, 3)
            assert slot_window(t + 1, 3) == (lo + 1, hi + 1)

    @pytest.mark.parametrize("t,b", [(0, 3), (-1, 1), (1, 0), (2, -2)])
    def test_rejects_bad_args(self, t, b):
        with pytest.raises(ValueError):
            slot_window(t, b)


class TestPacket:
    def test_weight_coerced_to_fraction(self):
        p = Packet(0, 1, 2, 3)
        assert p.weight == Fraction(3) and isinstance(p.weight, Fraction)

    def test_exact_decimal_string(self):
        assert Packet(0, 1, 1, Fraction("1.5")).weight == Fraction(3, 2)


class TestValidateTrace:
    def test_valid(self):
        t = validate_trace(2, [P(0, 1, 2, 1)])
        assert t.horizon == 2
        assert t.by_id[0].deadline == 2

    def test_deadline_before_release(self):
        with pytest.raises(InvalidTraceError) as e:
            validate_trace(1, [P(0, 3, 2, 1)])
        assert any("deadline" in v for v in e.value.violations)

    def test_buffer_too_small(self):
        with pytest.raises(InvalidTraceError) as e:
            validate_trace(0, [])
        assert any("buffer size" in v for v in e.value.violations)

    def test_collects_all_violations(self):
        packets = [P(1, 1, 2, 1), P(1, 0, 1, 1), Packet(2, 1, 2, Fraction(-1))]
        with pytest.raises(InvalidTraceError) as e:
            validate_trace(0, packets)
        v = e.value.violations
        assert len(v) == 4  # B, duplicate id, release < 1, negative weight
        assert any("duplicate" in s for s in v)
        assert any("release" in s for s in v)
        assert any("negative" in s for s in v)

    def test_zero_weight_is_legal(self):
        t = validate_trace(1, [P(0, 1, 1, 0)])
        assert t.packets[0].weight == 0

    def test_negative_id(self):
        with pytest.raises(InvalidTraceError):
            validate_trace(1, [P(-1, 1, 1, 1)])


class TestTrace:
    def test_empty_horizon(self):
        assert validate_trace(1, []).horizon == 0

    def test_arrivals_at(self):
        t = validate_trace(2, [P(0, 1, 3, 1), P(1, 2, 2, 1), P(2, 1, 1, 1)])
        assert {p.id for p in t.arrivals_at(1)} == {0, 2}
        assert [p.id for p in t.arrivals_at(2)] == [1]
        assert t.arrivals_at(3) == ()


class TestBufferInvariants:
    def test_weights_must_not_increase(self):
        buf = SlotBuffer(1, (P(0, 1, 2, 3), P(1, 1, 3, 5)))
        errs = check_buffer_invariants(buf, "post-rebuild")
        assert len(errs) == 1 and "exceeds" in errs[0]

    def test_deadline_below_label(self):
        buf = SlotBuffer(1, (None, P(0, 1, 1, 5)))
        errs = check_buffer_invariants(buf, "post-transmit")
        assert len(errs) == 1 and "deadline" in errs[0]

    def test_prefix_with_empty_tail_ok(self):
        buf = SlotBuffer(1, (P(0, 1, 3, 5), None, None))
        assert check_buffer_invariants(buf, "post-rebuild") == []

    def test_gap_flagged_post_rebuild_only(self):
        buf = SlotBuffer(1, (None, P(0, 1, 3, 5)))
        assert any("occupied after empty" in e
                   for e in check_buffer_invariants(buf, "post-rebuild"))
        assert check_buffer_invariants(buf, "post-transmit") == []

    def test_at_label_and_window(self):
        buf = SlotBuffer(4, (P(0, 1, 9, 1), None))
        assert buf.window == (4, 5)
        assert buf.at_label(4).id == 0
        assert buf.at_label(5) is None
        with pytest.raises(ValueError):
            buf.at_label(6)
        assert buf.front.id == 0
        assert buf.occupied() == [(4, buf.slots[0])]


def _single_step_transcript(trace, *steps):
    return Transcript(trace, tuple(steps))


class TestTranscriptInvariants:
    def _trace(self):
        return validate_trace(1, [P(0, 1, 2, 4)])

    def test_sent_packet_ok(self):
        t = self._trace()
        ts = _single_step_transcript(
            t,
            StepRecord(1, (0,), None, (0,), (), 0),
            StepRecord(2, (), None, (), (), None),
        )
        assert check_transcript_invariants(ts) == []
        assert ts.send_time == {0: 1}
        assert ts.transmitted_weight(1) == 4
        assert ts.transmitted_weight(2) == 0
        assert ts.total_weight == 4

    def test_missing_terminal_event(self):
        t = self._trace()
        ts = _single_step_transcript(
            t,
            StepRecord(1, (0,), None, (0,), (), None),
            StepRecord(2, (), None, (0,), (), None),
        )
        assert any("exactly one terminal" in v for v in check_transcript_invariants(ts))

    def test_event_outside_window(self):
        # horizon-3 trace so a step-3 send of packet 0 (deadline 2) is representable
        t3 = validate_trace(1, [P(0, 1, 2, 4), P(1, 3, 3, 1)])
        ts = Transcript(t3, (
            StepRecord(1, (0,), None, (0,), (), None),
            StepRecord(2, (), None, (0,), (), None),
            StepRecord(3, (1,), None, (1,), (Rejection(1, EXPIRED),), 0),
        ))
        assert any("outside window" in v for v in check_transcript_invariants(ts))

    def test_double_event(self):
        t = self._trace()
        ts = _single_step_transcript(
            t,
            StepRecord(1, (0,), None, (0,), (), 0),
            StepRecord(2, (), None, (), (Rejection(0, ADMISSION_REFUSED),), None),
        )
        assert any("exactly one terminal" in v for v in check_transcript_invariants(ts))

    def test_arrivals_mismatch(self):
        t = self._trace()
        ts = _single_step_transcript(
            t,
            StepRecord(1, (), None, (), (), 0),
            StepRecord(2, (), None, (), (), None),
        )
        assert any("arrivals" in v for v in check_transcript_invariants(ts))

    def test_unknown_packet(self):
        t = self._trace()
        ts = _single_step_transcript(
            t,
            StepRecord(1, (0,), None, (0,), (), 7),
            StepRecord(2, (), None, (), (), 0),
        )
        assert any("unknown packet 7" in v for v in check_transcript_invariants(ts))

    def test_rejection_lookup_keeps_first(self):
        t = self._trace()
        ts = _single_step_transcript(
            t,
            StepRecord(1, (0,), None, (), (Rejection(0, ADMISSION_REFUSED),), None),
            StepRecord(2, (), None, (), (), None),
        )
        assert ts.rejected_at[0] == (1, ADMISSION_REFUSED)
        assert check_transcript_invariants(ts) == []

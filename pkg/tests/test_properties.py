"""Property-based checks over randomized instances.

Each property restates a contract the rest of the suite pins with examples:
structural soundness of transcripts, oracle ordering and exactness bounds,
charge-map verification, and format round-trips.
"""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from slotq.charging import build_charge_map, verify_charge_map
from slotq.model import (
    EXPIRED,
    Packet,
    check_transcript_invariants,
    validate_trace,
)
from slotq.oracle import (
    enumerate_feasible,
    optimal_bounded,
    optimal_unbounded,
    relax_capacity,
    verify_schedule,
)
from slotq.schedulers import check_slot_monotonicity, run_grq, run_naive_greedy
from slotq.traceio import emit_trace, parse_trace


@st.composite
def traces(draw, max_n=8, max_b=4, max_release=6, max_span=4):
    b = draw(st.integers(1, max_b))
    n = draw(st.integers(0, max_n))
    packets = []
    for i in range(n):
        release = draw(st.integers(1, max_release))
        deadline = release + draw(st.integers(0, max_span))
        weight = draw(st.fractions(
            min_value=0, max_value=16, max_denominator=8))
        packets.append(Packet(i, release, deadline, weight))
    return validate_trace(b, packets)


@given(traces())
@settings(max_examples=150, deadline=None)
def test_grq_transcript_is_sound(trace):
    transcript = run_grq(trace)
    assert check_transcript_invariants(transcript) == []
    assert check_slot_monotonicity(transcript) == []


@given(traces())
@settings(max_examples=150, deadline=None)
def test_grq_never_expires_a_buffered_packet(trace):
    transcript = run_grq(trace)
    for rec in transcript.steps:
        assert all(r.cause != EXPIRED for r in rec.rejections)


@given(traces())
@settings(max_examples=150, deadline=None)
def test_greedy_transcript_is_sound(trace):
    assert check_transcript_invariants(run_naive_greedy(trace)) == []


@given(traces())
@settings(max_examples=100, deadline=None)
def test_oracle_dominates_both_online_algorithms(trace):
    opt = optimal_bounded(trace).value
    assert opt >= run_grq(trace).total_weight
    assert opt >= run_naive_greedy(trace).total_weight


@given(traces())
@settings(max_examples=100, deadline=None)
def test_unbounded_dominates_bounded(trace):
    assert optimal_bounded(trace).value <= optimal_unbounded(trace).value


@given(traces())
@settings(max_examples=75, deadline=None)
def test_big_buffer_closes_the_gap(trace):
    relaxed = relax_capacity(trace)
    assert optimal_bounded(relaxed).value == optimal_unbounded(trace).value


@given(traces())
@settings(max_examples=75, deadline=None)
def test_optimum_monotone_in_buffer_size(trace):
    bigger = validate_trace(trace.buffer_size + 1, trace.packets)
    assert optimal_bounded(trace).value <= optimal_bounded(bigger).value


@given(traces())
@settings(max_examples=100, deadline=None)
def test_oracle_outputs_verify_clean(trace):
    assert verify_schedule(trace, optimal_bounded(trace)) == []
    assert verify_schedule(relax_capacity(trace), optimal_unbounded(trace)) == []


@given(traces())
@settings(max_examples=100, deadline=None)
def test_charging_certifies_two_competitiveness(trace):
    grq = run_grq(trace)
    adv = optimal_bounded(trace)
    report = verify_charge_map(build_charge_map(grq, adv), grq, adv)
    assert report.passed, report.failures()
    assert adv.value <= 2 * grq.total_weight


@given(traces(max_n=5, max_release=4, max_span=3))
@settings(max_examples=40, deadline=None)
def test_charging_holds_against_arbitrary_feasible_adversaries(trace):
    grq = run_grq(trace)
    for adv in enumerate_feasible(trace, limit=60):
        report = verify_charge_map(build_charge_map(grq, adv), grq, adv)
        assert report.passed, (adv.assignment, report.failures())


@given(traces())
@settings(max_examples=150, deadline=None)
def test_qtrace_round_trip(trace):
    assert parse_trace(emit_trace(trace)) == trace


@given(traces(max_n=5, max_release=4, max_span=3))
@settings(max_examples=40, deadline=None)
def test_enumerated_schedules_are_feasible_and_distinct(trace):
    schedules = enumerate_feasible(trace, limit=80)
    seen = set()
    for s in schedules:
        assert verify_schedule(trace, s) == []
        key = tuple(sorted(s.assignment.items()))
        assert key not in seen
        seen.add(key)


@given(traces())
@settings(max_examples=50, deadline=None)
def test_all_zero_weights_flow_through(trace):
    # Degenerate all-zero instances must flow through the whole pipeline.
    zeroed = validate_trace(
        trace.buffer_size,
        [Packet(p.id, p.release, p.deadline, Fraction(0)) for p in trace.packets],
    )
    assert run_grq(zeroed).total_weight == 0
    assert optimal_bounded(zeroed).value == 0

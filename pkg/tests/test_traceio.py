from fractions import Fraction

import pytest

from slotq.generate import GeneratorParams, gen_killer, gen_random
from slotq.model import InvalidTraceError, Packet, validate_trace
from slotq.traceio import (
    TraceSyntaxError,
    emit_trace,
    load_trace,
    parse_trace,
    save_trace,
)


class TestParse:
    def test_minimal(self):
        t = parse_trace("B 2\np 0 1 2 1\np 1 1 1 3\n")
        assert t.buffer_size == 2 and len(t.packets) == 2

    def test_weight_forms(self):
        t = parse_trace("B 1\np 0 1 1 7\np 1 1 2 3/4\np 2 1 3 1.5\n")
        assert [p.weight for p in t.packets] == [
            Fraction(7), Fraction(3, 4), Fraction(3, 2)]

    def test_comments_and_blanks(self):
        text = "# qtrace v1\n\n# a comment\nB 1   # trailing\np 0 1 1 2 # w=2\n"
        t = parse_trace(text)
        assert t.buffer_size == 1 and t.packets[0].weight == 2

    def test_empty_instance(self):
        assert parse_trace("B 3\n").packets == ()

    @pytest.mark.parametrize("text,line,needle", [
        ("B 2\nq 0 1 1 1\n", 2, "unknown directive"),
        ("B 2\np 0 1 1\n", 2, "expected"),
        ("B x\n", 1, "not an integer"),
        ("B 2\np a 1 1 1\n", 2, "non-integer"),
        ("B 2\np 0 1 1 1/0\n", 2, "weight"),
        ("B 2\np 0 1 1 w\n", 2, "weight"),
        ("B 2\nB 3\n", 2, "duplicate B"),
        ("B\n", 1, "expected"),
    ])
    def test_syntax_errors_carry_line_numbers(self, text, line, needle):
        with pytest.raises(TraceSyntaxError) as e:
            parse_trace(text)
        assert e.value.line == line
        assert needle in str(e.value)

    def test_missing_buffer_directive(self):
        with pytest.raises(TraceSyntaxError):
            parse_trace("p 0 1 1 1\n")

    def test_semantic_errors_delegated(self):
        with pytest.raises(InvalidTraceError):
            parse_trace("B 1\np 0 1 1 1\np 0 1 1 1\n")
        with pytest.raises(InvalidTraceError):
            parse_trace("B 1\np 0 3 2 1\n")


class TestRoundTrip:
    def test_emit_parse_identity(self):
        for seed in range(25):
            t = gen_random(GeneratorParams(
                n=6, horizon=5, buffer_size=2, seed=seed))
            assert parse_trace(emit_trace(t)) == t

    def test_killer_round_trip(self):
        t = gen_killer(4, Fraction(1, 3))
        assert parse_trace(emit_trace(t)) == t

    def test_fractional_weights_round_trip(self):
        t = validate_trace(2, [
            Packet(0, 1, 2, Fraction(22, 7)), Packet(1, 1, 1, Fraction(0)),
        ])
        again = parse_trace(emit_trace(t))
        assert again == t
        assert "22/7" in emit_trace(t)

    def test_decimal_parses_to_same_value_as_fraction(self):
        assert parse_trace("B 1\np 0 1 1 0.25\n") == parse_trace("B 1\np 0 1 1 1/4\n")

    def test_emitted_bytes_stable(self):
        t = gen_random(GeneratorParams(n=5, horizon=4, buffer_size=2, seed=9))
        assert emit_trace(t) == emit_trace(parse_trace(emit_trace(t)))

    def test_file_round_trip(self, tmp_path):
        t = gen_random(GeneratorParams(n=4, horizon=4, buffer_size=1, seed=3))
        path = tmp_path / "x.qtrace"
        save_trace(t, path)
        assert load_trace(path) == t
        assert path.read_text().startswith("# qtrace v1\n")

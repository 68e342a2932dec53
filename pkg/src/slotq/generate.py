"""Deterministic instance generators.

Reproducibility contract: identical parameters + seed produce the identical
trace, byte-for-byte after emission, on any implementation of this tool.
That rules out a host language's default PRNG, so draws come from splitmix64
(the reference constants below) and each generated quantity consumes a fixed,
documented number of draws.
"""

from dataclasses import dataclass
from fractions import Fraction

from .model import Packet, Trace, validate_trace

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream: state advances by the golden-gamma constant, output
    is the standard two-round xor-multiply finalizer.  Draws below n use plain
    modulo — bias is irrelevant here, identical streams are the point."""

    GAMMA = 0x9E3779B97F4A7C15
    MIX1 = 0xBF58476D1CE4E5B9
    MIX2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * self.MIX2) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        assert n >= 1
        return self.next_u64() % n


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for gen_random; also reused as the search space description.

    Weights are uniform integers in 1..max_weight (never zero).  Deadline
    span is uniform in 0..min(max_span, horizon - release) so deadlines stay
    within the horizon.  `burst` is the probability (an exact rational in
    [0, 1]) that a packet reuses the previous packet's release step, which
    clumps arrivals the way overload instances need.
    """

    n: int
    horizon: int
    buffer_size: int
    seed: int
    max_weight: int = 16
    max_span: "int | None" = None
    burst: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.buffer_size < 1:
            raise ValueError(f"buffer size must be >= 1, got {self.buffer_size}")
        if self.max_weight < 1:
            raise ValueError(f"max_weight must be >= 1, got {self.max_weight}")
        if self.max_span is not None and self.max_span < 0:
            raise ValueError(f"max_span must be >= 0, got {self.max_span}")
        if not 0 <= self.burst <= 1:
            raise ValueError(f"burst must be in [0, 1], got {self.burst}")


def gen_random(params: GeneratorParams) -> Trace:
    """Pseudo-random trace, a pure function of params (seed included).

    Per packet, in order: one draw for the burst test (only when burst > 0),
    one for the release (skipped when the burst test hits), one for the
    deadline span, one for the weight.
    """
    rng = SplitMix64(params.seed)
    burst = params.burst
    packets: list[Packet] = []
    prev_release = 1
    for i in range(params.n):
        if burst and rng.below(burst.denominator) < burst.numerator and i > 0:
            release = prev_release
        else:
            release = 1 + rng.below(params.horizon)
        span_cap = params.horizon - release
        if params.max_span is not None:
            span_cap = min(span_cap, params.max_span)
        deadline = release + rng.below(span_cap + 1)
        weight = Fraction(1 + rng.below(params.max_weight))
        packets.append(Packet(i, release, deadline, weight))
        prev_release = release
    return validate_trace(params.buffer_size, packets)


def gen_killer(buffer_size: int, eps: Fraction) -> Trace:
    """The burst instance that sinks naive greedy.

    B packets (release 1, deadline 1, weight 1) arrive together with B-1
    packets (release 1, deadline B, weight 1-eps).  Keep-the-heaviest fills
    the buffer with the weight-1 packets, sends one, and lets the other B-1
    expire: total 1.  The optimum sends one weight-1 packet and then drains
    all B-1 of the (1-eps)-weight packets: total 1 + (B-1)(1-eps), so the
    ratio grows linearly in B as eps shrinks.  The slot-queue scheduler keeps
    exactly one weight-1 packet (label 1) plus all the long-deadline packets
    and matches the optimum.
    """
    if buffer_size < 2:
        raise ValueError(f"killer instance needs buffer size >= 2, got {buffer_size}")
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    packets = [
        Packet(i, 1, 1, Fraction(1)) for i in range(buffer_size)
    ] + [
        Packet(buffer_size + j, 1, buffer_size, 1 - eps)
        for j in range(buffer_size - 1)
    ]
    return validate_trace(buffer_size, packets)

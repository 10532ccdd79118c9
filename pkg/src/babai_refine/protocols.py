"""Executable two-party state machines for the three refinement schemes.

Every run_* function maps one plane point to a Transcript: the ordered
message list with ideal-codelength accounting (-log2 of each symbol's
probability under the sender's model; exactly 1.0 for bisection bits), the
round count and the final decision in lattice coordinates.  All functions
are pure; identical inputs give identical transcripts.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass

from . import analytics
from .errors import OutOfCell
from .lattice import (
    IntegerPair,
    LatticeParams,
    Point2,
    cell_geometry,
    lattice_point,
    make_generator,
    row_cuts,
    strip_cuts,
)

S1 = "S1"
S2 = "S2"

DEFAULT_MAX_ROUNDS = 64


@dataclass(frozen=True)
class Message:
    sender: str
    symbol: int
    ideal_bits: float


@dataclass(frozen=True)
class Transcript:
    messages: tuple[Message, ...]
    rounds: int
    total_bits: float
    decision: IntegerPair
    halted: bool


@dataclass(frozen=True)
class Quantizer12:
    """Bin structure of the 12 scheme: N2 | N1 | 1 | N1 | N2 bins over x1.

    Bin symbols are centred: 0 is the cut-free middle bin, positive to the
    right, so mirroring x -> -x negates the symbol.
    """

    n1: int
    n2: int
    edges: tuple[float, ...]

    @property
    def center(self) -> int:
        return self.n1 + self.n2


@dataclass(frozen=True)
class Quantizer21:
    """Bin structure of the 21 scheme: N | 1 | N bins over x2."""

    n: int
    edges: tuple[float, ...]

    @property
    def center(self) -> int:
        return self.n


def quantizer_12(params: LatticeParams, n1: int, n2: int) -> Quantizer12:
    edges = analytics.bin_edges_12(params, n1, n2)
    return Quantizer12(n1=n1, n2=n2, edges=tuple(edges.tolist()))


def quantizer_21(params: LatticeParams, n: int) -> Quantizer21:
    return Quantizer21(n=n, edges=tuple(analytics.bin_edges_21(params, n).tolist()))


def _require_in_cell(x: Point2, params: LatticeParams) -> None:
    h = params.rsin / 2.0
    if not (-0.5 < x[0] <= 0.5 and -h < x[1] <= h):
        raise OutOfCell(f"{tuple(x)} outside (-1/2,1/2] x (-{h},{h}]")


def _bin_position(edges: tuple[float, ...], value: float) -> int:
    """Index i with edges[i] < value <= edges[i+1] (half-open bins)."""
    pos = bisect_left(edges, value) - 1
    return min(max(pos, 0), len(edges) - 2)


def _region_index(cuts: tuple[float, ...], value: float) -> int:
    return sum(value > c for c in cuts)


def _region_probabilities(cuts: tuple[float, ...], lo: float, hi: float) -> list[float]:
    edges = [lo, *cuts, hi]
    span = hi - lo
    return [(b - a) / span for a, b in zip(edges[:-1], edges[1:])]


def run_single_round_12(x: Point2, params: LatticeParams, q: Quantizer12) -> Transcript:
    """One round, S1 first: bin index of x1, then S2's ternary decision.

    S2's cuts sit at the boundary heights of the bin midpoint (the optimal
    mid-height cut for a linear boundary); the decision is the region label,
    known to both parties from the two symbols alone.
    """
    _require_in_cell(x, params)
    geom = cell_geometry(params)
    pos = _bin_position(q.edges, x[0])
    width = q.edges[pos + 1] - q.edges[pos]
    bits1 = -math.log2(width / geom.L)
    mid = 0.5 * (q.edges[pos] + q.edges[pos + 1])
    spec = strip_cuts(params, mid)
    region = _region_index(spec.cuts, x[1])
    center = spec.labels.index(IntegerPair(0, 0))
    probs = _region_probabilities(spec.cuts, -geom.H / 2.0, geom.H / 2.0)
    bits2 = -math.log2(probs[region])
    messages = (
        Message(S1, pos - q.center, bits1),
        Message(S2, region - center, bits2),
    )
    return Transcript(
        messages=messages,
        rounds=1,
        total_bits=bits1 + bits2,
        decision=spec.labels[region],
        halted=True,
    )


def run_single_round_21(x: Point2, params: LatticeParams, q: Quantizer21) -> Transcript:
    """One round, S2 first: bin index of x2, then S1's ternary decision."""
    _require_in_cell(x, params)
    geom = cell_geometry(params)
    pos = _bin_position(q.edges, x[1])
    height = q.edges[pos + 1] - q.edges[pos]
    bits1 = -math.log2(height / geom.H)
    mid = 0.5 * (q.edges[pos] + q.edges[pos + 1])
    spec = row_cuts(params, mid)
    region = _region_index(spec.cuts, x[0])
    center = spec.labels.index(IntegerPair(0, 0))
    probs = _region_probabilities(spec.cuts, -0.5, 0.5)
    bits2 = -math.log2(probs[region])
    messages = (
        Message(S2, pos - q.center, bits1),
        Message(S1, region - center, bits2),
    )
    return Transcript(
        messages=messages,
        rounds=1,
        total_bits=bits1 + bits2,
        decision=spec.labels[region],
        halted=True,
    )


@dataclass(frozen=True)
class ErrorRectangle:
    """A round-1 cell whose Voronoi boundary is exactly its diagonal."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    neighbor: IntegerPair
    positive_slope: bool


def error_rectangle(params: LatticeParams, u2: int, u1: int) -> ErrorRectangle:
    """The round-1 error rectangle selected by symbols (u2, u1), both nonzero.

    For u2 = 1 the two rectangles sit in the top band; u2 = -1 mirrors them
    through the origin.
    """
    if u2 not in (-1, 1) or u1 not in (-1, 1):
        raise ValueError("error rectangles exist only for u2, u1 in {-1, +1}")
    g = cell_geometry(params)
    if u1 == 1:
        rect = (g.t_1, 0.5, g.tau_1, g.H / 2.0, IntegerPair(0, 1), False)
    else:
        rect = (-0.5, g.t_m2, g.tau_1, g.H / 2.0, IntegerPair(-1, 1), True)
    if u2 == -1:
        x_lo, x_hi, y_lo, y_hi, nb, pos_slope = rect
        rect = (-x_hi, -x_lo, -y_hi, -y_lo, -nb, pos_slope)
    return ErrorRectangle(*rect)


def _neighbor_side(params: LatticeParams, point: Point2, neighbor: IntegerPair) -> bool:
    """True if point lies strictly on the neighbor's side of the bisector."""
    n = lattice_point(neighbor, make_generator(params))
    return point[0] * n[0] + point[1] * n[1] > 0.5 * (n[0] ** 2 + n[1] ** 2)


def run_infinite_rounds(
    x: Point2, params: LatticeParams, max_rounds: int = DEFAULT_MAX_ROUNDS
) -> Transcript:
    """Zero-error interactive refinement with unbounded rounds.

    Round 1: S2 sends the band index; if nonzero, S1 answers with the coarse
    interval index (mirrored through the origin when the band index is -1).
    Both zero symbols halt immediately in an error-free cell.  Otherwise the
    point lies in an error rectangle whose Voronoi boundary is its exact
    diagonal, and each further round exchanges one binary-expansion bit per
    node of the normalised in-rectangle coordinates (x1 measured from the
    right edge when the diagonal's slope is positive), halting on the first
    equal bit pair.  The final decision is the side of the bisector holding
    the centre of the surviving error-free sub-rectangle.

    A transcript that exhausts max_rounds is returned with halted=False and
    the decision taken from an exact side test of x itself.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    _require_in_cell(x, params)
    g = cell_geometry(params)
    q_dist, p_dist = analytics.round1_distributions(params)
    u2 = 1 if x[1] > g.tau_1 else (-1 if x[1] <= g.tau_m1 else 0)
    messages = [Message(S2, u2, -math.log2(q_dist.probs[u2 + 1]))]
    if u2 == 0:
        return Transcript(tuple(messages), 1, messages[0].ideal_bits, IntegerPair(0, 0), True)

    mirror = u2 == -1
    mx1, mx2 = (-x[0], -x[1]) if mirror else (x[0], x[1])
    u1m = 1 if mx1 > g.t_1 else (-1 if mx1 <= g.t_m2 else 0)
    u1 = -u1m if mirror else u1m
    messages.append(Message(S1, u1, -math.log2(p_dist.probs[u1m + 1])))
    total = messages[0].ideal_bits + messages[1].ideal_bits
    if u1m == 0:
        return Transcript(tuple(messages), 1, total, IntegerPair(0, 0), True)

    rect = error_rectangle(params, 1, u1m)  # mirrored frame: always top band
    x_lo, x_hi, y_lo, y_hi = rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi
    lx = (mx1 - x_lo) / (x_hi - x_lo)
    y1 = (1.0 - lx) if rect.positive_slope else lx
    y2 = (mx2 - y_lo) / (y_hi - y_lo)
    rounds = 1
    halted = False
    while rounds < max_rounds:
        b = 1 if y1 > 0.5 else 0
        c = 1 if y2 > 0.5 else 0
        messages.append(Message(S1, b, 1.0))
        messages.append(Message(S2, c, 1.0))
        total += 2.0
        rounds += 1
        xm = 0.5 * (x_lo + x_hi)
        ym = 0.5 * (y_lo + y_hi)
        # b selects the x-half consistently with the expansion direction
        right_half = (b == 1) != rect.positive_slope
        x_lo, x_hi = (xm, x_hi) if right_half else (x_lo, xm)
        y_lo, y_hi = (ym, y_hi) if c == 1 else (y_lo, ym)
        y1 = 2.0 * y1 - b
        y2 = 2.0 * y2 - c
        if b == c:
            halted = True
            break
    if halted:
        center = Point2(0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi))
        take_neighbor = _neighbor_side(params, center, rect.neighbor)
        decision_m = rect.neighbor if take_neighbor else IntegerPair(0, 0)
    else:
        on_far_side = _neighbor_side(params, Point2(mx1, mx2), rect.neighbor)
        decision_m = rect.neighbor if on_far_side else IntegerPair(0, 0)
    decision = -decision_m if mirror else decision_m
    return Transcript(tuple(messages), rounds, total, decision, halted)


def transcript_to_json(t: Transcript) -> str:
    """Serialize a transcript with stable field names and key order."""
    doc = {
        "messages": [
            {"sender": m.sender, "symbol": m.symbol, "ideal_bits": m.ideal_bits}
            for m in t.messages
        ],
        "rounds": t.rounds,
        "total_bits": t.total_bits,
        "decision": [t.decision.u1, t.decision.u2],
        "halted": t.halted,
    }
    return json.dumps(doc)


def transcript_from_json(text: str) -> Transcript:
    doc = json.loads(text)
    return Transcript(
        messages=tuple(
            Message(m["sender"], int(m["symbol"]), float(m["ideal_bits"]))
            for m in doc["messages"]
        ),
        rounds=int(doc["rounds"]),
        total_bits=float(doc["total_bits"]),
        decision=IntegerPair(int(doc["decision"][0]), int(doc["decision"][1])),
        halted=bool(doc["halted"]),
    )


def replay_decision(
    messages: tuple[Message, ...],
    params: LatticeParams,
    scheme: str,
    quantizer: Quantizer12 | Quantizer21 | None = None,
) -> IntegerPair:
    """Recompute the decision from the message symbols alone (no x).

    Demonstrates that both parties reach the same decision from what was
    communicated.  Raises on transcripts that never halted.
    """
    if scheme == "12":
        assert isinstance(quantizer, Quantizer12)
        pos = messages[0].symbol + quantizer.center
        mid = 0.5 * (quantizer.edges[pos] + quantizer.edges[pos + 1])
        spec = strip_cuts(params, mid)
        center = spec.labels.index(IntegerPair(0, 0))
        return spec.labels[center + messages[1].symbol]
    if scheme == "21":
        assert isinstance(quantizer, Quantizer21)
        pos = messages[0].symbol + quantizer.center
        mid = 0.5 * (quantizer.edges[pos] + quantizer.edges[pos + 1])
        spec = row_cuts(params, mid)
        center = spec.labels.index(IntegerPair(0, 0))
        return spec.labels[center + messages[1].symbol]
    if scheme == "infinite":
        u2 = messages[0].symbol
        if u2 == 0:
            return IntegerPair(0, 0)
        u1 = messages[1].symbol
        if u1 == 0:
            return IntegerPair(0, 0)
        u1m = -u1 if u2 == -1 else u1
        rect = error_rectangle(params, 1, u1m)
        for i in range(2, len(messages), 2):
            b, c = messages[i].symbol, messages[i + 1].symbol
            if b == c:
                decision_m = rect.neighbor if b == 1 else IntegerPair(0, 0)
                return -decision_m if u2 == -1 else decision_m
        raise ValueError("transcript did not halt; decision is not replayable")
    raise ValueError(f"unknown scheme {scheme!r}")

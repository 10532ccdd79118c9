"""Exact geometry of a 2-D lattice with upper-triangular basis.

The lattice is generated by v1 = (1, 0) and v2 = (rho*cos(theta),
rho*sin(theta)) with rho >= 1 and 0 < rho*cos(theta) < 1/2, so the basis is
reduced and the six relevant vectors are +/-v1, +/-v2 and +/-(v2 - v1).  The
nearest-plane (Babai) rule partitions the plane into rectangles of width 1
and height H = rho*sin(theta); this module provides the Babai and exact
nearest-point maps, the Voronoi membership test, and the decision-boundary
structure inside the zero-centred Babai cell B(0) = (-1/2,1/2] x (-H/2,H/2].

Half-open conventions are used uniformly: every interval is (a, b], and
nearest-integer rounding places the residual in (-1/2, 1/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .errors import InvalidParams, OutOfCell

_SPAN_EPS = 1e-12


class IntegerPair(NamedTuple):
    """Lattice coordinates u; the lattice point is V @ u."""

    u1: int
    u2: int

    def __neg__(self) -> "IntegerPair":
        return IntegerPair(-self.u1, -self.u2)


class Point2(NamedTuple):
    """Plane point; x1 is held by node S1 and x2 by node S2."""

    x1: float
    x2: float


@dataclass(frozen=True)
class LatticeParams:
    """Length ratio rho (unitless, >= 1) and angle theta in radians.

    The product rho*cos(theta) must lie strictly in (0, 1/2); the endpoint
    lattices (rectangular, hexagonal) are studied via small offsets.
    """

    rho: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and math.isfinite(self.theta)):
            raise InvalidParams("rho and theta must be finite")
        if self.rho < 1.0:
            raise InvalidParams(f"rho must be >= 1, got {self.rho}")
        c = self.rho * math.cos(self.theta)
        if not 0.0 < c < 0.5:
            raise InvalidParams(
                f"rho*cos(theta) must lie strictly in (0, 1/2), got {c}"
            )

    @property
    def rcos(self) -> float:
        """rho*cos(theta), the horizontal component of v2."""
        return self.rho * math.cos(self.theta)

    @property
    def rsin(self) -> float:
        """rho*sin(theta), the height of the Babai cell."""
        return self.rho * math.sin(self.theta)


@dataclass(frozen=True)
class Generator:
    """Column basis of the lattice; upper triangular by construction."""

    v1: tuple[float, float]
    v2: tuple[float, float]
    det: float


def make_generator(params: LatticeParams) -> Generator:
    """Basis matrix induced by (rho, theta); det = rho*sin(theta) > 0."""
    return Generator(
        v1=(1.0, 0.0),
        v2=(params.rcos, params.rsin),
        det=params.rsin,
    )


def _round_half_low(y: float) -> int:
    """Nearest integer leaving the residual in (-1/2, 1/2]."""
    return int(math.ceil(y - 0.5))


def babai_nearest_plane(x: Point2, gen: Generator) -> IntegerPair:
    """Nearest-plane decode: round x2 against v2, then x1 against v1.

    The residual x - V@u always lands in the half-open Babai cell
    (-1/2, 1/2] x (-H/2, H/2].
    """
    u2 = _round_half_low(x[1] / gen.v2[1])
    u1 = _round_half_low(x[0] - gen.v2[0] * u2)
    return IntegerPair(u1, u2)


def lattice_point(u: IntegerPair, gen: Generator) -> Point2:
    """Plane coordinates of the lattice point V @ u."""
    return Point2(u[0] * gen.v1[0] + u[1] * gen.v2[0], u[1] * gen.v2[1])


def exact_nearest_point(x: Point2, gen: Generator, window: int = 2) -> IntegerPair:
    """True closest lattice point by brute force around the Babai point.

    Scans the (2*window+1)^2 integer window centred on the nearest-plane
    decode (window=2 is already generous; the minimiser differs from the
    Babai point by at most a relevant vector).  Ties go to the candidate
    with the smallest (u2, u1).
    """
    b = babai_nearest_plane(x, gen)
    best: IntegerPair | None = None
    best_d2 = math.inf
    for du2 in range(-window, window + 1):
        for du1 in range(-window, window + 1):
            u = IntegerPair(b.u1 + du1, b.u2 + du2)
            p = lattice_point(u, gen)
            d2 = (x[0] - p[0]) ** 2 + (x[1] - p[1]) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = u
    assert best is not None
    return best


def relevant_vectors(gen: Generator) -> list[IntegerPair]:
    """The six lattice vectors whose bisectors carry the Voronoi faces."""
    base = [IntegerPair(1, 0), IntegerPair(0, 1), IntegerPair(-1, 1)]
    out: list[IntegerPair] = []
    for r in base:
        out.append(r)
        out.append(-r)
    return out


def in_voronoi_cell(x: Point2, gen: Generator) -> bool:
    """Closed-cell membership: x.(Vr) <= |Vr|^2/2 for all six relevant r."""
    for r in relevant_vectors(gen):
        n = lattice_point(r, gen)
        if x[0] * n[0] + x[1] * n[1] > 0.5 * (n[0] ** 2 + n[1] ** 2):
            return False
    return True


@dataclass(frozen=True)
class BoundarySegment:
    """Portion of a perpendicular bisector inside B(0).

    The line is x . normal = offset with normal = V@neighbor and
    offset = |V@neighbor|^2 / 2; spans are stored ascending and interpreted
    half-open per the package convention.
    """

    neighbor: IntegerPair
    normal: tuple[float, float]
    offset: float
    x1_span: tuple[float, float]
    x2_span: tuple[float, float]
    slope: float

    def x2_at(self, x1: float) -> float:
        """Height of the bisector above x1 (the line is never vertical here)."""
        return (self.offset - self.normal[0] * x1) / self.normal[1]

    def x1_at(self, x2: float) -> float:
        """Abscissa of the bisector at height x2."""
        return (self.offset - self.normal[1] * x2) / self.normal[0]


@dataclass(frozen=True)
class CellGeometry:
    """All decision-boundary constants of the zero-centred Babai cell.

    t_* are x1 thresholds, tau_* x2 thresholds; L* interval lengths along
    x1 (L = 1) and H* heights along x2 (H = rho*sin(theta)).  H1 is the
    height of the four error triangles B(0) \\ V(0) carves at the top and
    bottom edges; H21/H22 split it at the x1 threshold t_2.
    """

    t_m2: float
    t_m1: float
    t_1: float
    t_2: float
    tau_m1: float
    tau_1: float
    L0: float
    L1: float
    L2: float
    L: float
    H: float
    H0: float
    H1: float
    H21: float
    H22: float
    boundary_segments: tuple[BoundarySegment, ...]


@dataclass(frozen=True)
class CutSpec:
    """Decision thresholds along one strip of B(0) and the region labels.

    cuts are ascending and strictly interior to the strip's cross-section;
    labels[i] is the exact-nearest lattice point of the i-th sub-interval,
    ordered bottom-to-top (strip_cuts) or left-to-right (row_cuts).
    """

    cuts: tuple[float, ...]
    labels: tuple[IntegerPair, ...]


def _clip_bisector(neighbor: IntegerPair, gen: Generator, H: float) -> BoundarySegment | None:
    """Intersect the bisector of 0 and V@neighbor with the interior of B(0)."""
    n = lattice_point(neighbor, gen)
    offset = 0.5 * (n[0] ** 2 + n[1] ** 2)
    if abs(n[1]) < _SPAN_EPS:
        # vertical bisector (neighbors +/-(1,0)): coincides with a cell edge
        return None
    lo, hi = -0.5, 0.5
    # restrict to x1 where the line's height stays within [-H/2, H/2]
    x1_at_top = (offset - n[1] * (H / 2)) / n[0] if abs(n[0]) > _SPAN_EPS else None
    x1_at_bot = (offset - n[1] * (-H / 2)) / n[0] if abs(n[0]) > _SPAN_EPS else None
    if x1_at_top is not None and x1_at_bot is not None:
        a, b = sorted((x1_at_top, x1_at_bot))
        lo, hi = max(lo, a), min(hi, b)
    if hi - lo <= _SPAN_EPS:
        return None
    y_lo = (offset - n[0] * lo) / n[1]
    y_hi = (offset - n[0] * hi) / n[1]
    return BoundarySegment(
        neighbor=neighbor,
        normal=n,
        offset=offset,
        x1_span=(lo, hi),
        x2_span=(min(y_lo, y_hi), max(y_lo, y_hi)),
        slope=-n[0] / n[1],
    )


@lru_cache(maxsize=256)
def cell_geometry(params: LatticeParams) -> CellGeometry:
    """Thresholds, lengths, heights and boundary segments of B(0)."""
    gen = make_generator(params)
    c = params.rcos
    H = params.rsin
    cos_t = math.cos(params.theta)
    sin_t = math.sin(params.theta)
    H1 = cos_t * (1.0 - params.rho * cos_t) / (2.0 * sin_t)
    segments = []
    for r in relevant_vectors(gen):
        seg = _clip_bisector(r, gen, H)
        if seg is not None:
            segments.append(seg)
    return CellGeometry(
        t_m2=(c - 1.0) / 2.0,
        t_m1=-c / 2.0,
        t_1=c / 2.0,
        t_2=(1.0 - c) / 2.0,
        tau_m1=-(H / 2.0 - H1),
        tau_1=H / 2.0 - H1,
        L0=c,
        L1=(1.0 - 2.0 * c) / 2.0,
        L2=c / 2.0,
        L=1.0,
        H=H,
        H0=H - 2.0 * H1,
        H1=H1,
        H21=cos_t * (1.0 - 2.0 * params.rho * cos_t) / (2.0 * sin_t),
        H22=params.rho * cos_t * cos_t / (2.0 * sin_t),
        boundary_segments=tuple(segments),
    )


def _cuts_along_vertical(geom: CellGeometry, x1: float) -> list[float]:
    """Heights where boundary segments cross the vertical line at x1.

    Segment spans are treated closed here (with an ulp-level slack, since
    span endpoints come from line algebra); cuts landing on the cell's top
    or bottom edge are dropped, which realises the half-open interval rules
    exactly (e.g. x1 = t_1 belongs to the cut-free central strip).
    """
    cuts = []
    for seg in geom.boundary_segments:
        if seg.x1_span[0] - _SPAN_EPS <= x1 <= seg.x1_span[1] + _SPAN_EPS:
            y = seg.x2_at(x1)
            if -geom.H / 2.0 < y < geom.H / 2.0:
                cuts.append(y)
    cuts.sort()
    return cuts


def _cuts_along_horizontal(geom: CellGeometry, x2: float) -> list[float]:
    """Abscissae where boundary segments cross the horizontal line at x2."""
    cuts = []
    for seg in geom.boundary_segments:
        if seg.x2_span[0] - _SPAN_EPS <= x2 <= seg.x2_span[1] + _SPAN_EPS:
            x = seg.x1_at(x2)
            if -0.5 < x < 0.5:
                cuts.append(x)
    cuts.sort()
    return cuts


def _labelled(
    params: LatticeParams, cuts: list[float], lo: float, hi: float, vertical: bool, coord: float
) -> CutSpec:
    gen = make_generator(params)
    edges = [lo, *cuts, hi]
    labels = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        pt = Point2(coord, mid) if vertical else Point2(mid, coord)
        labels.append(exact_nearest_point(pt, gen))
    return CutSpec(cuts=tuple(cuts), labels=tuple(labels))


def strip_cuts(params: LatticeParams, x1: float) -> CutSpec:
    """Decision thresholds in x2 along the vertical line at x1.

    The central strip (t_m1, t_1] is cut-free; strips over I_{+/-1} carry one
    cut and strips over I_{+/-2} two, each label being the nearest lattice
    point of its sub-interval.
    """
    geom = cell_geometry(params)
    if not -0.5 < x1 <= 0.5:
        raise OutOfCell(f"x1 = {x1} outside (-1/2, 1/2]")
    cuts = _cuts_along_vertical(geom, x1)
    return _labelled(params, cuts, -geom.H / 2.0, geom.H / 2.0, True, x1)


def row_cuts(params: LatticeParams, x2: float) -> CutSpec:
    """Decision thresholds in x1 along the horizontal line at x2.

    The central band (tau_m1, tau_1] is cut-free; every row through the top
    or bottom band is crossed by both of that band's boundary segments.
    """
    geom = cell_geometry(params)
    if not -geom.H / 2.0 < x2 <= geom.H / 2.0:
        raise OutOfCell(f"x2 = {x2} outside (-H/2, H/2]")
    cuts = _cuts_along_horizontal(geom, x2)
    return _labelled(params, cuts, -0.5, 0.5, False, x2)


def _clip_polygon_halfplane(
    poly: list[tuple[float, float]], n: tuple[float, float], offset: float
) -> list[tuple[float, float]]:
    """Sutherland-Hodgman step: keep the side x.n <= offset."""
    out: list[tuple[float, float]] = []
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        fp = p[0] * n[0] + p[1] * n[1] - offset
        fq = q[0] * n[0] + q[1] * n[1] - offset
        if fp <= 0.0:
            out.append(p)
        if (fp < 0.0 < fq) or (fq < 0.0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _polygon_area(poly: list[tuple[float, float]]) -> float:
    s = 0.0
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        s += p[0] * q[1] - q[0] * p[1]
    return 0.5 * abs(s)


def babai_error_probability(params: LatticeParams) -> float:
    """Probability that the Babai decode differs from the true nearest point.

    Exact area of B(0) \\ V(0) over det V, obtained by clipping the Babai
    rectangle against the six Voronoi half-planes; the remainder is the four
    corner-band error triangles.
    """
    gen = make_generator(params)
    H = params.rsin
    poly = [(-0.5, -H / 2), (0.5, -H / 2), (0.5, H / 2), (-0.5, H / 2)]
    for r in relevant_vectors(gen):
        n = lattice_point(r, gen)
        poly = _clip_polygon_halfplane(poly, n, 0.5 * (n[0] ** 2 + n[1] ** 2))
        if not poly:
            break
    return (gen.det - _polygon_area(poly)) / gen.det

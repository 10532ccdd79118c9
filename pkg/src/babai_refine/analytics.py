"""Closed-form error probabilities, rates and asymptotics for the three
interactive refinement schemes.

Scheme "12": S1 quantizes x1 into 2*N1 + 2*N2 + 1 bins and S2 answers with a
ternary decision; scheme "21" is the mirror with a single size parameter N;
the infinite-round scheme resolves the Voronoi cell exactly with finite
expected cost.  All rate figures are ideal-codelength entropies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetTooSmall, DegenerateInterval, InvalidDistribution
from .lattice import CellGeometry, LatticeParams, cell_geometry
from .quadrature import adaptive_simpson

_SUM_TOL = 1e-10
_SPAN_TOL = 1e-12
# the 12-scheme rate costs O(n2) to evaluate exactly; the 21-scheme is O(1)
_MAX_CURVE_SIZE = {"12": 1 << 20, "21": 1 << 62}


@dataclass(frozen=True)
class Distribution:
    """Finite probability vector; entries >= 0 summing to 1 within 1e-10."""

    probs: tuple[float, ...]

    def __post_init__(self):
        if any((not math.isfinite(p)) or p < 0.0 for p in self.probs):
            raise InvalidDistribution(f"negative or non-finite mass in {self.probs}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > _SUM_TOL:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")


def entropy(d: Distribution | Sequence[float]) -> float:
    """Shannon entropy in bits, with 0*log(0) = 0."""
    if not isinstance(d, Distribution):
        d = Distribution(tuple(float(p) for p in d))
    return _entropy_raw(d.probs)


def _entropy_raw(probs: Iterable[float]) -> float:
    return -math.fsum(p * math.log2(p) for p in probs if p > 0.0)


@dataclass(frozen=True)
class Scheme12Coefficients:
    """Coefficients of P_e = alpha1/N1 + alpha2/N2 for the 12-order scheme.

    provenance is "geometry_derived" (normative; from the boundary-segment
    spans) or "printed" (the widely circulated closed form, whose height
    factors are interchanged between the two intervals relative to the
    boundary spans; kept so the Monte Carlo adjudication can report which
    variant it confirms).
    """

    alpha1: float
    alpha2: float
    provenance: str


def _interval_error_coefficient(geom: CellGeometry, a: float, b: float) -> float:
    """Sum over boundary segments spanning [a, b] of length * rise / (2 detV).

    This is the per-interval coefficient of 1/N for equal-width bins with
    mid-height cuts, already including the +/- mirror interval.
    """
    total = 0.0
    for seg in geom.boundary_segments:
        if seg.x1_span[0] <= a + _SPAN_TOL and b <= seg.x1_span[1] + _SPAN_TOL:
            rise = abs(seg.x2_at(b) - seg.x2_at(a))
            total += (b - a) * rise / (2.0 * geom.H)
    return total


def coefficients_12(
    params: LatticeParams, provenance: str = "geometry_derived"
) -> Scheme12Coefficients:
    """Error coefficients (alpha1, alpha2) of the single-round 12 scheme.

    The geometry-derived values follow from the exact spans of the Voronoi
    boundary over I_1 (one segment, rise H21) and I_2 (two segments, rises
    H22 and H1): alpha1 = L1*H21/(2 detV), alpha2 = L2*(H1+H22)/(2 detV).
    """
    geom = cell_geometry(params)
    if provenance == "geometry_derived":
        a1 = _interval_error_coefficient(geom, geom.t_1, geom.t_2)
        a2 = _interval_error_coefficient(geom, geom.t_2, 0.5)
    elif provenance == "printed":
        a1 = geom.L1 * (geom.H1 + geom.H22) / (2.0 * geom.H)
        a2 = geom.H21 * geom.L2 / (2.0 * geom.H)
    else:
        raise ValueError(f"unknown provenance {provenance!r}")
    return Scheme12Coefficients(alpha1=a1, alpha2=a2, provenance=provenance)


def pe_12(params: LatticeParams, n1: int, n2: int) -> float:
    """Exact error probability alpha1/n1 + alpha2/n2 of the 12 scheme."""
    if n1 < 1 or n2 < 1:
        raise ValueError("quantizer sizes must be >= 1")
    co = coefficients_12(params)
    return co.alpha1 / n1 + co.alpha2 / n2


def bin_edges_12(params: LatticeParams, n1: int, n2: int) -> np.ndarray:
    """Edges of the 2*n1 + 2*n2 + 1 bins over (-1/2, 1/2], ascending.

    N2 equal bins on each outer interval, N1 on each inner one, and a single
    bin on the cut-free centre.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("quantizer sizes must be >= 1")
    g = cell_geometry(params)
    return np.concatenate(
        [
            np.linspace(-0.5, g.t_m2, n2 + 1),
            np.linspace(g.t_m2, g.t_m1, n1 + 1)[1:],
            np.array([g.t_1]),
            np.linspace(g.t_1, g.t_2, n1 + 1)[1:],
            np.linspace(g.t_2, 0.5, n2 + 1)[1:],
        ]
    )


def bin_edges_21(params: LatticeParams, n: int) -> np.ndarray:
    """Edges of the 2*n + 1 bins over (-H/2, H/2], ascending."""
    if n < 1:
        raise ValueError("quantizer size must be >= 1")
    g = cell_geometry(params)
    return np.concatenate(
        [
            np.linspace(-g.H / 2.0, g.tau_m1, n + 1),
            np.array([g.tau_1]),
            np.linspace(g.tau_1, g.H / 2.0, n + 1)[1:],
        ]
    )


def _vertical_pieces(geom: CellGeometry, x1: float) -> list[float]:
    """Widths of the decision pieces of the vertical cross-section at x1.

    Segment spans are treated closed and the cuts clamped into the cell, so
    the result is continuous in x1 (edge cuts yield zero-width pieces).
    """
    h = geom.H / 2.0
    cuts = []
    for seg in geom.boundary_segments:
        if seg.x1_span[0] - _SPAN_TOL <= x1 <= seg.x1_span[1] + _SPAN_TOL:
            cuts.append(min(h, max(-h, seg.x2_at(x1))))
    cuts.sort()
    edges = [-h, *cuts, h]
    return [b - a for a, b in zip(edges[:-1], edges[1:])]


def _horizontal_pieces(geom: CellGeometry, x2: float) -> list[float]:
    """Widths of the decision pieces of the horizontal cross-section at x2."""
    cuts = []
    for seg in geom.boundary_segments:
        if seg.x2_span[0] - _SPAN_TOL <= x2 <= seg.x2_span[1] + _SPAN_TOL:
            cuts.append(min(0.5, max(-0.5, seg.x1_at(x2))))
    cuts.sort()
    edges = [-0.5, *cuts, 0.5]
    return [b - a for a, b in zip(edges[:-1], edges[1:])]


def _strip_decision_entropy(geom: CellGeometry, x1: float) -> float:
    """Entropy of S2's ternary answer when the cuts sit at the boundary at x1."""
    pieces = _vertical_pieces(geom, x1)
    return _entropy_raw(w / geom.H for w in pieces)


def _row_decision_entropy(geom: CellGeometry, x2: float) -> float:
    """Entropy of S1's ternary answer when the cuts sit at the boundary at x2."""
    pieces = _horizontal_pieces(geom, x2)
    return _entropy_raw(list(pieces))


def rate_12(params: LatticeParams, n1: int, n2: int) -> tuple[float, float]:
    """(H(U1), H(U2|U1)) in bits for the 12 scheme at sizes (n1, n2).

    H(U1) is the bin-index entropy; H(U2|U1) averages, over bins, the exact
    entropy of the ternary answer with cuts at the bin-midpoint heights.
    """
    g = cell_geometry(params)
    lengths = (g.L0, g.L1, g.L1, g.L2, g.L2)
    h_u1 = (
        _entropy_raw(lengths)
        + 2.0 * g.L1 * math.log2(n1)
        + 2.0 * g.L2 * math.log2(n2)
    )
    edges = bin_edges_12(params, n1, n2)
    h_u2 = 0.0
    for a, b in zip(edges[:-1].tolist(), edges[1:].tolist()):
        mid = 0.5 * (a + b)
        if g.t_m1 < mid <= g.t_1:
            continue  # centre bin is cut-free
        h_u2 += (b - a) * _strip_decision_entropy(g, mid)
    return h_u1, h_u2


@lru_cache(maxsize=256)
def kappa_12(params: LatticeParams, abs_tol: float = 1e-9) -> float:
    """Limiting H(U2|U1) as the 12-scheme bins shrink.

    (2/L) * integral of the strip decision entropy over (-1/2, t_m1], split
    at t_m2 where the integrand has a kink.
    """
    g = cell_geometry(params)
    f = lambda x: _strip_decision_entropy(g, x)
    piece_tol = abs_tol / 4.0
    return 2.0 * (
        adaptive_simpson(f, -0.5, g.t_m2, piece_tol)
        + adaptive_simpson(f, g.t_m2, g.t_m1, piece_tol)
    )


@lru_cache(maxsize=256)
def kappa_21(params: LatticeParams, abs_tol: float = 1e-9) -> float:
    """Limiting H(U1|U2) as the 21-scheme bins shrink.

    (2/H) * integral of the row decision entropy over (-H/2, tau_m1]; the
    integrand is smooth there (both boundary segments span the whole band).
    """
    g = cell_geometry(params)
    f = lambda x: _row_decision_entropy(g, x)
    return (2.0 / g.H) * adaptive_simpson(f, -g.H / 2.0, g.tau_m1, abs_tol * g.H / 2.0)


def optimal_n1(params: LatticeParams, n2: int) -> int:
    """Rate-constrained minimiser N1(N2) = ceil(alpha1*L2*N2 / (alpha2*L1))."""
    if n2 < 1:
        raise ValueError("n2 must be >= 1")
    g = cell_geometry(params)
    if g.L1 <= 0.0:
        raise DegenerateInterval("L1 = 0 (hexagonal limit); use n1 = 1")
    co = coefficients_12(params)
    return max(1, math.ceil(co.alpha1 * g.L2 * n2 / (co.alpha2 * g.L1)))


@dataclass(frozen=True)
class TradeoffPoint:
    """One (rate, error) point of a quantizer family; n1/n2 for the 12
    scheme, n for the 21 scheme."""

    rate_bits: float
    pe: float
    n1: int | None = None
    n2: int | None = None
    n: int | None = None


def tradeoff_curve_12(params: LatticeParams, n2_max: int) -> list[TradeoffPoint]:
    """Pareto (rate, pe) points for n2 = 1..n2_max with n1 = optimal_n1(n2)."""
    if n2_max < 1:
        raise ValueError("n2_max must be >= 1")
    points = []
    for n2 in range(1, n2_max + 1):
        n1 = optimal_n1(params, n2)
        h1, h2 = rate_12(params, n1, n2)
        points.append(
            TradeoffPoint(rate_bits=h1 + h2, pe=pe_12(params, n1, n2), n1=n1, n2=n2)
        )
    points.sort(key=lambda p: p.rate_bits)
    pruned: list[TradeoffPoint] = []
    for p in points:
        if not pruned or p.pe < pruned[-1].pe:
            pruned.append(p)
    return pruned


def asymptotic_constant_12(params: LatticeParams, form: str = "geometric") -> float:
    """Limit of pe * 2^(L*R / (2*(L1+L2))) along the optimal 12 curve.

    The "geometric" form is stated in cell lengths; the "probability" form
    restates it with P_i = L_i/L and exponent 1/(1-P0).  Both evaluate
    identically (L = 1).
    """
    g = cell_geometry(params)
    if g.L1 <= 0.0:
        raise DegenerateInterval("L1 = 0 (hexagonal limit)")
    co = coefficients_12(params)
    kap = kappa_12(params)
    ratio = co.alpha1 * g.L2 / (co.alpha2 * g.L1)
    lead = co.alpha2 * (1.0 + g.L1 / g.L2) * ratio ** (g.L1 / (g.L1 + g.L2))
    if form == "geometric":
        h_len = _entropy_raw((g.L0, g.L1, g.L1, g.L2, g.L2))
        return lead * 2.0 ** (g.L * (kap + h_len) / (2.0 * (g.L1 + g.L2)))
    if form == "probability":
        p = (g.L0 / g.L, g.L1 / g.L, g.L1 / g.L, g.L2 / g.L, g.L2 / g.L)
        return lead * 2.0 ** ((kap + _entropy_raw(p)) / (1.0 - p[0]))
    raise ValueError(f"unknown form {form!r}")


def beta_21(params: LatticeParams) -> float:
    """Error coefficient of the 21 scheme: pe = beta / N.

    Printed closed form (1/2)*((2*L2+L1)/L)*(H1/H); the span-based
    re-derivation _beta_21_from_spans must agree.
    """
    g = cell_geometry(params)
    return 0.5 * ((2.0 * g.L2 + g.L1) / g.L) * (g.H1 / g.H)


def _beta_21_from_spans(params: LatticeParams) -> float:
    """beta from the boundary-segment runs across the top band (oracle route)."""
    g = cell_geometry(params)
    total = 0.0
    for seg in g.boundary_segments:
        if seg.x2_span[0] <= g.tau_1 + _SPAN_TOL and g.H / 2.0 <= seg.x2_span[1] + _SPAN_TOL:
            run = abs(seg.x1_at(g.H / 2.0) - seg.x1_at(g.tau_1))
            total += g.H1 * run / (2.0 * g.H)
    return total


def pe_21(params: LatticeParams, n: int) -> float:
    """Exact error probability beta/n of the 21 scheme."""
    if n < 1:
        raise ValueError("quantizer size must be >= 1")
    return beta_21(params) / n


def rate_21(params: LatticeParams, n: int) -> float:
    """Total rate H(Q) + (1-Q0)*log2(N) + kappa of the 21 scheme."""
    if n < 1:
        raise ValueError("quantizer size must be >= 1")
    g = cell_geometry(params)
    q = (g.H1 / g.H, g.H0 / g.H, g.H1 / g.H)
    return _entropy_raw(q) + (1.0 - q[1]) * math.log2(n) + kappa_21(params)


def asymptotic_constant_21(params: LatticeParams) -> float:
    """Limit of pe * 2^(R/(1-Q0)) for the 21 scheme: beta * 2^((H(Q)+kappa)/(1-Q0))."""
    g = cell_geometry(params)
    q = (g.H1 / g.H, g.H0 / g.H, g.H1 / g.H)
    return beta_21(params) * 2.0 ** ((_entropy_raw(q) + kappa_21(params)) / (1.0 - q[1]))


def round1_distributions(params: LatticeParams) -> tuple[Distribution, Distribution]:
    """(Q, P): first-round message distributions of the infinite scheme.

    Q is S2's band index over (J_-1, J_0, J_1); P is S1's interval index
    over the coarse three-way x1 partition, conditioned on U2 = 1.  Both are
    indexed (-1, 0, +1).  P0 = 1/2 identically.
    """
    g = cell_geometry(params)
    c = params.rcos
    q = Distribution((g.H1 / g.H, g.H0 / g.H, g.H1 / g.H))
    p = Distribution((c / 2.0, 0.5, (1.0 - c) / 2.0))
    return q, p


def rbar_infinite(params: LatticeParams) -> float:
    """Expected total ideal bits of the infinite-round zero-error scheme."""
    q, p = round1_distributions(params)
    q0, p0 = q.probs[1], p.probs[1]
    return entropy(q) + (1.0 - q0) * entropy(p) + 4.0 * (1.0 - p0) * (1.0 - q0)


def nbar_infinite(params: LatticeParams) -> float:
    """Expected number of rounds of the infinite-round scheme."""
    q, p = round1_distributions(params)
    return 1.0 + 2.0 * (1.0 - p.probs[1]) * (1.0 - q.probs[1])


def curve_point(params: LatticeParams, scheme: str | int, size: int) -> TradeoffPoint:
    """The (rate, pe) point of a scheme at one size index.

    For scheme "12" the index is n2 with n1 = optimal_n1(n2); for "21" it is
    the single size n.
    """
    key = str(scheme)
    if key == "12":
        n1 = optimal_n1(params, size)
        h1, h2 = rate_12(params, n1, size)
        return TradeoffPoint(
            rate_bits=h1 + h2, pe=pe_12(params, n1, size), n1=n1, n2=size
        )
    if key == "21":
        return TradeoffPoint(rate_bits=rate_21(params, size), pe=pe_21(params, size), n=size)
    raise ValueError(f"unknown scheme {scheme!r}")


def budget_point(
    params: LatticeParams, scheme: str | int, rate_budget: float
) -> TradeoffPoint:
    """Finest curve point whose rate does not exceed the budget.

    Found by exponential search plus bisection on the monotone rate; raises
    BudgetTooSmall below the coarsest quantizer's rate.  The search is
    bounded by a per-scheme size cap; when even the cap point's rate stays
    within the budget (the 21 scheme's rate saturates as theta approaches
    pi/2, where 1-Q0 vanishes), the cap point is returned.
    """
    first = curve_point(params, scheme, 1)
    if rate_budget < first.rate_bits:
        raise BudgetTooSmall(
            f"budget {rate_budget} below coarsest rate "
            f"{first.rate_bits:.6f} of scheme {scheme}"
        )
    cap = _MAX_CURVE_SIZE[str(scheme)]
    lo = 1
    hi = None
    h = 2
    while h <= cap:
        if curve_point(params, scheme, h).rate_bits > rate_budget:
            hi = h
            break
        lo = h
        h *= 2
    if hi is None:
        if lo < cap and curve_point(params, scheme, cap).rate_bits > rate_budget:
            hi = cap
        else:
            return curve_point(params, scheme, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if curve_point(params, scheme, mid).rate_bits <= rate_budget:
            lo = mid
        else:
            hi = mid
    return curve_point(params, scheme, lo)


def pe_at_rate(
    params: LatticeParams, scheme: str | int, rate_budget: float
) -> tuple[float, float]:
    """Error probability of a scheme at a rate budget.

    Returns (pe_below, pe_interp): pe of the best curve point with rate <=
    budget, and the log-linear interpolation of pe between the two Pareto
    points bracketing the budget.  Raises BudgetTooSmall below the coarsest
    quantizer's rate.  If the whole representable curve sits below the
    budget (21 scheme near theta = pi/2), the interpolation extrapolates
    from the last two points, which is exact for the 21 scheme whose points
    are collinear in (rate, log2 pe), and typically underflows to 0.0.
    """
    below = budget_point(params, scheme, rate_budget)
    size = below.n2 if str(scheme) == "12" else below.n
    if size < _MAX_CURVE_SIZE[str(scheme)]:
        pair = (below, curve_point(params, scheme, size + 1))
    else:
        pair = (curve_point(params, scheme, size - 1), below)
    (r_a, p_a), (r_b, p_b) = (
        (pair[0].rate_bits, pair[0].pe),
        (pair[1].rate_bits, pair[1].pe),
    )
    if r_b == r_a:
        return below.pe, below.pe
    frac = (rate_budget - r_a) / (r_b - r_a)
    pe_interp = 2.0 ** (math.log2(p_a) + frac * (math.log2(p_b) - math.log2(p_a)))
    return below.pe, pe_interp

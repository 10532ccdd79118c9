"""Uniform sampling over the Babai cell and vectorized protocol estimators.

Sampling is counter-based (SplitMix64 keyed by the seed, indexed by the
trial number), so every trial is a pure function of (seed, trial_index) and
reports are bit-identical regardless of how trials are batched or scheduled.
The run_batch_* kernels evaluate a whole array of trials at once and return
per-trial arrays; simulate() reduces them into a SimReport with binomial /
sample standard errors next to the closed-form predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytics
from .lattice import (
    LatticeParams,
    Point2,
    babai_error_probability,
    cell_geometry,
    row_cuts,
    strip_cuts,
)
from .protocols import DEFAULT_MAX_ROUNDS

SCHEMES = ("12", "21", "infinite", "babai_only")

_CHUNK = 1 << 20

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _unit_open_closed(seed: int, index: np.ndarray, slot: int) -> np.ndarray:
    """Uniform double in (0, 1], a pure function of (seed, index, slot)."""
    counter = np.uint64(2) * index.astype(np.uint64) + np.uint64(slot + 1)
    word = _splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + counter * _GOLDEN)
    return ((word >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def sample_cell_arrays(
    params: LatticeParams, trial_index: np.ndarray, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points over (-1/2,1/2] x (-H/2,H/2], one per trial index."""
    idx = np.asarray(trial_index, dtype=np.uint64)
    x1 = _unit_open_closed(seed, idx, 0) - 0.5
    x2 = (_unit_open_closed(seed, idx, 1) - 0.5) * params.rsin
    return x1, x2


def sample_uniform_babai_cell(params: LatticeParams, trial_index: int, seed: int) -> Point2:
    """Single uniform point over the zero-centred Babai cell."""
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    x1, x2 = sample_cell_arrays(params, np.array([trial_index], dtype=np.uint64), seed)
    return Point2(float(x1[0]), float(x2[0]))


_U64 = 0xFFFFFFFFFFFFFFFF


def _mix64_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Deterministic 64-bit sub-seed for a named stream of a master seed."""
    base = ((seed & _U64) + 0x9E3779B97F4A7C15 * (stream + 1)) & _U64
    return _mix64_int(_mix64_int(base))


def _round_half_low(y: np.ndarray) -> np.ndarray:
    return np.ceil(y - 0.5)


def babai_batch(params: LatticeParams, x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized nearest-plane decode."""
    c, s = params.rcos, params.rsin
    u2 = _round_half_low(x2 / s)
    u1 = _round_half_low(x1 - c * u2)
    return u1, u2


_WINDOW_OFFSETS = np.array(
    [(du1, du2) for du2 in range(-2, 3) for du1 in range(-2, 3)], dtype=np.float64
)


def exact_nearest_batch(
    params: LatticeParams, x1: np.ndarray, x2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized brute-force nearest point over the 5x5 window around Babai.

    Candidates are scanned in ascending (u2, u1) order with strict-improvement
    updates, so exact distance ties resolve to the lexicographically smallest
    coordinates, matching the scalar oracle.
    """
    c, s = params.rcos, params.rsin
    b1, b2 = babai_batch(params, x1, x2)
    best_d2 = np.full(x1.shape, np.inf)
    best_u1 = np.zeros_like(x1)
    best_u2 = np.zeros_like(x1)
    for du1, du2 in _WINDOW_OFFSETS:
        cu1 = b1 + du1
        cu2 = b2 + du2
        dx = x1 - (cu1 + c * cu2)
        dy = x2 - s * cu2
        d2 = dx * dx + dy * dy
        better = d2 < best_d2
        best_d2[better] = d2[better]
        best_u1[better] = cu1[better]
        best_u2[better] = cu2[better]
    return best_u1, best_u2


def _strip_cut_tables(params: LatticeParams, edges: np.ndarray, vertical: bool):
    """Per-bin cut positions, region probabilities and labels for a quantizer.

    Returns (locut, upcut, probs[nbins,3], labels[nbins,3,2]); missing cuts
    are +/-inf with zero-probability outer regions and (0,0) filler labels.
    """
    g = cell_geometry(params)
    span = g.H if vertical else 1.0
    lo_edge = -span / 2.0
    nbins = len(edges) - 1
    locut = np.full(nbins, -np.inf)
    upcut = np.full(nbins, np.inf)
    probs = np.zeros((nbins, 3))
    labels = np.zeros((nbins, 3, 2))
    for i in range(nbins):
        mid = 0.5 * (edges[i] + edges[i + 1])
        spec = strip_cuts(params, mid) if vertical else row_cuts(params, mid)
        center = spec.labels.index((0, 0))
        cuts = spec.cuts
        piece_edges = [lo_edge, *cuts, span / 2.0]
        for r, lab in enumerate(spec.labels):
            probs[i, r - center + 1] = (piece_edges[r + 1] - piece_edges[r]) / span
            labels[i, r - center + 1] = lab
        if len(cuts) == 2:
            locut[i], upcut[i] = cuts
        elif len(cuts) == 1:
            if center == 1:  # single cut below the (0,0) region
                locut[i] = cuts[0]
            else:  # single cut above it
                upcut[i] = cuts[0]
    return locut, upcut, probs, labels


def run_batch_12(
    params: LatticeParams, n1: int, n2: int, x1: np.ndarray, x2: np.ndarray
) -> dict[str, np.ndarray]:
    """Vectorized 12-order single round over arrays of in-cell points.

    Returns u1_symbol, u2_symbol, u1_bits, u2_bits, dec1, dec2 per trial.
    """
    edges = analytics.bin_edges_12(params, n1, n2)
    locut, upcut, probs, labels = _strip_cut_tables(params, edges, vertical=True)
    pos = np.clip(np.searchsorted(edges, x1, side="left") - 1, 0, len(edges) - 2)
    widths = np.diff(edges)
    u1_bits = -np.log2(widths[pos])
    u2_sym = np.where(x2 > upcut[pos], 1, np.where(x2 <= locut[pos], -1, 0))
    rows = np.arange(len(pos))
    u2_bits = -np.log2(probs[pos, u2_sym + 1])
    dec = labels[pos, u2_sym + 1]
    return {
        "u1_symbol": pos - (n1 + n2),
        "u2_symbol": u2_sym,
        "u1_bits": u1_bits,
        "u2_bits": u2_bits,
        "dec1": dec[rows, 0],
        "dec2": dec[rows, 1],
    }


def run_batch_21(
    params: LatticeParams, n: int, x1: np.ndarray, x2: np.ndarray
) -> dict[str, np.ndarray]:
    """Vectorized 21-order single round (S2 quantizes, S1 answers)."""
    g = cell_geometry(params)
    edges = analytics.bin_edges_21(params, n)
    lcut, rcut, probs, labels = _strip_cut_tables(params, edges, vertical=False)
    pos = np.clip(np.searchsorted(edges, x2, side="left") - 1, 0, len(edges) - 2)
    widths = np.diff(edges)
    u2_bits = -np.log2(widths[pos] / g.H)
    u1_sym = np.where(x1 > rcut[pos], 1, np.where(x1 <= lcut[pos], -1, 0))
    rows = np.arange(len(pos))
    u1_bits = -np.log2(probs[pos, u1_sym + 1])
    dec = labels[pos, u1_sym + 1]
    return {
        "u2_symbol": pos - n,
        "u1_symbol": u1_sym,
        "u2_bits": u2_bits,
        "u1_bits": u1_bits,
        "dec1": dec[rows, 0],
        "dec2": dec[rows, 1],
    }


def run_batch_infinite(
    params: LatticeParams,
    x1: np.ndarray,
    x2: np.ndarray,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> dict[str, np.ndarray]:
    """Vectorized infinite-round scheme.

    Returns per-trial total bits, rounds, decisions, halted flags, the
    entered-error-rectangle indicator and the number of bisection rounds
    (for the geometric halting-law checks).
    """
    g = cell_geometry(params)
    q_dist, p_dist = analytics.round1_distributions(params)
    q = np.array(q_dist.probs)
    p = np.array(p_dist.probs)
    n = len(x1)
    u2 = np.where(x2 > g.tau_1, 1, np.where(x2 <= g.tau_m1, -1, 0))
    bits = -np.log2(q[u2 + 1])
    rounds = np.ones(n, dtype=np.int64)
    dec1 = np.zeros(n)
    dec2 = np.zeros(n)
    mirror = u2 == -1
    mx1 = np.where(mirror, -x1, x1)
    mx2 = np.where(mirror, -x2, x2)
    active = u2 != 0
    u1m = np.zeros(n, dtype=np.int64)
    u1m[active] = np.where(mx1[active] > g.t_1, 1, np.where(mx1[active] <= g.t_m2, -1, 0))
    bits[active] -= np.log2(p[u1m[active] + 1])
    entered = active & (u1m != 0)

    y1 = np.zeros(n)
    y2 = np.zeros(n)
    is_right = entered & (u1m == 1)
    is_left = entered & (u1m == -1)
    y1[is_right] = (mx1[is_right] - g.t_1) / (0.5 - g.t_1)
    y1[is_left] = 1.0 - (mx1[is_left] + 0.5) / (g.t_m2 + 0.5)
    y2[entered] = (mx2[entered] - g.tau_1) / g.H1

    halted = ~entered
    live = entered.copy()
    final_bit = np.zeros(n, dtype=np.int64)
    extra_rounds = np.zeros(n, dtype=np.int64)
    for _ in range(max_rounds - 1):
        idx = np.flatnonzero(live)
        if idx.size == 0:
            break
        b = (y1[idx] > 0.5).astype(np.int64)
        c = (y2[idx] > 0.5).astype(np.int64)
        extra_rounds[idx] += 1
        bits[idx] += 2.0
        rounds[idx] += 1
        y1[idx] = 2.0 * y1[idx] - b
        y2[idx] = 2.0 * y2[idx] - c
        stop = idx[b == c]
        final_bit[stop] = b[b == c]
        live[stop] = False
        halted[stop] = True

    neighbor1 = np.where(u1m == 1, 0.0, -1.0)
    take = entered & halted & (final_bit == 1)
    dec1[take] = neighbor1[take]
    dec2[take] = 1.0
    # unhalted trials: exact side test against the rectangle's bisector
    unh = np.flatnonzero(entered & ~halted)
    if unh.size:
        c_, s_ = params.rcos, params.rsin
        for i in unh:
            if u1m[i] == 1:
                far = mx1[i] * c_ + mx2[i] * s_ > 0.5 * (c_ * c_ + s_ * s_)
                if far:
                    dec1[i], dec2[i] = 0.0, 1.0
            else:
                nx, ny = c_ - 1.0, s_
                if mx1[i] * nx + mx2[i] * ny > 0.5 * (nx * nx + ny * ny):
                    dec1[i], dec2[i] = -1.0, 1.0
    dec1[mirror] *= -1.0
    dec2[mirror] *= -1.0
    return {
        "dec1": dec1,
        "dec2": dec2,
        "bits": bits,
        "rounds": rounds,
        "halted": halted,
        "entered_error_rect": entered,
        "extra_rounds": extra_rounds,
    }


@dataclass(frozen=True)
class SimConfig:
    """One simulation request; seed + trial count pin the outcome exactly."""

    params: LatticeParams
    scheme: str
    trials: int
    seed: int
    n1: int | None = None
    n2: int | None = None
    n: int | None = None
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.scheme == "12" and (self.n1 is None or self.n2 is None):
            raise ValueError("scheme '12' requires n1 and n2")
        if self.scheme == "21" and self.n is None:
            raise ValueError("scheme '21' requires n")


@dataclass(frozen=True)
class SimReport:
    """Empirical error/cost estimates with standard errors and predictions."""

    scheme: str
    trials: int
    seed: int
    empirical_pe: float
    empirical_pe_stderr: float
    mean_bits: float
    mean_bits_stderr: float
    mean_rounds: float
    mean_rounds_stderr: float
    predicted_pe: float
    predicted_bits: float
    predicted_rounds: float
    unhalted_count: int


def _predictions(config: SimConfig) -> tuple[float, float, float]:
    params = config.params
    if config.scheme == "12":
        h1, h2 = analytics.rate_12(params, config.n1, config.n2)
        return analytics.pe_12(params, config.n1, config.n2), h1 + h2, 1.0
    if config.scheme == "21":
        return (
            analytics.pe_21(params, config.n),
            analytics.rate_21(params, config.n),
            1.0,
        )
    if config.scheme == "infinite":
        return 0.0, analytics.rbar_infinite(params), analytics.nbar_infinite(params)
    return babai_error_probability(params), 0.0, 0.0


def simulate(config: SimConfig) -> SimReport:
    """Run the configured scheme over `trials` uniform cell points.

    Errors count decisions differing from the exact nearest point.  Trials
    are processed in fixed-size chunks and reduced in index order, keeping
    the report independent of any internal batching.
    """
    params = config.params
    n_err = 0
    n_unhalted = 0
    sum_bits = []
    sum_bits2 = []
    sum_rounds = []
    sum_rounds2 = []
    total = config.trials
    for lo in range(0, total, _CHUNK):
        hi = min(lo + _CHUNK, total)
        idx = np.arange(lo, hi, dtype=np.uint64)
        x1, x2 = sample_cell_arrays(params, idx, config.seed)
        e1, e2 = exact_nearest_batch(params, x1, x2)
        if config.scheme == "babai_only":
            n_err += int(np.sum((e1 != 0.0) | (e2 != 0.0)))
            bits = rounds = None
        else:
            if config.scheme == "12":
                out = run_batch_12(params, config.n1, config.n2, x1, x2)
                bits = out["u1_bits"] + out["u2_bits"]
                rounds = np.ones(len(x1))
            elif config.scheme == "21":
                out = run_batch_21(params, config.n, x1, x2)
                bits = out["u1_bits"] + out["u2_bits"]
                rounds = np.ones(len(x1))
            else:
                out = run_batch_infinite(params, x1, x2, config.max_rounds)
                bits = out["bits"]
                rounds = out["rounds"].astype(np.float64)
                n_unhalted += int(np.sum(~out["halted"]))
            n_err += int(np.sum((out["dec1"] != e1) | (out["dec2"] != e2)))
        if bits is not None:
            sum_bits.append(float(np.sum(bits)))
            sum_bits2.append(float(np.sum(bits * bits)))
            sum_rounds.append(float(np.sum(rounds)))
            sum_rounds2.append(float(np.sum(rounds * rounds)))

    pe_hat = n_err / total
    pe_se = math.sqrt(pe_hat * (1.0 - pe_hat) / total)
    if sum_bits:
        mean_bits, bits_se = _mean_and_stderr(sum_bits, sum_bits2, total)
        mean_rounds, rounds_se = _mean_and_stderr(sum_rounds, sum_rounds2, total)
    else:
        mean_bits = bits_se = mean_rounds = rounds_se = 0.0
    pred_pe, pred_bits, pred_rounds = _predictions(config)
    return SimReport(
        scheme=config.scheme,
        trials=total,
        seed=config.seed,
        empirical_pe=pe_hat,
        empirical_pe_stderr=pe_se,
        mean_bits=mean_bits,
        mean_bits_stderr=bits_se,
        mean_rounds=mean_rounds,
        mean_rounds_stderr=rounds_se,
        predicted_pe=pred_pe,
        predicted_bits=pred_bits,
        predicted_rounds=pred_rounds,
        unhalted_count=n_unhalted,
    )


def _mean_and_stderr(sums: list[float], sums_sq: list[float], n: int) -> tuple[float, float]:
    s = math.fsum(sums)
    s2 = math.fsum(sums_sq)
    mean = s / n
    if n < 2:
        return mean, 0.0
    var = max(0.0, (s2 - n * mean * mean) / (n - 1))
    return mean, math.sqrt(var / n)

import math

import numpy as np
import pytest

from babai_refine import (
    BudgetTooSmall,
    Distribution,
    InvalidDistribution,
    LatticeParams,
    asymptotic_constant_12,
    asymptotic_constant_21,
    babai_error_probability,
    beta_21,
    budget_point,
    cell_geometry,
    coefficients_12,
    curve_point,
    entropy,
    kappa_12,
    kappa_21,
    nbar_infinite,
    optimal_n1,
    pe_12,
    pe_21,
    pe_at_rate,
    rate_12,
    rate_21,
    rbar_infinite,
    round1_distributions,
    tradeoff_curve_12,
)
from babai_refine.analytics import _beta_21_from_spans

from conftest import random_valid_params

# frozen regression constants at rho=1, rho*cos(theta)=0.3 (pinned by the
# independent fine-quantizer route and by the protocol simulations)
KAPPA_12_MAIN = 0.2985692139
KAPPA_21_MAIN = 0.2173085181
ASYM_12_MAIN = 0.2176192197
ASYM_21_MAIN = 1.1513892567


def test_entropy_basic():
    assert entropy((1.0,)) == 0.0
    assert entropy((0.5, 0.5)) == 1.0
    assert math.isclose(entropy((2 / 3, 1 / 6, 1 / 6)), 1.25163, abs_tol=5e-6)
    assert math.isclose(entropy((0.3, 0.2, 0.2, 0.15, 0.15)), 2.27095, abs_tol=5e-6)
    assert entropy((0.25, 0.75, 0.0)) == entropy((0.25, 0.75))  # 0 log 0 = 0


def test_entropy_rejects_bad_distributions():
    with pytest.raises(InvalidDistribution):
        entropy((0.5, 0.6))
    with pytest.raises(InvalidDistribution):
        entropy((-0.1, 1.1))
    with pytest.raises(InvalidDistribution):
        Distribution((0.5, float("nan")))


def test_coefficients_12_main(params_main):
    co = coefficients_12(params_main)
    assert co.provenance == "geometry_derived"
    # closed forms: alpha1 = L1*H21/(2 detV) = 0.012/1.82, alpha2 = 0.0225/1.82
    assert math.isclose(co.alpha1, 0.012 / 1.82, rel_tol=1e-12)
    assert math.isclose(co.alpha2, 0.0225 / 1.82, rel_tol=1e-12)
    # values as quoted in the acceptance grid (4-5 significant digits)
    assert math.isclose(co.alpha1, 0.0065938, rel_tol=1e-3)
    assert math.isclose(co.alpha2, 0.012362, rel_tol=1e-3)
    printed = coefficients_12(params_main, provenance="printed")
    # the printed variant swaps the height factors between the intervals
    g = cell_geometry(params_main)
    assert math.isclose(printed.alpha1, g.L1 * (g.H1 + g.H22) / (2 * g.H), rel_tol=1e-12)
    assert math.isclose(printed.alpha2, g.L2 * g.H21 / (2 * g.H), rel_tol=1e-12)
    assert not math.isclose(co.alpha1, printed.alpha1, rel_tol=0.2)


def test_coefficients_12_limits(params_hex, params_square):
    hexa = coefficients_12(params_hex)
    assert hexa.alpha1 < 1e-6  # L1 -> 0 kills the inner-interval term
    sq = coefficients_12(params_square)
    assert sq.alpha1 < 1e-6 and sq.alpha2 < 1e-6


def test_pe_12(params_main):
    assert math.isclose(
        pe_12(params_main, 2, 3), 0.012 / 1.82 / 2 + 0.0225 / 1.82 / 3, rel_tol=1e-12
    )
    assert math.isclose(pe_12(params_main, 2, 3), 0.0074175, rel_tol=1e-3)
    last = 1.0
    for n in (1, 2, 4, 8, 64, 1024):
        val = pe_12(params_main, n, n)
        assert val < last
        last = val
    assert last < 2e-5
    with pytest.raises(ValueError):
        pe_12(params_main, 0, 3)


def test_rate_12_h_u1(params_main):
    h1, h2 = rate_12(params_main, 2, 3)
    want = entropy((0.3, 0.2, 0.2, 0.15, 0.15)) + 0.4 * 1.0 + 0.3 * math.log2(3)
    assert math.isclose(h1, want, rel_tol=1e-12)
    assert math.isclose(h1, 3.14644, abs_tol=5e-6)
    assert h2 > 0.0


def test_rate_12_center_bin_contributes_nothing(params_main):
    # the h_u2 term is unchanged by how finely the error-free data is cut:
    # it only sums over bins that carry cuts
    _, h2_a = rate_12(params_main, 1, 1)
    g = cell_geometry(params_main)
    manual = 0.0
    for a, b, n in [
        (-0.5, g.t_m2, 1), (g.t_m2, g.t_m1, 1), (g.t_1, g.t_2, 1), (g.t_2, 0.5, 1),
    ]:
        from babai_refine.analytics import _strip_decision_entropy

        manual += (b - a) * _strip_decision_entropy(g, 0.5 * (a + b))
    assert math.isclose(h2_a, manual, rel_tol=1e-12)


def test_h_u2_converges_to_kappa(params_main):
    kap = kappa_12(params_main)
    errs = []
    for k in range(2, 7):
        _, h2 = rate_12(params_main, 2**k, 2**k)
        errs.append(abs(h2 - kap))
    assert all(a > b for a, b in zip(errs, errs[1:]))  # monotone shrink
    assert errs[-1] < 2e-5


def test_kappa_regressions(params_main):
    assert math.isclose(kappa_12(params_main), KAPPA_12_MAIN, abs_tol=2e-9)
    assert math.isclose(kappa_21(params_main), KAPPA_21_MAIN, abs_tol=2e-9)


@pytest.mark.parametrize("params", random_valid_params(40, seed=61))
def test_kappa_bounds(params):
    g = cell_geometry(params)
    k12 = kappa_12(params)
    assert 0.0 <= k12 <= 2.0 * (g.t_m1 + 0.5) * math.log2(3.0) + 1e-12
    k21 = kappa_21(params)
    assert 0.0 <= k21 <= 2.0 * (g.H1 / g.H) * math.log2(3.0) + 1e-12


def test_kappa_square_limit(params_square):
    assert kappa_12(params_square) < 1e-2
    assert kappa_21(params_square) < 1e-2


def test_kappa_dense_theta_grid_converges():
    """Regression: integrand evaluation must be continuous at the band
    endpoints (segment spans carry ulp-level noise from line algebra), or
    the quadrature recurses to max depth against a fake jump."""
    for theta in np.linspace(math.pi / 3 + 1e-6, math.pi / 2 - 1e-6, 200):
        params = LatticeParams(rho=1.0, theta=float(theta))
        assert kappa_12(params) >= 0.0
        assert kappa_21(params) >= 0.0


def test_optimal_n1(params_main):
    assert optimal_n1(params_main, 1) == 1
    assert optimal_n1(params_main, 12) == 5  # ceil(0.4 * 12) with ratio 0.4
    for n2 in range(1, 60):
        assert optimal_n1(params_main, 2 * n2) <= 2 * optimal_n1(params_main, n2) + 1


def test_tradeoff_curve(params_main):
    single = tradeoff_curve_12(params_main, 1)
    assert len(single) == 1 and single[0].n1 == 1 and single[0].n2 == 1
    curve = tradeoff_curve_12(params_main, 24)
    rates = [p.rate_bits for p in curve]
    pes = [p.pe for p in curve]
    assert all(a < b for a, b in zip(rates, rates[1:]))
    assert all(a > b for a, b in zip(pes, pes[1:]))


def test_asymptotic_constant_12_forms(params_main):
    geo = asymptotic_constant_12(params_main, form="geometric")
    prob = asymptotic_constant_12(params_main, form="probability")
    assert math.isclose(geo, prob, rel_tol=1e-10)
    assert math.isclose(geo, ASYM_12_MAIN, abs_tol=1e-9)


@pytest.mark.parametrize("params", random_valid_params(100, seed=67))
def test_asymptotic_forms_identity(params):
    geo = asymptotic_constant_12(params, form="geometric")
    prob = asymptotic_constant_12(params, form="probability")
    assert math.isclose(geo, prob, rel_tol=1e-10)
    # exponent base: L/(2(L1+L2)) = 1/(1 - rho cos theta)
    g = cell_geometry(params)
    assert math.isclose(
        g.L / (2.0 * (g.L1 + g.L2)), 1.0 / (1.0 - params.rcos), rel_tol=1e-12
    )


def test_asymptotic_constant_12_matches_curve(params_main):
    g = cell_geometry(params_main)
    exponent = g.L / (2.0 * (g.L1 + g.L2))
    p = curve_point(params_main, "12", 256)
    scaled = p.pe * 2.0 ** (exponent * p.rate_bits)
    assert math.isclose(scaled, asymptotic_constant_12(params_main), rel_tol=0.01)


def test_beta_21_values(params_main, params_hex, params_square):
    b = beta_21(params_main)
    assert math.isclose(b, 0.105 / 3.64, rel_tol=1e-12)
    assert math.isclose(b, 0.028845, rel_tol=1e-3)
    assert math.isclose(beta_21(params_hex), 1.0 / 24.0, abs_tol=2e-6)
    assert beta_21(params_square) < 1e-6


@pytest.mark.parametrize("params", random_valid_params(1000, seed=71))
def test_beta_21_span_rederivation(params):
    assert math.isclose(beta_21(params), _beta_21_from_spans(params), rel_tol=1e-12)


def test_pe_21(params_main):
    b = beta_21(params_main)
    for n in (1, 4, 16):
        assert math.isclose(pe_21(params_main, n), b / n, rel_tol=1e-15)


def test_rate_21(params_main):
    g = cell_geometry(params_main)
    q = (g.H1 / g.H, g.H0 / g.H, g.H1 / g.H)
    want1 = entropy(q) + kappa_21(params_main)
    assert math.isclose(rate_21(params_main, 1), want1, rel_tol=1e-12)
    assert rate_21(params_main, 8) > rate_21(params_main, 4) > want1


def test_asymptotic_constant_21(params_main):
    const = asymptotic_constant_21(params_main)
    assert math.isclose(const, ASYM_21_MAIN, abs_tol=1e-9)
    g = cell_geometry(params_main)
    q0 = g.H0 / g.H
    for n in (1, 4, 16, 1024):
        scaled = pe_21(params_main, n) * 2.0 ** (rate_21(params_main, n) / (1.0 - q0))
        assert math.isclose(scaled, const, rel_tol=1e-12)


def test_round1_distributions_main(params_main):
    q, p = round1_distributions(params_main)
    assert np.allclose(q.probs, [0.11538, 0.76923, 0.11538], atol=5e-6)
    assert np.allclose(p.probs, [0.15, 0.5, 0.35], atol=1e-12)


def test_round1_distributions_hex(params_hex):
    q, p = round1_distributions(params_hex)
    assert np.allclose(q.probs, [1 / 6, 2 / 3, 1 / 6], atol=1e-5)
    assert np.allclose(p.probs, [0.25, 0.5, 0.25], atol=1e-6)


@pytest.mark.parametrize("params", random_valid_params(1000, seed=73))
def test_round1_p0_is_half(params):
    _, p = round1_distributions(params)
    assert p.probs[1] == 0.5


def test_rbar_nbar_values(params_main, params_hex, params_square):
    assert math.isclose(rbar_infinite(params_main), 1.80411, abs_tol=5e-6)
    assert math.isclose(nbar_infinite(params_main), 1.23077, abs_tol=5e-6)
    assert math.isclose(rbar_infinite(params_hex), 2.418, abs_tol=5e-3)
    assert rbar_infinite(params_square) < 1e-3
    assert math.isclose(nbar_infinite(params_square), 1.0, abs_tol=1e-4)


@pytest.mark.parametrize("params", random_valid_params(200, seed=79))
def test_scheme_invariants(params):
    q, p = round1_distributions(params)
    g = cell_geometry(params)
    assert 0.0 <= entropy(q) <= math.log2(3)
    assert 0.0 <= entropy(p) <= math.log2(3)
    lengths = (g.L0, g.L1, g.L1, g.L2, g.L2)
    assert 0.0 <= entropy(lengths) <= math.log2(5)
    assert rbar_infinite(params) >= entropy(q)
    assert 1.0 <= nbar_infinite(params) <= 2.0
    pe_cap = babai_error_probability(params)
    for n in (1, 3, 9):
        assert 0.0 < pe_12(params, n, n) <= pe_cap + 1e-15
        assert 0.0 < pe_21(params, n) <= pe_cap + 1e-15


def test_rbar_decreasing_in_theta():
    thetas = np.linspace(math.pi / 3 + 1e-6, math.pi / 2 - 1e-6, 50)
    vals = [rbar_infinite(LatticeParams(1.0, float(t))) for t in thetas]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert math.isclose(vals[0], 2.42, abs_tol=0.01)


def test_pe_at_rate_exact_point(params_main):
    pt = curve_point(params_main, "21", 7)
    below, interp = pe_at_rate(params_main, "21", pt.rate_bits)
    assert below == pt.pe
    assert math.isclose(interp, pt.pe, rel_tol=1e-12)


def test_pe_at_rate_budget_too_small(params_main):
    with pytest.raises(BudgetTooSmall):
        pe_at_rate(params_main, "21", 0.5)
    with pytest.raises(BudgetTooSmall):
        pe_at_rate(params_main, "12", 1.0)


def test_pe_at_rate_decreasing_in_budget(params_main):
    for scheme in ("12", "21"):
        prev = 1.0
        for budget in (3.0, 4.0, 6.0, 9.0, 12.0):
            below, interp = pe_at_rate(params_main, scheme, budget)
            assert interp <= below
            assert interp < prev
            prev = interp
        assert prev < 1e-4


def test_pe_at_rate_21_vs_enumeration(params_main):
    """Independent oracle: linear scan of the 21 curve around budget 4.0."""
    budget = 4.0
    n = 1
    while rate_21(params_main, n + 1) <= budget:
        n += 1
    below, interp = pe_at_rate(params_main, "21", budget)
    assert below == pe_21(params_main, n)
    assert budget_point(params_main, "21", budget).n == n
    # frozen oracle values for this budget
    assert math.isclose(below, 6.9727e-06, rel_tol=1e-4)
    assert math.isclose(interp, 6.9722e-06, rel_tol=1e-4)


def test_pe_at_rate_12_bracketing(params_main):
    budget = 4.0
    pt = budget_point(params_main, "12", budget)
    nxt = curve_point(params_main, "12", pt.n2 + 1)
    assert pt.rate_bits <= budget < nxt.rate_bits
    below, interp = pe_at_rate(params_main, "12", budget)
    assert below == pt.pe
    assert nxt.pe < interp < pt.pe

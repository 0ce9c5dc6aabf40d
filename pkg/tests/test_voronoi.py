import math

import numpy as np
import pytest
from scipy.integrate import quad

from deltasum.analytic import (canonical_bump, d3_partial_asymptotic,
                               voronoi_d3_check)
from deltasum.analytic.constants import Constants
from deltasum.analytic.voronoi import (DUAL_SCALE, MAIN_SCALE, divisor_weight,
                                       main_terms_dict, p1_value, p2_value,
                                       sieve_side)
from deltasum.arith import mult_tables

C = Constants()


def test_divisor_weight_n1_one_is_d3():
    tables = mult_tables(60)
    for n in range(1, 61):
        assert divisor_weight(1, n) == tables.d3[n], n


def test_divisor_weight_small_cases():
    # n1 = p: inner pair (m1, m2) ranges over {(1,1),(1,p),(p,1)}
    # so weight = 2*sigma00(1, n2) + sigma00(p, n2)
    from deltasum.coeffs import sigma00
    for p in (2, 3, 5):
        for n2 in (1, 4, 9, 12):
            want = 2 * sigma00(1, n2) + sigma00(p, n2)
            assert divisor_weight(p, n2) == want


def test_main_polynomials_q1():
    # at (n1, q) = (1, 1) the divisor-log corrections vanish
    assert p1_value(1, 1) == 3.0 * C.euler_gamma
    want = 3.0 * C.euler_gamma * C.euler_gamma - 3.0 * C.stieltjes_gamma1
    assert p2_value(1, 1) == pytest.approx(want, rel=1e-15)


def test_main_terms_match_residue_at_q1(window_bump):
    # independent oracle: Res_{s=1} zeta^3(s) h~(s) as an explicit integral
    g, g1 = C.euler_gamma, C.stieltjes_gamma1
    poly = lambda x: (0.5 * math.log(x) ** 2 + 3.0 * g * math.log(x)
                      + 3.0 * g * g - 3.0 * g1)
    residue, err = quad(lambda x: window_bump(x) * poly(x), 1e3, 2e3,
                        epsabs=1e-9, limit=200)
    terms = main_terms_dict(1, 1, window_bump)
    assert set(terms) == {"p2_term", "p1_term", "log2_term"}
    printed = sum(terms.values())
    assert abs(MAIN_SCALE * printed - residue) < 1e-6 * abs(residue) + 10 * err


def test_sieve_side_brute(window_bump):
    tables = mult_tables(2000)
    want = 0j
    for n in range(1000, 2001):
        want += tables.d3[n] * np.exp(2j * math.pi * 2 * n / 5) * window_bump(float(n))
    got = sieve_side(2, 5, window_bump)
    assert abs(got - want) < 1e-9 * abs(want)


def test_partial_sum_asymptotic_accuracy():
    tables = mult_tables(1_000_000)
    csum = np.cumsum(tables.d3[1:].astype(np.float64))
    for x in (10**3, 10**4, 10**5, 10**6):
        exact = csum[x - 1]
        rel = abs(exact - d3_partial_asymptotic(float(x))) / exact
        assert rel < 2e-3, x
    # growth exponent of the partial sums over the same span
    xs = np.array([1e3, 1e4, 1e5, 1e6])
    ys = np.array([csum[int(x) - 1] for x in xs])
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    assert 1.0 <= slope <= 1.2


def test_identity_q1(window_bump):
    rep = voronoi_d3_check(1, 1, window_bump, rel_budget=1e-3)
    assert rep.rel_discrepancy < 1e-3
    assert rep.budget_met
    assert rep.rhs == DUAL_SCALE * rep.dual_total + rep.main_total
    assert rep.main_total == MAIN_SCALE * rep.main_printed
    assert rep.main_printed == pytest.approx(sum(rep.main_terms.values()))
    assert abs(rep.discrepancy) == pytest.approx(abs(rep.lhs - rep.rhs))
    assert rep.n2_used >= 64
    assert rep.lhs.imag == pytest.approx(0.0, abs=1e-9)  # e(n*1/1) = 1


def test_identity_twisted(window_bump):
    rep = voronoi_d3_check(1, 3, window_bump, rel_budget=1e-3)
    assert rep.rel_discrepancy < 1e-3
    assert rep.budget_met


def test_identity_scales_with_window():
    # same identity on a shifted window; nothing is tuned to [1e3, 2e3]
    rep = voronoi_d3_check(1, 1, canonical_bump(2.0e3, 4.0e3), rel_budget=1e-3)
    assert rep.rel_discrepancy < 1e-3
    assert rep.budget_met


def test_input_validation(window_bump):
    with pytest.raises(ValueError):
        voronoi_d3_check(3, 6, window_bump)
    with pytest.raises(ValueError):
        voronoi_d3_check(1, 0, window_bump)

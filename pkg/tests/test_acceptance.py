"""Acceptance sweep: one test per advertised numeric guarantee.

Each test prints the measured quantity next to its bound, so a verbose run
doubles as a numeric report.  Order follows the package's capability list:
exponential sums, character sums, the delta expansion, the dual-sum
identity, oscillatory kernels, coefficient statistics, and the main sums.
"""

import math
import time

import numpy as np
import pytest

from deltasum.analytic.delta import delta_eval, dfi_delta
from deltasum.arith import primes_up_to
from deltasum.charsum import (CorrelationParams, FreqSumInput, frakC, frak_S,
                              kloosterman_correlation, zero_freq_oracle)
from deltasum.cli import suite_expsum, suite_gauss, suite_osc, suite_voronoi
from deltasum.coeffs import Sym2Source, TripleDivisorSource, l2_ratio
from deltasum.expsum import QuadraticForm, form_gauss
from deltasum.sums import (WindowConfig, eval_S_quad, eval_Sk,
                           eval_sk_enumeration, exponent_fit)


@pytest.fixture(scope="module")
def osc_rows():
    """Full oscillatory-integral sweep, shared by the kernel and slope tests."""
    return {r.anchor: r for r in suite_osc(quick=False)}


@pytest.fixture(scope="module")
def sym2_wide():
    # table reaching 2 (2 X)^2, the largest argument of the X = 2^10 window
    return Sym2Source(2 * (2 * 2 ** 10) ** 2)


def test_quadratic_gauss_closed_form_all_odd_q_to_999():
    t0 = time.monotonic()
    rows = suite_gauss(999, 10, 1e-6)
    elapsed = time.monotonic() - t0
    worst = rows[0]
    print(f"\nmax |direct - closed| = {worst.observed:.3e} "
          f"(bound 1e-6), 10 residues per q, {elapsed:.1f} s")
    assert worst.passed
    assert elapsed < 60.0


def test_kloosterman_weil_bound_and_crt_factorization():
    rows = {r.anchor: r for r in suite_expsum(2000, 100, 500, 100000, 1e-8)}
    weil = rows["kloosterman.weil.prime"]
    crt = rows["kloosterman.crt.composite"]
    print(f"\nmax |S| / (2 sqrt(p)) = {weil.observed:.4f} (bound 1),"
          f" 100 samples per prime p < 2000")
    print(f"max |direct - crt| = {crt.observed:.3e} (bound 1e-8),"
          f" 500 composite q <= 1e5")
    assert weil.passed
    assert crt.passed


def test_form_gauss_closed_form_on_200_admissible_tuples():
    rng = np.random.default_rng(3)
    worst = 0.0
    done = tried = 0
    while done < 200:
        tried += 1
        assert tried < 20000, "admissible tuples should not be this rare"
        fa, fb = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        fc = int(rng.integers(0, 3))
        if fa * fb - fc * fc <= 0:
            continue
        form = QuadraticForm(fa, fb, fc)
        q = 2 * int(rng.integers(1, 250)) + 1
        a = int(rng.integers(1, q))
        # closed form needs odd q coprime to the multiplier and 4 det(Q)
        if math.gcd(q, a * 4 * form.det) != 1:
            continue
        m = (int(rng.integers(0, q)), int(rng.integers(0, q)))
        d = form_gauss(form, m, a, q, mode="direct")
        c = form_gauss(form, m, a, q, mode="closed")
        worst = max(worst, abs(d.value - c.value))
        done += 1
    print(f"\nmax |direct - closed| = {worst:.3e} (bound 1e-6), "
          f"200 admissible (Q, q, a, m) tuples, q <= 499")
    assert worst < 1e-6


def test_two_square_character_sum_closed_form_all_odd_q_to_499():
    worst = 0.0
    for q in range(3, 500, 2):
        units = [a for a in range(1, q) if math.gcd(a, q) == 1]
        stride = max(1, len(units) // 5)
        for a in units[::stride][:5]:
            for m1, m2 in ((1 % q, 2 % q), (3 % q, 5 % q), (0, 0)):
                d = frakC(m1, m2, a, q, mode="direct")
                c = frakC(m1, m2, a, q, mode="closed")
                worst = max(worst, abs(d.value - c.value))
    print(f"\nmax |direct - closed| = {worst:.3e} (bound 1e-6), "
          f"all odd q <= 499, 5 residues, 3 shift pairs each")
    assert worst < 1e-6


def test_zero_frequency_sum_matches_orthogonality_reduction():
    """The executed j-sum is the exact oracle for the m = 0 frequency term;
    the diagonal-only shorthand q^3 c_q(n3p^k - n3^k) shares its order but
    not its value (off-diagonal terms contribute at the same size), so the
    comparison here is against the full reduction."""
    worst_rel = 0.0
    worst_bound = 0.0
    for q in range(3, 61, 2):
        for k in (3, 4):
            for n3, n3p in ((1, 2), (2, 5), (1, 1)):
                inp = FreqSumInput(q=q, n=1, m1=1, m2=2, n3=n3, n3p=n3p,
                                   k=k, m=0)
                got = frak_S(inp).value
                want = zero_freq_oracle(inp).value
                worst_rel = max(worst_rel,
                                abs(got - want) / max(abs(want), 1.0))
            # n3p = n3 + q forces n3p^k = n3^k (mod q): the q^4 regime
            inp = FreqSumInput(q=q, n=1, m1=1, m2=2, n3=2, n3p=2 + q,
                               k=k, m=0)
            worst_bound = max(worst_bound, abs(frak_S(inp).value) / q ** 4)
    print(f"\nmax rel deviation from the reduction = {worst_rel:.3e} "
          f"(bound 1e-4), odd q <= 60, k in {{3, 4}}")
    print(f"max |S_0| / q^4 on congruent twists = {worst_bound:.4f} (bound 1)")
    assert worst_rel < 1e-4
    assert worst_bound <= 1.0


def test_kloosterman_correlation_square_root_cancellation():
    rng = np.random.default_rng(6)
    worst = 0.0
    for p in primes_up_to(300):
        if p <= 20:
            continue
        for _ in range(50):
            c = [int(x) for x in rng.integers(1, p, size=5)]
            val = kloosterman_correlation(p, CorrelationParams(p, *c))
            worst = max(worst, abs(val.value) / p ** 1.5)
    print(f"\nmax |sum| / p^(3/2) = {worst:.4f} (bound 10), "
          f"50 draws per prime, 20 < p <= 300")
    assert worst <= 10.0


def test_delta_expansion_is_exact_kronecker_delta():
    expansion = dfi_delta(50.0)
    at0 = abs(delta_eval(expansion, 0) - 1.0)
    worst = max(max(abs(delta_eval(expansion, n)),
                    abs(delta_eval(expansion, -n))) for n in range(1, 1001))
    print(f"\n|delta(0) - 1| = {at0:.2e}, "
          f"max over 1 <= |n| <= 1000 = {worst:.2e} (bounds 1e-9)")
    assert at0 <= 1e-9
    assert worst <= 1e-9


def test_triple_divisor_voronoi_identity_at_four_moduli():
    rows, _ = suite_voronoi(((1, 1), (3, 1), (4, 1), (5, 2)))
    identity = [r for r in rows if r.anchor.startswith("voronoi.identity.")]
    assert len(identity) == 4
    print()
    for r in identity:
        print(f"{r.anchor}: rel discrepancy {r.observed:.3e} (budget 1e-3)")
    assert all(r.passed for r in identity)


def test_kernel_matches_leading_asymptotic_at_three_scales(osc_rows):
    print()
    for ym in (1000, 10000, 100000):
        r = osc_rows[f"osc.kernel.asymptotic_ym{ym}"]
        print(f"yM = {ym}: rel deviation {r.observed:.3e} <= {r.bound:.3e}")
        assert r.passed


def test_oscillatory_sum_slope_and_far_frequency_suppression(osc_rows):
    slope = osc_rows["osc.composite.dyadic_slope"]
    print(f"\nlog-log slope of sup over dyadic q = {slope.observed:.3f} "
          f"(needs >= 1.3; the scaling heuristic gives 3/2)")
    assert slope.passed
    ratios = [r for a, r in osc_rows.items()
              if a.startswith("osc.composite.lemma_ratio_")]
    assert len(ratios) == 10
    print(f"max bound ratio over the sweep = "
          f"{max(r.observed for r in ratios):.4f} (bound 10)")
    assert all(r.passed for r in ratios)
    supp = osc_rows["osc.correlation.suppression"]
    print(f"far-frequency suppression = {supp.observed:.3e} (bound 1e-6)")
    assert supp.passed


def test_symmetric_square_l2_mean_and_exact_dyadic_value():
    src = Sym2Source(100001)
    print()
    for e in (3, 4, 5):
        ratio = l2_ratio(10 ** e, src)
        print(f"X = 1e{e}: mean square per X = {ratio:.4f} (bound 10)")
        assert ratio <= 10.0
    assert src.coeff(1, 2) == -0.71875


def test_main_sum_oracle_equality_and_quadratic_window_exponent(sym2_wide):
    d3 = TripleDivisorSource()
    for X in (16.0, 64.0, 256.0):
        for k in (3, 4, 5):
            cfg = WindowConfig(X=X, k=k, mode="sharp")
            v = eval_Sk(cfg, d3, "unit")
            oracle = eval_sk_enumeration(cfg, d3, "unit")
            assert v == oracle  # integer-valued terms: equality is exact
    print("\nsharp-window sums equal the enumeration exactly on the "
          "9-point (X, k) grid")
    form = QuadraticForm(1, 1, 0)
    series = []
    for e in range(6, 11):
        X = float(2 ** e)
        cfg = WindowConfig(X=X, theta=1.0, mode="smooth")
        series.append((X, eval_S_quad(cfg, form, sym2_wide)))
    fit = exponent_fit(series)
    print(f"fitted exponent over X = 2^6..2^10: {fit.slope:.3f} "
          f"+- {fit.stderr:.3f} (assert <= 1.95; the large-X theory value "
          f"7/4 is reported, not asserted)")
    assert fit.slope <= 1.95

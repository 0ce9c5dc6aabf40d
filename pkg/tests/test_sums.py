import json
import math
from fractions import Fraction

import numpy as np
import pytest

from deltasum.coeffs import Sym2Source, TripleDivisorSource
from deltasum.expsum import QuadraticForm
from deltasum.sums import (CSV_COLUMNS, SumResult, WindowConfig, eval_S_quad,
                           eval_Sk, eval_s_quad_enumeration,
                           eval_sk_enumeration, exponent_fit, results_csv,
                           run_report, subtract_main_term, theorem_exponents,
                           trivial_ratio, weight_l2_ratio, zhou_hu_delta)


@pytest.fixture(scope="module")
def d3_source():
    return TripleDivisorSource()


def test_window_config_validation():
    for bad in (dict(X=2.0), dict(X=16.0, k=2), dict(X=16.0, theta=0.0),
                dict(X=16.0, theta=1.5), dict(X=16.0, mode="boxed")):
        with pytest.raises(ValueError):
            WindowConfig(**bad)
    cfg = WindowConfig(X=64.0, k=3)
    assert cfg.Y == pytest.approx(4.0)
    assert cfg.delta_scale == pytest.approx(8.0)
    th = WindowConfig(X=64.0, theta=0.5)
    assert th.Y == pytest.approx(8.0)
    assert th.delta_scale == 64.0


def test_sharp_sum_matches_enumeration(d3_source):
    for X in (16.0, 64.0):
        for k in (3, 4):
            cfg = WindowConfig(X=X, k=k)
            fast = eval_Sk(cfg, d3_source)
            slow = eval_sk_enumeration(cfg, d3_source)
            assert fast == slow, (X, k)  # integer-valued terms: exact


def test_weighted_sums_match_enumeration(d3_source):
    cfg = WindowConfig(X=100.0, k=3)
    for weight in ("mobius", "vonMangoldt"):
        fast = eval_Sk(cfg, d3_source, weight=weight)
        slow = eval_sk_enumeration(cfg, d3_source, weight=weight)
        assert math.isclose(fast, slow, rel_tol=1e-11, abs_tol=1e-9), weight
    with pytest.raises(ValueError):
        eval_Sk(cfg, d3_source, weight="harmonic")


def test_smooth_sum_matches_enumeration(d3_source):
    cfg = WindowConfig(X=256.0, k=3, mode="smooth")
    fast = eval_Sk(cfg, d3_source)
    slow = eval_sk_enumeration(cfg, d3_source)
    assert math.isclose(fast, slow, rel_tol=1e-11)


def test_thread_count_does_not_change_bits(d3_source):
    cfg = WindowConfig(X=2048.0, k=3, mode="smooth")
    v1 = eval_Sk(cfg, d3_source, threads=1)
    v4 = eval_Sk(cfg, d3_source, threads=4)
    assert v1 == v4


def test_quad_sum_matches_enumeration():
    src = Sym2Source(2 * 32 * 32)
    cfg = WindowConfig(X=32.0, theta=1.0)
    fast = eval_S_quad(cfg, QuadraticForm(1, 1, 0), src)
    slow = eval_s_quad_enumeration(cfg, QuadraticForm(1, 1, 0), src)
    assert math.isclose(fast, slow, rel_tol=1e-12, abs_tol=1e-12)


def test_quad_sum_threads_and_cross_term():
    src = Sym2Source(5 * 32 * 32)  # a u^2 + b v^2 + 2|c| u v at u = v = 32
    cfg = WindowConfig(X=32.0, theta=1.0)
    form = QuadraticForm(1, 2, 1)
    fast = eval_S_quad(cfg, form, src, threads=3)
    slow = eval_s_quad_enumeration(cfg, form, src)
    assert math.isclose(fast, slow, rel_tol=1e-12, abs_tol=1e-12)
    assert eval_S_quad(cfg, form, src, threads=1) == fast


def test_quad_sum_requires_theta(d3_source):
    cfg = WindowConfig(X=32.0, k=3)
    with pytest.raises(ValueError):
        eval_S_quad(cfg, QuadraticForm(1, 1, 0), d3_source)
    with pytest.raises(ValueError):
        eval_s_quad_enumeration(cfg, QuadraticForm(1, 1, 0), d3_source)


def test_table_cap_guard(d3_source):
    with pytest.raises(ValueError):
        eval_Sk(WindowConfig(X=4.0e7, k=3), d3_source)


def test_trivial_ratio_shapes():
    cfg = WindowConfig(X=100.0, k=4)
    assert trivial_ratio(cfg, 500.0) == pytest.approx(500.0 / 100.0**1.25)
    cfg2 = WindowConfig(X=100.0, theta=0.5)
    assert trivial_ratio(cfg2, 500.0) == pytest.approx(500.0 / 100.0**1.5)


def test_exponent_fit_recovers_power_law():
    xs = [10.0, 100.0, 1000.0, 10000.0]
    fit = exponent_fit([(x, 3.0 * x**2) for x in xs])
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-10)
    flat = exponent_fit([(x, 7.0) for x in xs])
    assert flat.slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        exponent_fit([(10.0, 1.0), (20.0, 2.0)])
    with pytest.raises(ValueError):
        exponent_fit([(10.0, 1.0), (20.0, 0.0), (30.0, 2.0)])
    with pytest.raises(ValueError):
        exponent_fit([(10.0, 1.0), (10.0, 2.0), (10.0, 3.0)])


def test_subtract_main_term_exact_recovery():
    xs = np.array([16.0, 64.0, 256.0, 1024.0, 4096.0])
    vals = xs ** (4.0 / 3.0) * (2.0 + 0.5 * np.log(xs) + 0.1 * np.log(xs) ** 2)
    coeffs, resid = subtract_main_term(list(zip(xs, vals)), k=3)
    assert np.allclose(coeffs, [2.0, 0.5, 0.1], atol=1e-9)
    assert max(abs(r) for _, r in resid) < 1e-6
    with pytest.raises(ValueError):
        subtract_main_term(list(zip(xs[:3], vals[:3])), k=3)


def test_power_saving_table():
    assert zhou_hu_delta(3) == Fraction(1, 15)
    assert zhou_hu_delta(4) == Fraction(1, 32)
    assert zhou_hu_delta(5) == Fraction(1, 80)
    assert zhou_hu_delta(7) == Fraction(1, 448)
    assert zhou_hu_delta(8) == Fraction(1, 896)
    assert zhou_hu_delta(9) == Fraction(1, 1296)
    with pytest.raises(ValueError):
        zhou_hu_delta(2)


def test_theorem_exponent_tables():
    t1 = theorem_exponents(3, 1)
    assert t1["trivial"] == pytest.approx(4.0 / 3.0)
    assert t1["zhou_hu"] == pytest.approx(4.0 / 3.0 - 1.0 / 15.0)
    assert t1["this_paper"] == pytest.approx(7.0 / 8.0 + 1.0 / 3.0)
    assert t1["this_paper"] < t1["zhou_hu"] < t1["trivial"]
    t4 = theorem_exponents(4, 1)
    assert t4["this_paper"] == pytest.approx(1.0 + 1.0 / 8.0)
    t2 = theorem_exponents(3, 2, theta=1.0)
    assert t2 == {"trivial": 2.0, "prior": 2.0 - 1.0 / 68.0, "this_paper": 1.75}
    with pytest.raises(ValueError):
        theorem_exponents(3, 3)
    with pytest.raises(ValueError):
        theorem_exponents(2, 1)


def test_weight_mean_squares():
    assert weight_l2_ratio("unit", 10_000) == 1.0
    mob = weight_l2_ratio("mobius", 10_000)
    assert 0.55 < mob < 0.65  # ~ 6/pi^2
    cheb = weight_l2_ratio("vonMangoldt", 10_000)
    assert 0.7 < cheb < 1.1
    with pytest.raises(ValueError):
        weight_l2_ratio("unit", 1)


def test_results_csv_layout():
    rows = [SumResult(X=16.0, k_or_theta=3.0, source="d3", weight="unit",
                      value=123.0, trivial_ratio=0.25),
            SumResult(X=64.0, k_or_theta=0.5, source="sym2", weight="mobius",
                      value=-1.5, trivial_ratio=0.125)]
    text = results_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "16,3,d3,unit,123,0.25"
    assert lines[2] == "64,0.5,sym2,mobius,-1.5,0.125"
    # repr-stable floats round-trip
    assert float(lines[2].split(",")[4]) == -1.5


def test_run_report_content_addressed():
    rows = [SumResult(X=16.0, k_or_theta=3.0, source="d3", weight="unit",
                      value=123.0, trivial_ratio=0.25)]
    a = run_report({"X": 16.0}, rows)
    b = run_report({"X": 16.0}, rows)
    assert a["run_id"] == b["run_id"]
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = run_report({"X": 32.0}, rows)
    assert c["run_id"] != a["run_id"]

import csv
import math

import numpy as np
import pytest

from deltasum.analytic import (g0_asymptotic, g_ell, g_ell_many, g_kernel,
                               g_kernel_many, kernel_table)
from deltasum.analytic.kernels import g_ell_reference


def test_vertical_line_matches_reference(unit_bump):
    # One probe point against the slow per-node adaptive scheme.  The
    # reference is truncated at T=90 to keep the runtime sane, which caps
    # the attainable agreement at the size of the discarded tail.
    fast = g_ell(5.0, 0, unit_bump)
    slow = g_ell_reference(5.0, 0, unit_bump, T=90.0)
    assert abs(fast.value.real - slow) < 1e-3
    assert fast.value.imag == 0.0


def test_contour_shift_invariance(unit_bump):
    # the transform is entire, so the vertical line sigma is a free choice
    for ell in (0, 1):
        for y in (2.0, 40.0):
            a = g_ell(y, ell, unit_bump, sigma=-0.5)
            b = g_ell(y, ell, unit_bump, sigma=-0.25)
            assert abs(a.value - b.value) < 10.0 * (a.err + b.err) + 1e-9, (ell, y)


def test_kernel_combination(unit_bump):
    y = 7.0
    g0 = g_ell(y, 0, unit_bump).value
    g1 = g_ell(y, 1, unit_bump).value
    c = 1.0 / (2.0 * math.pi**1.5)
    plus = g_kernel(y, 1, unit_bump).value
    minus = g_kernel(y, -1, unit_bump).value
    assert abs(plus - c * (g0 - 1j * g1)) < 1e-12
    assert abs(minus - c * (g0 + 1j * g1)) < 1e-12
    # G_0, G_1 real, so the two signs are conjugates
    assert abs(minus - plus.conjugate()) < 1e-12
    with pytest.raises(ValueError):
        g_kernel(y, 0, unit_bump)
    with pytest.raises(ValueError):
        g_ell(y, 2, unit_bump)
    with pytest.raises(ValueError):
        g_ell(-1.0, 0, unit_bump)


def test_batch_matches_pointwise(unit_bump):
    ys = np.array([0.5, 3.0, 25.0, 400.0])
    vals, errs = g_kernel_many(ys, 1, unit_bump)
    for i, y in enumerate(ys):
        single = g_kernel(float(y), 1, unit_bump)
        assert abs(vals[i] - single.value) <= errs[i] + single.err + 1e-13


def test_leading_asymptotic(unit_bump):
    # rel error O((yM)^{-2/3}); the acceptance bound is 5 (yM)^{-1/3}
    m_hi = unit_bump.support[1]
    for ym in (1e3, 1e4):
        y = ym / m_hi
        exact = g_ell(y, 0, unit_bump).value.real
        approx = g0_asymptotic(y, unit_bump)
        rel = abs(approx - exact) / abs(exact)
        assert rel <= 5.0 * ym ** (-1.0 / 3.0), ym
    with pytest.raises(ValueError):
        g0_asymptotic(500.0, unit_bump, terms=2)


def test_kernel_table_round_trip(unit_bump, tmp_path):
    ys = np.array([1.0, 10.0, 100.0])
    path = tmp_path / "kernel.csv"
    kernel_table(ys, 1, unit_bump, str(path))
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["y", "re", "im", "err"]
    vals, errs = g_kernel_many(ys, 1, unit_bump)
    assert len(rows) == 1 + len(ys)
    for row, y, v, e in zip(rows[1:], ys, vals, errs):
        assert float(row[0]) == y
        assert float(row[1]) == v.real and float(row[2]) == v.imag
        assert float(row[3]) == e

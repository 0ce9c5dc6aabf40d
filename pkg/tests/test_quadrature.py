import cmath

import numpy as np
import pytest

from deltasum.analytic import QuadResult, osc_quad, simpson_grid
from deltasum.analytic.quadrature import DEFAULT_FILON_THRESHOLD


def _unit_amp(x):
    return np.ones_like(x)


def test_linear_phase_below_threshold():
    # integral of e^{i w x} over [0, 1] = (e^{iw} - 1)/(iw)
    w = 10.0
    res = osc_quad(_unit_amp, lambda x: w * x, 0.0, 1.0)
    assert res.method == "adaptive"
    want = (cmath.exp(1j * w) - 1.0) / (1j * w)
    assert abs(res.value - want) < 1e-10
    assert abs(res.value - want) <= max(10.0 * res.err, 1e-12)


def test_linear_phase_above_threshold():
    w = 500.0
    assert w > DEFAULT_FILON_THRESHOLD
    res = osc_quad(_unit_amp, lambda x: w * x, 0.0, 1.0)
    assert res.method == "osc-panels"
    want = (cmath.exp(1j * w) - 1.0) / (1j * w)
    assert abs(res.value - want) < 1e-10 * abs(want) + 1e-12
    assert abs(res.value - want) <= max(10.0 * res.err, 1e-12)


def test_quadratic_phase_panels():
    # d/dx e^{iwx^2} = 2iwx e^{iwx^2}, so integral of x e^{iwx^2} is elementary
    w = 300.0
    res = osc_quad(lambda x: x, lambda x: w * x * x, 1.0, 2.0)
    assert res.method == "osc-panels"
    want = (cmath.exp(4j * w) - cmath.exp(1j * w)) / (2j * w)
    assert abs(res.value - want) < 1e-10


def test_two_schemes_agree():
    w = 120.0
    amp = lambda x: 1.0 / (1.0 + x * x)
    phase = lambda x: w * x
    panels = osc_quad(amp, phase, 0.0, 3.0)
    adaptive = osc_quad(amp, phase, 0.0, 3.0, filon_threshold=1e9)
    assert panels.method == "osc-panels" and adaptive.method == "adaptive"
    assert abs(panels.value - adaptive.value) < 1e-9


def test_plain_integrand():
    res = osc_quad(lambda x: x * x, None, 0.0, 1.0)
    assert res.method == "adaptive"
    assert abs(res.value - 1.0 / 3.0) < 1e-12
    assert res.value.imag == pytest.approx(0.0, abs=1e-14)


def test_empty_interval():
    res = osc_quad(_unit_amp, None, 2.0, 2.0)
    assert res.value == 0j and res.method == "empty"


def test_quad_result_dunders():
    res = QuadResult(3.0 + 4.0j, 1e-12, 17, "test")
    assert complex(res) == 3.0 + 4.0j
    assert abs(res) == 5.0


def test_simpson_exact_on_cubics():
    f = lambda x: x**3 - 2.0 * x**2 + 3.0
    want = 4.0 - 16.0 / 3.0 + 6.0
    assert simpson_grid(f, 0.0, 2.0, 2) == pytest.approx(want, rel=1e-14)
    # odd interval counts are rounded up to even
    assert simpson_grid(f, 0.0, 2.0, 3) == simpson_grid(f, 0.0, 2.0, 4)


def test_simpson_cross_checks_panels():
    w = 200.0
    res = osc_quad(_unit_amp, lambda x: w * x, 0.0, 1.0)
    grid = simpson_grid(lambda x: np.exp(1j * w * x), 0.0, 1.0, 40000)
    assert abs(res.value - grid) < 1e-9

import math

import numpy as np
import pytest
from scipy.integrate import quad

from deltasum.analytic import (Constants, euler_gamma_series, log_moment,
                               mellin, simpson_grid, stieltjes_gamma1_series)


def test_euler_gamma_constant():
    c = Constants()
    assert c.euler_gamma == np.euler_gamma
    assert abs(euler_gamma_series(10_000) - c.euler_gamma) < 1e-13
    # Euler-Maclaurin corrections make the tail negligible well before n=1e4
    assert abs(euler_gamma_series(2_000) - c.euler_gamma) < 1e-13


def test_stieltjes_gamma1_constant():
    c = Constants()
    assert abs(stieltjes_gamma1_series(100_000) - c.stieltjes_gamma1) < 1e-13
    assert abs(stieltjes_gamma1_series(30_000) - c.stieltjes_gamma1) < 1e-13


def test_mellin_at_one_is_mass(unit_bump):
    got = mellin(unit_bump, 1.0)
    assert abs(got.value - 0.6034501612189381) < 1e-10
    assert got.value.imag == pytest.approx(0.0, abs=1e-12)


def test_mellin_real_s_oracle(unit_bump):
    for sigma in (-0.5, 0.5, 2.0):
        want, err = quad(lambda x: unit_bump(x) * x**(sigma - 1.0), 1.0, 2.0,
                         epsabs=1e-13)
        got = mellin(unit_bump, sigma)
        assert abs(got.value - want) < 1e-10 + 10.0 * err, sigma


def test_mellin_conjugate_symmetry(unit_bump):
    s = 0.5 + 37.0j
    up = mellin(unit_bump, s).value
    down = mellin(unit_bump, s.conjugate()).value
    assert abs(down - up.conjugate()) < 1e-10


def test_mellin_oscillatory_cross_check(unit_bump):
    s = 0.5 + 60.0j
    got = mellin(unit_bump, s).value
    grid = simpson_grid(lambda x: unit_bump(x) * x**(s - 1.0), 1.0, 2.0, 20000)
    assert abs(got - grid) < 1e-9


def test_mellin_vertical_decay(unit_bump):
    # smooth compact support: rapid decay along vertical lines
    small = abs(mellin(unit_bump, 0.5 + 10.0j).value)
    tiny = abs(mellin(unit_bump, 0.5 + 200.0j).value)
    assert tiny < 1e-3 * small


def test_log_moments(unit_bump):
    for j in range(3):
        want, err = quad(lambda x: unit_bump(x) * math.log(x)**j, 1.0, 2.0,
                         epsabs=1e-13)
        got = log_moment(unit_bump, j)
        assert abs(got.value - want) < 1e-11 + 10.0 * err, j
    assert abs(log_moment(unit_bump, 0).value - 0.6034501612189381) < 1e-10

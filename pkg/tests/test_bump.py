import math

import numpy as np
import pytest
from scipy.integrate import quad

from deltasum.analytic import BumpFunction, canonical_bump, plateau_bump


def test_canonical_mass_oracle(unit_bump):
    want, err = quad(lambda x: unit_bump(x), 1.0, 2.0, epsabs=1e-13)
    assert err < 1e-8
    assert math.isclose(want, 0.6034501612189381, rel_tol=1e-10)
    assert math.isclose(unit_bump.abs_mass(), want, rel_tol=1e-9)


def test_canonical_shape(unit_bump):
    assert unit_bump.support == (1.0, 2.0)
    assert unit_bump(1.5) == pytest.approx(1.0)  # peak of exp(1 - 1/(1 - t^2))
    assert unit_bump(1.0) == 0.0 and unit_bump(2.0) == 0.0
    assert unit_bump(0.99) == 0.0 and unit_bump(2.01) == 0.0
    xs = np.linspace(1.05, 1.95, 19)
    assert np.all(unit_bump(xs) > 0.0)
    # even about the midpoint
    assert np.allclose(unit_bump(1.5 - xs + 1.5), unit_bump(xs), rtol=1e-12)


def test_deriv_matches_finite_difference(unit_bump):
    h = 1e-4
    xs = np.linspace(1.1, 1.9, 17)
    for j in range(1, 5):
        fd = (unit_bump.deriv(xs + h, j - 1) - unit_bump.deriv(xs - h, j - 1)) / (2 * h)
        tol = h * h * unit_bump.deriv_sup[j + 2] + 1e-9 * unit_bump.deriv_sup[j]
        assert np.max(np.abs(unit_bump.deriv(xs, j) - fd)) < tol, j


def test_recorded_sups_bound_grid(unit_bump):
    xs = np.linspace(1.0, 2.0, 1000)
    for j in range(5):
        vals = np.abs(unit_bump.deriv(xs, j))
        assert np.max(vals) <= unit_bump.deriv_sup[j] * (1 + 1e-4)
        assert np.max(vals * xs**j) <= unit_bump.xj_deriv_sup[j] * (1 + 1e-4)


def test_deriv_order_guard(unit_bump):
    with pytest.raises(ValueError):
        unit_bump.deriv(1.5, unit_bump.order + 1)


def test_scalar_and_array_calls(unit_bump):
    v = unit_bump(1.25)
    assert isinstance(v, float)
    arr = unit_bump(np.array([1.25, 1.5]))
    assert arr.shape == (2,)
    assert arr[0] == pytest.approx(v)


def test_cache_key_distinguishes_windows():
    g1 = canonical_bump(1.0, 2.0)
    g2 = canonical_bump(1.0, 2.0)
    g3 = canonical_bump(2.0, 4.0)
    assert g1.cache_key == g2.cache_key
    assert g1.cache_key != g3.cache_key
    with pytest.raises(ValueError):
        canonical_bump(2.0, 1.0)


def test_plateau_exact_on_flat_part():
    g = plateau_bump(1.0, 1.2, 1.8, 2.0)
    flat = np.linspace(1.2, 1.8, 101)
    assert np.all(g(flat) == 1.0)
    assert np.all(g.deriv(flat[1:-1], 1) == 0.0)
    assert g(0.9) == 0.0 and g(2.1) == 0.0
    rise = np.linspace(1.02, 1.18, 9)
    assert np.all((g(rise) > 0.0) & (g(rise) < 1.0))
    with pytest.raises(ValueError):
        plateau_bump(1.0, 0.9, 1.8, 2.0)


def test_plateau_transition_smoothness():
    g = plateau_bump(2.0, 2.5, 3.5, 4.0, order=6)
    h = 1e-4
    xs = np.linspace(2.05, 3.95, 41)
    for j in range(1, 4):
        fd = (g.deriv(xs + h, j - 1) - g.deriv(xs - h, j - 1)) / (2 * h)
        tol = h * h * g.deriv_sup[j + 2] + 1e-9 * g.deriv_sup[j]
        assert np.max(np.abs(g.deriv(xs, j) - fd)) < tol, j


def test_bump_is_frozen(unit_bump):
    assert isinstance(unit_bump, BumpFunction)
    with pytest.raises(AttributeError):
        unit_bump.a = 0.0

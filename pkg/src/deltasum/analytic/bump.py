"""Compactly supported smooth weights and their derivative data.

Every window that enters an oscillatory integral here is one of two
shapes: a symmetric bump on ``[a, b]`` built from ``exp(1 - 1/(1 - t^2))``,
or a plateau that rises smoothly from ``a`` to ``a1``, sits at one until
``b1``, and falls back to zero at ``b``.  Both are C-infinity with all
derivatives vanishing at the support endpoints, which is what the
integration-by-parts tail bounds downstream require.

Derivatives are computed by Taylor-mode arithmetic rather than symbolic
differentiation: for each evaluation point we propagate truncated Taylor
series through the defining composition (square, reciprocal, exp), then
read off ``j! * c_j``.  This is exact up to rounding, vectorises over
points, and costs O(order^2) per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

# Points closer than this (in the normalised variable) to a support edge
# are treated as outside: the true values there underflow double precision
# long before the cutoff matters.
_PAD = 1e-6

# Grid resolution used to record derivative suprema at construction time.
_GRID_N = 4097


# ----------------------------------------------------------------------
# Truncated Taylor arithmetic, vectorised over evaluation points.
# A series is an array of shape (J+1, n): row j holds the j-th Taylor
# coefficient (not derivative) at each of the n points.
# ----------------------------------------------------------------------

def _t_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    J = a.shape[0]
    out = np.zeros_like(a)
    for j in range(J):
        acc = a[0] * b[j]
        for i in range(1, j + 1):
            acc = acc + a[i] * b[j - i]
        out[j] = acc
    return out


def _t_recip(a: np.ndarray) -> np.ndarray:
    J = a.shape[0]
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for j in range(1, J):
        acc = a[1] * out[j - 1]
        for i in range(2, j + 1):
            acc = acc + a[i] * out[j - i]
        out[j] = -out[0] * acc
    return out


def _t_exp(a: np.ndarray) -> np.ndarray:
    # e = exp(a) satisfies e' = a' e, hence j*e_j = sum_{i>=1} i*a_i*e_{j-i}.
    J = a.shape[0]
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for j in range(1, J):
        acc = 1.0 * a[1] * out[j - 1]
        for i in range(2, j + 1):
            acc = acc + i * a[i] * out[j - i]
        out[j] = acc / j
    return out


def _t_var(x: np.ndarray, slope: float, J: int) -> np.ndarray:
    out = np.zeros((J + 1,) + x.shape, dtype=np.float64)
    out[0] = x
    if J >= 1:
        out[1] = slope
    return out


_FACT = np.array([math.factorial(j) for j in range(64)], dtype=np.float64)


def _series_to_derivs(series: np.ndarray) -> np.ndarray:
    J = series.shape[0] - 1
    return series * _FACT[: J + 1].reshape((J + 1,) + (1,) * (series.ndim - 1))


def _expbump_derivs(t: np.ndarray, slope: float, J: int) -> np.ndarray:
    """All x-derivatives through order J of exp(1 - 1/(1 - t^2)), t affine in x."""
    ts = _t_var(t, slope, J)
    w = _t_mul(ts, ts)
    w = -w
    w[0] += 1.0  # w = 1 - t^2
    u = -_t_recip(w)
    u[0] += 1.0  # u = 1 - 1/(1 - t^2)
    return _series_to_derivs(_t_exp(u))


def _smoothstep_derivs(u: np.ndarray, slope: float, J: int) -> np.ndarray:
    """All x-derivatives through order J of f(u)/(f(u)+f(1-u)), f = exp(-1/u)."""
    us = _t_var(u, slope, J)
    vs = -us
    vs[0] += 1.0  # v = 1 - u
    f1 = _t_exp(-_t_recip(us))
    f2 = _t_exp(-_t_recip(vs))
    s = _t_mul(f1, _t_recip(f1 + f2))
    return _series_to_derivs(s)


@dataclass(frozen=True)
class BumpFunction:
    """A smooth compactly supported weight with queryable derivative data.

    ``deriv_sup[j]`` bounds ``sup |w^(j)|`` and ``xj_deriv_sup[j]`` bounds
    ``sup |x^j w^(j)|``; both are recorded on a fine grid at construction
    and padded slightly, and feed the integration-by-parts tail estimates.
    """

    a: float
    b: float
    order: int
    family: str
    params: Tuple[float, ...]
    deriv_fn: Callable[[np.ndarray, int], np.ndarray] = field(repr=False)
    deriv_sup: Tuple[float, ...] = field(default=(), repr=False)
    xj_deriv_sup: Tuple[float, ...] = field(default=(), repr=False)

    def __call__(self, x) -> np.ndarray:
        return self.deriv(x, 0)

    def deriv(self, x, j: int) -> np.ndarray:
        if j > self.order:
            raise ValueError(f"derivative order {j} exceeds recorded order {self.order}")
        arr = np.asarray(x, dtype=np.float64)
        scalar = arr.ndim == 0
        out = self.deriv_fn(np.atleast_1d(arr), j)
        return float(out[0]) if scalar else out

    @property
    def support(self) -> Tuple[float, float]:
        return (self.a, self.b)

    @property
    def cache_key(self) -> tuple:
        return (self.family, self.params, self.order)

    def abs_mass(self) -> float:
        xs = np.linspace(self.a, self.b, 4097)
        from scipy.integrate import simpson

        return float(simpson(np.abs(self(xs)), x=xs))


def _record_sups(fn, a: float, b: float, order: int):
    xs = np.linspace(a, b, _GRID_N)
    sup = []
    xsup = []
    for j in range(order + 1):
        vals = np.abs(fn(xs, j))
        sup.append(float(np.max(vals)) * (1 + 1e-6) + 1e-300)
        xsup.append(float(np.max(vals * np.abs(xs) ** j)) * (1 + 1e-6) + 1e-300)
    return tuple(sup), tuple(xsup)


def canonical_bump(a: float = 1.0, b: float = 2.0, order: int = 10) -> BumpFunction:
    """Bump exp(1 - 1/(1 - t^2)) in t = (2x - (a+b))/(b - a), peak value 1."""
    if not b > a:
        raise ValueError("need b > a")
    jac = 2.0 / (b - a)
    mid = 0.5 * (a + b)

    def deriv_fn(x: np.ndarray, j: int) -> np.ndarray:
        t = (x - mid) * jac
        inside = np.abs(t) < 1.0 - _PAD
        out = np.zeros(x.shape, dtype=np.float64)
        if np.any(inside):
            with np.errstate(under="ignore"):
                out[inside] = _expbump_derivs(t[inside], jac, j)[j]
        return out

    sup, xsup = _record_sups(deriv_fn, a, b, order)
    return BumpFunction(a, b, order, "canonical", (a, b), deriv_fn, sup, xsup)


def plateau_bump(a: float, a1: float, b1: float, b: float, order: int = 8) -> BumpFunction:
    """Smooth plateau: 0 outside [a, b], exactly 1 on [a1, b1]."""
    if not (a < a1 <= b1 < b):
        raise ValueError("need a < a1 <= b1 < b")
    jr = 1.0 / (a1 - a)
    jf = -1.0 / (b - b1)

    def _step(arg: np.ndarray, slope: float, j: int) -> np.ndarray:
        inner = (arg > _PAD) & (arg < 1.0 - _PAD)
        vals = np.zeros(arg.shape, dtype=np.float64)
        if np.any(inner):
            with np.errstate(under="ignore"):
                vals[inner] = _smoothstep_derivs(arg[inner], slope, j)[j]
        if j == 0:
            vals[arg >= 1.0 - _PAD] = 1.0
        return vals

    def deriv_fn(x: np.ndarray, j: int) -> np.ndarray:
        u = (x - a) * jr
        v = (b - x) * (-jf)
        if j == 0:
            return _step(u, jr, 0) * _step(v, jf, 0)
        # The two transition regions are disjoint, so no product rule.
        out = np.zeros(x.shape, dtype=np.float64)
        rise = (u > 0.0) & (u < 1.0)
        if np.any(rise):
            out[rise] = _step(u[rise], jr, j)
        fall = (v > 0.0) & (v < 1.0)
        if np.any(fall):
            out[fall] = _step(v[fall], jf, j)
        return out

    sup, xsup = _record_sups(deriv_fn, a, b, order)
    return BumpFunction(a, b, order, "plateau", (a, a1, b1, b), deriv_fn, sup, xsup)

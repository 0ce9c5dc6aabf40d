"""Vertical-line integral kernels attached to the degree-three divisor function.

The object computed here is, for ell in {0, 1},

    G_ell(y) = (1/2*pi*i) * INT_(sigma) (pi^3 y)^(-s)
               * [Gamma((1+s+ell)/2) / Gamma((ell-s)/2)]^3 * gt(-s) ds,

with gt the Mellin transform of a smooth compactly supported weight, and
the two hand-off combinations G_pm = (G_0 -+ i G_1) / (2 pi^(3/2)) that
appear in front of the dual sum of the Voronoi formula.

Strategy: the contour is truncated at |t| <= T and discretised once per
(weight, sigma) pair into a reusable "master grid" of Gauss-Legendre
nodes whose panel widths track the local phase speed.  Evaluating the
kernel at a new y then costs one dot product against e^(-i t log(pi^3 y)).
The truncation error carries an explicit certificate: integration by
parts in the Mellin transform gives |gt(-sigma-it)| <= D_j / t^j with
computable constants D_j, and the cubed gamma ratio is bounded by a
calibrated multiple of (1 + t/2)^(3(sigma+1/2)).

The default abscissa is sigma = -1/2, where the gamma ratio is
Gamma(z)/Gamma(conj z) -- exactly unimodular -- so the certificate needs
only T of order 2000.  (A positive abscissa makes the Stirling factor
grow like t^(3(sigma+1/2)) and pushes the certified T out of reach.)
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.special import loggamma

from ..expsum import ComplexValue
from .bump import BumpFunction

DEFAULT_SIGMA = -0.5
DEFAULT_TAIL_TARGET = 1e-10

_GL_ORDER = 12
_PANEL_SPAN = 10.0  # radians of phase per panel; GL12 is exact to ~1e-14 here
_T_MAX = 40000.0

# Leading oscillatory coefficients: the cosine coefficient vanishes and the
# sine coefficient is -2/sqrt(3 pi).
LEMMA_C1 = 0.0
LEMMA_D1 = -2.0 / math.sqrt(3.0 * math.pi)


@dataclass(frozen=True)
class MasterGrid:
    """Cached discretisation of the truncated vertical line for one weight."""

    sigma: float
    T: float
    freq_budget: float
    tail_raw: float       # certified bound on the discarded |t| > T mass
    tail_target: float
    nodes: np.ndarray     # t_k > 0
    base: Tuple[np.ndarray, np.ndarray]   # w_k * R_ell(t_k)^3 * gt(-sigma-i t_k)
    l1: Tuple[float, float]

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)


_GRID_CACHE: dict = {}


def _mellin_d_constants(g: BumpFunction, sigma: float) -> np.ndarray:
    """D_j = INT |g^(j)(x)| x^(j-1-sigma) dx for j = 0..order."""
    a, b = g.support
    xs = np.linspace(a, b, 4097)
    out = []
    for j in range(g.order + 1):
        out.append(simpson(np.abs(g.deriv(xs, j)) * xs ** (j - 1 - sigma), x=xs))
    return np.array(out)


def _gamma_ratio_cubed(s: np.ndarray, ell: int) -> np.ndarray:
    return np.exp(3.0 * (loggamma((1.0 + s + ell) / 2.0) - loggamma((ell - s) / 2.0)))


def _stirling_calibration(sigma: float) -> float:
    """Empirical constant C with |R_ell(sigma+it)^3| <= C (1+t/2)^max(0, 3(sigma+1/2))."""
    p = max(0.0, 3.0 * (sigma + 0.5))
    t = np.linspace(0.0, 50000.0, 20001)
    c = 0.0
    for ell in (0, 1):
        mags = np.abs(_gamma_ratio_cubed(sigma + 1j * t, ell))
        c = max(c, float(np.max(mags / (1.0 + t / 2.0) ** p)))
    return c * (1 + 1e-9)


def _tail_bound(D: np.ndarray, sigma: float, cgamma: float, T: float) -> float:
    # (C/pi) * min_j D_j * INT_T^inf (1+t/2)^p t^(-j) dt, with (1+t/2)^p <= t^p
    # for t >= 2; the integral closes to T^(p-j+1)/(j-p-1).
    p = max(0.0, 3.0 * (sigma + 0.5))
    best = math.inf
    for j in range(1, len(D)):
        if j <= p + 1.0:
            continue
        best = min(best, D[j] * T ** (p - j + 1) / (j - p - 1))
    return cgamma / math.pi * best


def _choose_T(D: np.ndarray, sigma: float, cgamma: float, target: float) -> Tuple[float, float]:
    for T in np.geomspace(50.0, _T_MAX, 400):
        b = _tail_bound(D, sigma, cgamma, T)
        if b <= target:
            return float(T), b
    return _T_MAX, _tail_bound(D, sigma, cgamma, _T_MAX)


def _mellin_on_line(g: BumpFunction, sigma: float, tnodes: np.ndarray) -> np.ndarray:
    """gt(-sigma - i t) on a batch of t, by trapezoid in v = log x.

    The integrand g(e^v) e^(-sigma v) vanishes to all orders at both ends,
    so the uniform-grid trapezoid rule is spectrally accurate; aliasing sits
    at frequency 2 pi N / log(b/a), far beyond any t used here.
    """
    a, b = g.support
    n = 2048
    v = np.linspace(math.log(a), math.log(b), n + 1)
    h = v[1] - v[0]
    f = g(np.exp(v)) * np.exp(-sigma * v) * h
    out = np.empty(tnodes.shape, dtype=np.complex128)
    step = 8192
    for i in range(0, tnodes.size, step):
        tc = tnodes[i : i + step]
        out[i : i + step] = np.exp(-1j * np.multiply.outer(tc, v)) @ f
    return out


def _build_grid(g: BumpFunction, sigma: float, freq_budget: float, tail_target: float) -> MasterGrid:
    D = _mellin_d_constants(g, sigma)
    cgamma = _stirling_calibration(sigma)
    T, tail_raw = _choose_T(D, sigma, cgamma, tail_target)

    # Panel edges: accumulate the local phase-speed bound
    # freq_budget + 3 log(2 + t/2) + 3 and cut every _PANEL_SPAN radians.
    tprobe = np.linspace(0.0, T, 20001)
    speed = freq_budget + 3.0 * np.log(2.0 + tprobe / 2.0) + 3.0
    phase = np.concatenate([[0.0], np.cumsum((speed[1:] + speed[:-1]) / 2 * np.diff(tprobe))])
    levels = np.arange(0.0, phase[-1], _PANEL_SPAN)
    edges = np.interp(levels, phase, tprobe)
    edges = np.append(edges, T)

    xk, wk = np.polynomial.legendre.leggauss(_GL_ORDER)
    half = np.diff(edges) / 2.0
    mid = (edges[1:] + edges[:-1]) / 2.0
    nodes = (mid[:, None] + half[:, None] * xk[None, :]).ravel()
    weights = (half[:, None] * wk[None, :]).ravel()

    gt = _mellin_on_line(g, sigma, nodes)
    s = sigma + 1j * nodes
    base0 = weights * _gamma_ratio_cubed(s, 0) * gt
    base1 = weights * _gamma_ratio_cubed(s, 1) * gt
    return MasterGrid(
        sigma=sigma,
        T=T,
        freq_budget=freq_budget,
        tail_raw=tail_raw,
        tail_target=tail_target,
        nodes=nodes,
        base=(base0, base1),
        l1=(float(np.sum(np.abs(base0))), float(np.sum(np.abs(base1)))),
    )


def _grid_for(g: BumpFunction, sigma: float, freq_budget: float, tail_target: float) -> MasterGrid:
    key = (g.cache_key, float(sigma), float(freq_budget), float(tail_target))
    grid = _GRID_CACHE.get(key)
    if grid is None:
        grid = _build_grid(g, sigma, freq_budget, tail_target)
        _GRID_CACHE[key] = grid
    return grid


def _budget_for(logy: np.ndarray) -> float:
    # Round the needed budget up to the next power of two so repeated calls
    # with nearby y ranges share one cached grid.
    need = max(16.0, float(np.max(np.abs(logy))) + 2.0)
    return float(2.0 ** math.ceil(math.log2(need)))


def g_ell_many(
    y,
    ell: int,
    g: BumpFunction,
    *,
    sigma: float = DEFAULT_SIGMA,
    tail_target: float = DEFAULT_TAIL_TARGET,
    freq_budget: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """G_ell at a batch of y values; returns (values, error estimates)."""
    if ell not in (0, 1):
        raise ValueError("ell must be 0 or 1")
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if np.any(ys <= 0):
        raise ValueError("y must be positive")
    logy = np.log(np.pi**3 * ys)
    if freq_budget is None:
        freq_budget = _budget_for(logy)
    grid = _grid_for(g, sigma, freq_budget, tail_target)
    if float(np.max(np.abs(logy))) > grid.freq_budget - 1.0:
        grid = _grid_for(g, sigma, _budget_for(logy), tail_target)

    base = grid.base[ell]
    acc = np.zeros(ys.shape, dtype=np.complex128)
    tstep = 16384
    ystep = 256
    for i in range(0, ys.size, ystep):
        li = logy[i : i + ystep]
        block = np.zeros(li.shape, dtype=np.complex128)
        for k in range(0, base.size, tstep):
            block += np.exp(-1j * np.multiply.outer(li, grid.nodes[k : k + tstep])) @ base[k : k + tstep]
        acc[i : i + ystep] = block

    pref = (np.pi**3 * ys) ** (-sigma) / math.pi
    vals = pref * np.real(acc)
    errs = pref * (grid.tail_raw + 1e-12 * grid.l1[ell])
    return vals, errs


def g_ell(y: float, ell: int, g: BumpFunction, **cfg) -> ComplexValue:
    vals, errs = g_ell_many(np.array([y]), ell, g, **cfg)
    return ComplexValue(complex(vals[0]), float(errs[0]))


def g_kernel_many(y, sign: int, g: BumpFunction, **cfg) -> Tuple[np.ndarray, np.ndarray]:
    """G_pm = (G_0 -+ i G_1)/(2 pi^(3/2)) at a batch of y; (values, errors)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    v0, e0 = g_ell_many(y, 0, g, **cfg)
    v1, e1 = g_ell_many(y, 1, g, **cfg)
    c = 1.0 / (2.0 * math.pi**1.5)
    vals = c * (v0 - 1j * sign * v1)
    errs = c * (e0 + e1)
    return vals, errs


def g_kernel(y: float, sign: int, g: BumpFunction, **cfg) -> ComplexValue:
    vals, errs = g_kernel_many(np.array([y]), sign, g, **cfg)
    return ComplexValue(complex(vals[0]), float(errs[0]))


def g0_asymptotic(y: float, g: BumpFunction, terms: int = 1) -> complex:
    """Leading oscillatory approximation to G_0(y), one term only:

        pi^3 y INT g(z) d_1 sin(6 pi (yz)^(1/3)) / (pi^3 y z)^(1/3) dz.

    The prefactor pi^3 y is pinned numerically: against the vertical-line
    evaluation of G_0 the two routes agree to O((yM)^(-2/3)) with this
    constant and are off by exactly pi with pi^4 y.
    """
    if terms != 1:
        raise ValueError("only the leading term is available")
    if y <= 0:
        raise ValueError("y must be positive")
    from .quadrature import osc_quad

    a, b = g.support

    def amp(z):
        return g(z) * LEMMA_D1 / (np.pi**3 * y * z) ** (1.0 / 3.0)

    def phase(z):
        return 6.0 * np.pi * (y * z) ** (1.0 / 3.0)

    r = osc_quad(amp, phase, a, b)
    return complex(math.pi**3 * y * r.value.imag)


def g_ell_reference(y: float, ell: int, g: BumpFunction, *, sigma: float = DEFAULT_SIGMA,
                    T: Optional[float] = None, mellin_rel_tol: float = 1e-11,
                    epsrel: float = 1.49e-8) -> complex:
    """Slow second scheme: adaptive quadrature in t with per-node Mellin values.

    Used to cross-check the master-grid evaluator on a few probe points.
    """
    from scipy.integrate import quad

    from .mellin import mellin

    if T is None:
        grid = _grid_for(g, sigma, 16.0, DEFAULT_TAIL_TARGET)
        T = grid.T
    logy = math.log(math.pi**3 * y)

    def integrand(t: float) -> complex:
        s = sigma + 1j * t
        gt = mellin(g, -s, rel_tol=mellin_rel_tol).value
        return complex(np.exp(-1j * t * logy) * _gamma_ratio_cubed(np.array([s]), ell)[0] * gt)

    re = quad(lambda t: integrand(t).real, 0.0, T, limit=4000, epsrel=epsrel)[0]
    im = quad(lambda t: integrand(t).imag, 0.0, T, limit=4000, epsrel=epsrel)[0]
    return (math.pi**3 * y) ** (-sigma) / math.pi * complex(re + 1j * im).real


def small_y_profile(g: BumpFunction, ys, sign: int = 1, **cfg) -> np.ndarray:
    """|G_pm(y)| / y for small y; bounded ratios witness the y -> 0 decay."""
    ys = np.asarray(ys, dtype=np.float64)
    vals, _ = g_kernel_many(ys, sign, g, **cfg)
    return np.abs(vals) / ys


def kernel_table(ys, sign: int, g: BumpFunction, path: str, **cfg) -> None:
    """Write rows (y, Re, Im, error-estimate) as CSV."""
    ys = np.asarray(ys, dtype=np.float64)
    vals, errs = g_kernel_many(ys, sign, g, **cfg)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y", "re", "im", "err"])
        for yy, vv, ee in zip(ys, vals, errs):
            writer.writerow([f"{yy:.17g}", f"{vv.real:.17g}", f"{vv.imag:.17g}", f"{ee:.17g}"])

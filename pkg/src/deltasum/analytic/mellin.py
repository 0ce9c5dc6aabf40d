"""Mellin transform of a compactly supported window.

For a window g on [a, b] with 0 < a < b the transform
integral g(x) x^(s-1) dx is entire in s; along vertical lines it turns into
an oscillatory integral with phase Im(s) * log(x), which is what `osc_quad`
is built for.
"""

from __future__ import annotations

import numpy as np

from ..expsum import ComplexValue
from .bump import BumpFunction
from .quadrature import osc_quad


def mellin(g: BumpFunction, s: complex, *, rel_tol: float = 1e-12) -> ComplexValue:
    """integral over the support of g(x) * x^(s-1) dx."""
    s = complex(s)
    sigma, t = s.real, s.imag

    def amp(x):
        return g(x) * x**(sigma - 1.0)

    def phase(x):
        return t * np.log(x)

    res = osc_quad(amp, phase if t != 0.0 else None, g.a, g.b, rel_tol=rel_tol)
    return ComplexValue(res.value, res.err)


def log_moment(g: BumpFunction, j: int) -> ComplexValue:
    """integral g(x) log(x)^j dx: the j-th s-derivative of the transform at s=1."""

    def amp(x):
        return g(x) * np.log(x)**j

    res = osc_quad(amp, None, g.a, g.b, rel_tol=1e-13)
    return ComplexValue(res.value, res.err)

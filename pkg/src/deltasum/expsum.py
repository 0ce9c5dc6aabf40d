"""Exact evaluation of the classical exponential sums.

Kloosterman sums, Ramanujan sums, quadratic Gauss sums and Gauss sums of
binary (or diagonal rank-r) quadratic forms, each with an independent closed
form or CRT factorization against which the direct summation is tested.

All phases e(t/q) are taken from a cached per-modulus root-of-unity table so
that equal rational phases are equal floats; sums use numpy pairwise
summation, which keeps the absolute error of n unit-modulus terms below
2**-50 * n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

import numpy as np

from .arith import divisors, eps_q, factorize, inv_mod, jacobi

_EPS = 2.0**-52


class ComplexValue(NamedTuple):
    """A complex result with an attached absolute-error estimate."""

    value: complex
    err: float

    def __complex__(self) -> complex:
        return self.value

    def __abs__(self) -> float:
        return abs(self.value)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


def _cv(value: complex, n_terms: int) -> ComplexValue:
    # error contract: >= machine-eps * term count, with a pairwise-sum margin
    return ComplexValue(complex(value), max(1, n_terms) * 4 * _EPS)


@lru_cache(maxsize=512)
def exp_table(q: int) -> np.ndarray:
    """e(k/q) for k = 0..q-1.  Cached, treat as read-only."""
    tab = np.exp(2j * np.pi * np.arange(q) / q)
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=512)
def _units(q: int) -> np.ndarray:
    xs = np.arange(q, dtype=np.int64)
    u = xs[np.gcd(xs, q) == 1] if q > 1 else np.array([0], dtype=np.int64)
    u.setflags(write=False)
    return u


def _carmichael(q: int) -> int:
    lam = 1
    for p, e in factorize(q):
        if p == 2:
            lpe = 1 if e == 1 else (2 if e == 2 else 2 ** (e - 2))
        else:
            lpe = (p - 1) * p ** (e - 1)
        lam = lam * lpe // math.gcd(lam, lpe)
    return lam


def _modpow_vec(base: np.ndarray, exp: int, q: int) -> np.ndarray:
    """Vectorized modular exponentiation; safe for q < 2**31.5."""
    if q >= 1 << 31:
        raise ValueError("modulus too large for vectorized modpow")
    result = np.ones_like(base)
    b = base % q
    while exp > 0:
        if exp & 1:
            result = result * b % q
        b = b * b % q
        exp >>= 1
    return result


@lru_cache(maxsize=512)
def _inv_units(q: int) -> np.ndarray:
    """Inverses of the reduced residues mod q, aligned with _units(q)."""
    if q == 1:
        out = np.array([0], dtype=np.int64)
    else:
        out = _modpow_vec(_units(q), _carmichael(q) - 1, q)
    out.setflags(write=False)
    return out


def kloosterman(a: int, b: int, q: int, mode: str = "auto") -> ComplexValue:
    """Kloosterman sum S(a, b; q) = sum over units x of e((a x + b xbar)/q).

    Modes: "direct" sums over the unit group, "crt" factors through prime
    powers by twisted multiplicativity, "auto" picks crt for composite q
    above a small threshold.  S is real; the imaginary part is roundoff.
    """
    if q < 1:
        raise ValueError("q >= 1 required")
    if q == 1:
        return _cv(1.0 + 0j, 1)
    a %= q
    b %= q
    if mode == "auto":
        fac = factorize(q)
        mode = "crt" if len(fac) > 1 and q > 64 else "direct"
    if mode == "direct":
        xs = _units(q)
        inv = _inv_units(q)
        idx = (a * xs + b * inv) % q
        val = exp_table(q)[idx].sum()
        return _cv(val, xs.size)
    if mode == "crt":
        val = 1 + 0j
        n_terms = 1
        for p, e in factorize(q):
            pe = p**e
            t = inv_mod(q // pe, pe)
            part = kloosterman(a * t % pe, b * t % pe, pe, mode="direct")
            val *= part.value
            n_terms += pe
        return _cv(val, n_terms)
    raise ValueError(f"unknown mode {mode!r}")


def kloosterman_row(a: int, q: int) -> np.ndarray:
    """S(a, b; q) for all b mod q at once, via a length-q FFT.

    S(a, b; q) = sum over units y of e(a ybar / q) e(b y / q), so the row is
    q * ifft of the indicator-weighted vector c[y] = e(a ybar / q).
    """
    c = np.zeros(q, dtype=np.complex128)
    if q == 1:
        return np.array([1.0 + 0j])
    xs = _units(q)
    inv = _inv_units(q)
    c[xs] = exp_table(q)[(a % q) * inv % q]
    return np.fft.ifft(c) * q


def ramanujan_sum(m: int, q: int, mode: str = "closed") -> Union[int, ComplexValue]:
    """Ramanujan sum c_q(m).

    closed: sum over d | (q, m) of d mu(q/d), returned as an exact integer.
    direct: the unit sum S(m, 0; q), returned as a ComplexValue.
    """
    if q < 1:
        raise ValueError("q >= 1 required")
    if mode == "direct":
        return kloosterman(m % q, 0, q, mode="direct")
    if mode != "closed":
        raise ValueError(f"unknown mode {mode!r}")
    g = q if m % q == 0 else math.gcd(m % q, q)
    total = 0
    for d in divisors(g):
        total += d * _mobius(q // d)
    return total


def _mobius(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        out = -out
    return out


def quad_gauss(a: int, q: int, mode: str = "auto") -> ComplexValue:
    """Quadratic Gauss sum g(a; q) = sum over x mod q of e(a x^2 / q).

    Closed trichotomy for gcd(a, q) = 1: eps_q sqrt(q) (a|q) for odd q, zero
    for q = 2 (mod 4), and (1+i) eps_a^{-1} sqrt(q) (q|a) for q = 0 (mod 4)
    (a is odd there by coprimality).
    """
    if q < 1:
        raise ValueError("q >= 1 required")
    a %= q
    if q > 1 and math.gcd(a, q) != 1:
        raise ValueError("quad_gauss requires gcd(a, q) = 1")
    if mode == "direct" or (mode == "auto" and q <= 2):
        xs = np.arange(q, dtype=np.int64)
        idx = a * xs % q * xs % q
        return _cv(exp_table(q)[idx].sum(), q)
    if mode not in ("auto", "closed"):
        raise ValueError(f"unknown mode {mode!r}")
    r = q % 4
    if r in (1, 3):
        return _cv(eps_q(q) * math.sqrt(q) * jacobi(a, q), q)
    if r == 2:
        return _cv(0j, q)
    # q = 0 (mod 4), a odd
    eps_a_inv = 1 + 0j if a % 4 == 1 else -1j
    return _cv((1 + 1j) * eps_a_inv * math.sqrt(q) * jacobi(q, a), q)


@dataclass(frozen=True)
class QuadraticForm:
    """Positive definite integral binary form a x^2 + b y^2 + 2 c x y."""

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.a <= 0 or self.det <= 0:
            raise ValueError("form must be positive definite")

    @property
    def det(self) -> int:
        return self.a * self.b - self.c * self.c

    def __call__(self, x, y):
        return self.a * x * x + self.b * y * y + 2 * self.c * x * y

    def adjoint(self) -> "QuadraticForm":
        """The adjugate form b x^2 + a y^2 - 2 c x y (determinant preserved)."""
        return QuadraticForm(self.b, self.a, -self.c)

    @property
    def adjoint_scale(self) -> int:
        """Smallest N > 0 with N * adjoint/(4 det) integral."""
        d4 = 4 * self.det
        g = math.gcd(math.gcd(self.a, self.b), math.gcd(2 * self.c, d4))
        return d4 // math.gcd(d4, g)


FormLike = Union[QuadraticForm, Sequence[int]]


def _hessian_data(form: FormLike):
    """(rank, det of the doubled matrix, adjugate-of-doubled quadratic map)."""
    if isinstance(form, QuadraticForm):
        h = ((2 * form.a, 2 * form.c), (2 * form.c, 2 * form.b))
        det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0]

        def adj_quad(m):
            m1, m2 = m
            return h[1][1] * m1 * m1 + h[0][0] * m2 * m2 - 2 * h[0][1] * m1 * m2

        def value(x):
            return form(x[0], x[1])

        return 2, det_h, adj_quad, value
    coeffs = [int(c) for c in form]
    if any(c <= 0 for c in coeffs):
        raise ValueError("diagonal form must be positive definite")
    r = len(coeffs)
    det_h = 1
    for c in coeffs:
        det_h *= 2 * c

    def adj_quad(m):
        return sum(det_h // (2 * c) * mi * mi for c, mi in zip(coeffs, m))

    def value(x):
        return sum(c * xi * xi for c, xi in zip(coeffs, x))

    return r, det_h, adj_quad, value


def form_gauss(
    form: FormLike, m: Sequence[int], a: int, q: int, mode: str = "auto"
) -> ComplexValue:
    """Gauss sum of a quadratic form, G_m(a/q) = sum_x e(a (Q(x) + m.x) / q).

    The closed mode, valid for q odd and coprime to 2 a det(Q), is

        (det H | q) * (eps_q (2a|q) sqrt(q))^r * e(-(a/q) Qstar(m)),

    with H the doubled (Hessian) matrix of Q and Qstar(m) the residue
    inverse(2 det H) * m^T adj(H) m mod q; for binary forms this is the
    adjoint form divided by 4 det(Q), and (det H | q) = (det Q | q).
    """
    if q < 1:
        raise ValueError("q >= 1 required")
    r, det_h, adj_quad, value = _hessian_data(form)
    if len(m) != r:
        raise ValueError("shift vector length must match the rank")
    a %= q
    admissible = q % 2 == 1 and math.gcd(q, a * det_h % q if q > 1 else 1) == 1
    if mode == "auto":
        mode = "closed" if admissible and q > 1 else "direct"
    if mode == "direct":
        if r == 2:
            xs = np.arange(q, dtype=np.int64)
            x1 = xs[:, None]
            x2 = xs[None, :]
            if isinstance(form, QuadraticForm):
                ph = form.a * x1 * x1 + form.b * x2 * x2 + 2 * form.c * x1 * x2
            else:
                ph = form[0] * x1 * x1 + form[1] * x2 * x2
            ph = (ph + m[0] * x1 + m[1] * x2) % q
            idx = a * ph % q
            return _cv(exp_table(q)[idx].sum(), q * q)
        total = 0j
        tab = exp_table(q)
        for x in np.ndindex(*([q] * r)):
            total += tab[a * ((value(x) + sum(mi * xi for mi, xi in zip(m, x))) % q) % q]
        return _cv(total, q**r)
    if mode != "closed":
        raise ValueError(f"unknown mode {mode!r}")
    if not admissible:
        raise ValueError("closed form needs odd q coprime to 2 a det")
    phase = (-a * inv_mod(2 * det_h, q) * adj_quad(m)) % q
    pref = jacobi(det_h, q) * (eps_q(q) * jacobi(2 * a, q) * math.sqrt(q)) ** r
    return _cv(pref * exp_table(q)[phase], q)

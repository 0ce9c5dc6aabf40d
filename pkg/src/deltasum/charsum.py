"""Bespoke character sums behind the twisted sums over quadratics.

Everything here is exact arithmetic over roots of unity: the quadratic
character sum frakC and its Gauss-sum closed form, the Kloosterman-twisted
frakC1, the frequency sums S (with the zero-frequency reduction as an
independent oracle), the Kloosterman-sum correlation controlled by a
fractional-linear transformation, and the quadratic-form variant frakS1.

Bound checks report ratios against the lemma bounds; the hidden absolute
constants are replaced by a documented slack of 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from .arith import (
    divisors,
    eps_q,
    inv_mod,
    is_prime,
    modulus_split,
    squarefull_split,
)
from .expsum import (
    ComplexValue,
    QuadraticForm,
    _cv,
    _inv_units,
    _units,
    exp_table,
    kloosterman,
    kloosterman_row,
    ramanujan_sum,
)

BOUND_SLACK = 10.0  # stand-in for the lemmas' implied absolute constants


def frakC(m1: int, m2: int, a: int, q: int, mode: str = "auto") -> ComplexValue:
    """Complete quadratic character sum over pairs of residues.

    direct: sum over alpha1, alpha2 mod q of
    e(-abar(alpha1^2 + alpha2^2 - m1 alpha1 - m2 alpha2)/q); separable into
    two single sums.  closed (odd q): eps_q^2 * q * e(+(4a)bar(m1^2+m2^2)/q).
    The sign of the closed-form phase is fixed by direct evaluation
    (q=3, a=1, m1=1: the sum is -3e(1/3), i.e. 3e(-1/6)).
    """
    if q < 1:
        raise ValueError("q >= 1 required")
    if math.gcd(a, q) != 1:
        raise ValueError("gcd(a, q) = 1 required")
    if q == 1:
        return ComplexValue(1.0 + 0j, 0.0)
    if mode == "auto":
        mode = "closed" if q % 2 == 1 else "direct"
    if mode == "closed":
        if q % 2 == 0:
            raise ValueError("closed form requires odd q")
        e = exp_table(q)
        phase = (inv_mod(4 * a, q) * (m1 * m1 + m2 * m2)) % q
        return _cv(eps_q(q) ** 2 * q * e[phase], 4)
    if mode != "direct":
        raise ValueError(f"unknown mode {mode!r}")
    abar = inv_mod(a, q)
    e = exp_table(q)
    al = np.arange(q, dtype=np.int64)
    s1 = e[(-abar * (al * al - m1 * al)) % q].sum()
    s2 = e[(-abar * (al * al - m2 * al)) % q].sum()
    return _cv(s1 * s2, q * q)


def _frakC_units(m1: int, m2: int, q: int) -> np.ndarray:
    """frakC(m1, m2, a, q) for every a, indexed by abar = inv(a) mod q.

    Entry [b] holds the direct sum with abar = b (meaningful at units only).
    The one-dimensional sums over alpha are DFTs of residue histograms.
    """
    al = np.arange(q, dtype=np.int64)
    h1 = np.bincount((al * al - m1 * al) % q, minlength=q)
    h2 = np.bincount((al * al - m2 * al) % q, minlength=q)
    return np.fft.fft(h1) * np.fft.fft(h2)


def _kloosterman_table(q: int) -> np.ndarray:
    """S(x, j; q) for all x, j mod q (rows at non-unit x are zero)."""
    return _kloosterman_table_cached(q).copy()


@lru_cache(maxsize=64)
def _kloosterman_table_cached(q: int) -> np.ndarray:
    if q == 1:
        return np.ones((1, 1), dtype=complex)
    units = _units(q)
    inv = _inv_units(q)
    e = exp_table(q)
    c = np.zeros((q, q), dtype=complex)
    c[np.ix_(units, units)] = e[(units[:, None] * inv[None, :]) % q]
    out = np.zeros((q, q), dtype=complex)
    out[units] = q * np.fft.ifft(c[units], axis=1)
    out.setflags(write=False)
    return out


def frakC1(
    m1: int,
    m2: int,
    m: int,
    n: int,
    n3: int,
    k: int,
    q: int,
    sign: int = 1,
    form: str = "definition",
) -> ComplexValue:
    """Kloosterman-twisted character sum
    sum*_{a mod q} S(abar, sign*m; q/n) frakC(m1,m2,a;q) e(-a n3^k / q).

    form="definition" evaluates frakC by direct summation; form="simplified"
    uses the collapsed odd-q expression q eps_q^2 e((4a)bar(m1^2+m2^2)/q).
    """
    if q < 1 or n < 1 or q % n != 0:
        raise ValueError("n | q required")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if q == 1:
        return ComplexValue(1.0 + 0j, 0.0)
    qn = q // n
    units = _units(q)
    inv = _inv_units(q)
    e = exp_table(q)
    t = pow(n3, k, q)
    phases = e[(-units * t) % q]
    if form == "definition":
        cvals = _frakC_units(m1, m2, q)[inv]
    elif form == "simplified":
        if q % 2 == 0:
            raise ValueError("simplified form requires odd q")
        delta = (m1 * m1 + m2 * m2) % q
        inv4a = (inv_mod(4, q) * inv) % q
        cvals = q * eps_q(q) ** 2 * e[(inv4a * delta) % q]
    else:
        raise ValueError(f"unknown form {form!r}")
    kt = _kloosterman_table_cached(qn)
    svals = kt[inv % qn, (sign * m) % qn] if qn > 1 else np.ones(units.size)
    total = (svals * cvals * phases).sum()
    return _cv(total, units.size * (qn + q))


@dataclass(frozen=True)
class FreqSumInput:
    """Arguments of the frequency sum S: modulus q, divisor n | q, shift
    pair (m1, m2), twists n3, n3p, power k >= 3, frequency m, sign choice."""

    q: int
    n: int
    m1: int
    m2: int
    n3: int
    n3p: int
    k: int
    m: int = 0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.q < 1 or self.n < 1 or self.q % self.n != 0:
            raise ValueError("n | q required")
        if self.k < 3:
            raise ValueError("k >= 3 required")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.n3 < 1 or self.n3p < 1:
            raise ValueError("n3, n3p >= 1 required")


def frak_S(inp: FreqSumInput) -> ComplexValue:
    """Brute-force frequency sum
    (n/q) sum_{j mod q/n} e(mj/(q/n)) C1(j; n3) conj(C1(j; n3p)),
    where C1(j; .) is frakC1 with frequency j and the common sign choice.

    The conjugated factor in the opened square is
    sum*_a S(-abar, -sign*j; q/n) e(+(4a)bar delta/q) e(+a n3p^k/q) times q
    eps_q^2, which equals conj(frakC1(j; n3p, sign)) via S(-a,-b) = S(a,b).
    """
    q, n = inp.q, inp.n
    if q == 1:
        return ComplexValue(1.0 + 0j, 0.0)
    qn = q // n
    units = _units(q)
    inv = _inv_units(q)
    e = exp_table(q)
    cvals = _frakC_units(inp.m1, inp.m2, q)[inv]
    t1 = pow(inp.n3, inp.k, q)
    t2 = pow(inp.n3p, inp.k, q)
    coef1 = cvals * e[(-units * t1) % q]
    coef2 = cvals * e[(-units * t2) % q]
    kt = _kloosterman_table_cached(qn)
    j = np.arange(qn)
    rows = kt[inv % qn][:, (inp.sign * j) % qn] if qn > 1 else np.ones((units.size, 1))
    c1 = coef1 @ rows
    c1p = coef2 @ rows
    eq = exp_table(qn)
    w = eq[(inp.m * j) % qn]
    total = (w * c1 * np.conj(c1p)).sum() / qn
    return _cv(total, units.size * q + qn)


def zero_freq_oracle(inp: FreqSumInput) -> ComplexValue:
    """Exact zero-frequency reduction for odd q (independent of frak_S):

    S_0 = q^2 sum*_{a1, a2 mod q} c_{q/n}(a1bar - a2bar)
          e(4bar delta (a1bar - a2bar)/q) e((a2 n3p^k - a1 n3^k)/q),

    obtained by executing the j-sum (Ramanujan-style orthogonality on the
    Kloosterman pair).  The diagonal a1bar = a2bar alone would give the
    q^3 c_q(n3p^k - n3^k) shape quoted for the lemma; the off-diagonal
    terms are the same order, so this full reduction is the oracle.
    """
    q, n = inp.q, inp.n
    if q % 2 == 0:
        raise ValueError("oracle requires odd q")
    if q == 1:
        return ComplexValue(1.0 + 0j, 0.0)
    qn = q // n
    units = _units(q)
    inv = _inv_units(q)
    e = exp_table(q)
    cq = np.array([ramanujan_sum(x, qn) for x in range(qn)], dtype=np.int64)
    delta4 = (inv_mod(4, q) * ((inp.m1 ** 2 + inp.m2 ** 2) % q)) % q
    t1 = pow(inp.n3, inp.k, q)
    t2 = pow(inp.n3p, inp.k, q)
    d_inv = (inv[:, None] - inv[None, :]) % q
    phase = (delta4 * d_inv - t1 * units[:, None] + t2 * units[None, :]) % q
    total = (cq[d_inv % qn] * e[phase]).sum()
    return _cv(q * q * total, units.size ** 2)


def zero_freq_main_term(inp: FreqSumInput) -> int:
    """The quoted main-term shape q^3 c_q(n3p^k - n3^k) (exact integer)."""
    q = inp.q
    delta = (pow(inp.n3p, inp.k, q) - pow(inp.n3, inp.k, q)) % q
    return q ** 3 * ramanujan_sum(delta, q)


def _nonzero_split(inp: FreqSumInput) -> Tuple[int, int, int]:
    """(q1q2, q3', q3'') with n | q1q2 | n^inf, q3' squarefree, q3'' squarefull."""
    q1q2, q3 = modulus_split(inp.q, inp.n)
    q3p, q3pp = squarefull_split(q3)
    return q1q2, q3p, q3pp


def nonzero_lemma_bound(inp: FreqSumInput) -> float:
    """Piecewise lemma bound for |S_{m != 0}| (without the slack constant)."""
    q, n = inp.q, inp.n
    q1q2, q3p, q3pp = _nonzero_split(inp)
    coprime = math.gcd(q3p, inp.n3 ** inp.k * inp.n3p ** inp.k * inp.m) == 1
    if coprime:
        return q ** 3.5 * math.sqrt(q1q2 * q3pp) / n
    return q ** 4 / n


def nonzero_bound_ratio(inp: FreqSumInput) -> float:
    """|frak_S| divided by the lemma's piecewise bound (branch chosen from
    gcd(q3', n3^k n3p^k m); the second branch covers both readings of the
    lemma's 'q3'/m' condition since it is the complement of the first)."""
    if inp.m == 0:
        raise ValueError("nonzero frequency required")
    return abs(frak_S(inp)) / nonzero_lemma_bound(inp)


def nonzero_branch_detail(inp: FreqSumInput) -> Dict[str, object]:
    """Reports both readings of the lemma's second-branch condition."""
    q1q2, q3p, q3pp = _nonzero_split(inp)
    tw = inp.n3 ** inp.k * inp.n3p ** inp.k
    coprime = math.gcd(q3p, tw * inp.m) == 1
    return {
        "q1q2": q1q2,
        "q3_squarefree": q3p,
        "q3_squarefull": q3pp,
        "branch": "coprime" if coprime else "degenerate",
        "reading_divides": q3p > 1 and inp.m % q3p == 0,
        "reading_twist_shared": math.gcd(q3p, inp.m) == 1
        and math.gcd(tw, q3p) != 1,
    }


# --- Kloosterman-sum correlation ---------------------------------------------


@dataclass(frozen=True)
class CorrelationParams:
    """Residues c1..c5 mod p defining the correlation sum
    sum*_beta S(c1, c2 + c5 beta; p) S(c3, c4 + c5 betabar; p)
    and the fractional-linear transformations gamma1 = [[c1c5, c1c2], [0, 1]],
    gamma2 = [[c3c4, c3c5], [1, 0]] whose quotient drives the p^{3/2} bound.
    """

    p: int
    c1: int
    c2: int
    c3: int
    c4: int
    c5: int

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p == 2:
            raise ValueError("p must be an odd prime")
        if self.c5 % self.p == 0:
            raise ValueError("c5 must be a unit mod p")

    @property
    def det1(self) -> int:
        return (self.c1 * self.c5) % self.p

    @property
    def det2(self) -> int:
        return (-self.c3 * self.c5 * self.c5) % self.p

    @property
    def admissible(self) -> bool:
        return self.det1 != 0 and self.det2 != 0

    @property
    def gamma1(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        p = self.p
        return ((self.c1 * self.c5 % p, self.c1 * self.c2 % p), (0, 1))

    @property
    def gamma2(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        p = self.p
        return ((self.c3 * self.c4 % p, self.c3 * self.c5 % p), (1, 0))

    @property
    def gamma(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        """gamma2 gamma1^{-1} mod p (requires admissibility)."""
        if not self.admissible:
            raise ValueError("degenerate transformation")
        p = self.p
        s = inv_mod(self.c1 * self.c5 % p, p)
        return (
            (self.c3 * self.c4 * s % p, self.c1 * self.c3 * (self.c5 ** 2 - self.c2 * self.c4) * s % p),
            (s % p, -self.c1 * self.c2 * s % p),
        )

    @classmethod
    def from_context(
        cls,
        p: int,
        q1q2: int,
        n: int,
        m: int,
        n3: int,
        n3p: int,
        k: int,
        m1: int,
        m2: int,
        sign: int = 1,
    ) -> "CorrelationParams":
        """The c-substitution of the squarefree-part analysis: the moduli
        q1q2 (the n-adic part) and the frequency m enter through inverses."""
        if math.gcd(q1q2 * n * m, p) != 1:
            raise ValueError("context requires q1q2, n, m coprime to p")
        t = inv_mod(q1q2 % p, p)
        w = inv_mod((q1q2 // n) % p, p)
        mbar = inv_mod(m % p, p)
        delta4 = (inv_mod(4, p) * t * (m1 * m1 + m2 * m2)) % p
        c1 = (-t * pow(n3, k, p)) % p
        c2 = (-delta4 - sign * mbar * w) % p
        c3 = (t * pow(n3p, k, p)) % p
        c4 = (delta4 - sign * mbar * w) % p
        c5 = (sign * mbar * w) % p
        return cls(p=p, c1=c1, c2=c2, c3=c3, c4=c4, c5=c5)


def kloosterman_correlation(
    p: int, params: CorrelationParams, mode: str = "fast", skip_beta_one: bool = False
) -> ComplexValue:
    """sum*_beta S(c1, c2+c5 beta; p) S(c3, c4+c5 betabar; p), brute force.

    mode="fast" reads the two Kloosterman rows off an FFT table; "direct"
    recomputes each sum term by term.  skip_beta_one drops the beta = 1 term
    (the change of variable behind the correlation bound omits exactly it).
    """
    if p != params.p:
        raise ValueError("prime mismatch")
    c1, c2, c3, c4, c5 = params.c1, params.c2, params.c3, params.c4, params.c5
    betas = np.arange(1, p)
    invs = _inv_units(p)
    if mode == "fast":
        row1 = kloosterman_row(c1, p)
        row3 = kloosterman_row(c3, p)
        vals = row1[(c2 + c5 * betas) % p] * row3[(c4 + c5 * invs) % p]
    elif mode == "direct":
        vals = np.array(
            [
                complex(kloosterman(c1, (c2 + c5 * int(b)) % p, p, mode="direct"))
                * complex(kloosterman(c3, (c4 + c5 * int(bi)) % p, p, mode="direct"))
                for b, bi in zip(betas, invs)
            ]
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if skip_beta_one:
        vals = vals[1:]
    return _cv(vals.sum(), p * p)


def correlation_presub(
    p: int,
    q1q2: int,
    n: int,
    m: int,
    n3: int,
    n3p: int,
    k: int,
    m1: int,
    m2: int,
    sign: int = 1,
) -> ComplexValue:
    """The pre-substitution form of the squarefree-modulus correlation:

    sum*_{a1,a2} e(-4bar a1bar tbar D/p) e(-a1 tbar n3^k/p)
                 e(+4bar a2bar tbar D/p) e(+a2 tbar n3p^k/p)
      sum*_{beta1, beta1bar +- m != 0}
          e(wbar (a1bar beta1 - a2bar inv(beta1bar +- m))/p)

    Equals the c-form correlation with the beta = 1 term removed (the
    change of variable beta = +-m beta1 + 1 ranges over units except 1).
    """
    e = exp_table(p)
    t = inv_mod(q1q2 % p, p)
    w = inv_mod((q1q2 // n) % p, p)
    delta4 = (inv_mod(4, p) * t * (m1 * m1 + m2 * m2)) % p
    t1, t2 = (t * pow(n3, k, p)) % p, (t * pow(n3p, k, p)) % p
    units = np.arange(1, p)
    invs = _inv_units(p)
    f1 = e[(-delta4 * invs - t1 * units) % p]
    f2 = e[(delta4 * invs + t2 * units) % p]
    total = 0j
    inv_table = np.zeros(p, dtype=np.int64)
    inv_table[units] = invs
    for b1, b1i in zip(units, invs):
        arg = (b1i + sign * m) % p
        if arg == 0:
            continue
        g = inv_table[arg]
        inner = e[(w * b1 * invs) % p] * f1
        outer = e[(-w * g * invs) % p] * f2
        total += inner.sum() * outer.sum()
    return _cv(total, p ** 3)


# --- quadratic-form variant ---------------------------------------------------


def frakCprime_units(m1: int, m2: int, q: int, form: QuadraticForm) -> np.ndarray:
    """frakC'(m1, m2, a; q) = sum_{a1,a2 mod q} e(-abar(Q(a1,a2)-m1a1-m2a2)/q)
    for all a, indexed by abar (meaningful at units)."""
    al = np.arange(q, dtype=np.int64)
    x, y = np.meshgrid(al, al, indexing="ij")
    vals = (form.a * x * x + form.b * y * y + 2 * form.c * x * y - m1 * x - m2 * y) % q
    h = np.bincount(vals.ravel(), minlength=q)
    return np.fft.fft(h)


def frakS1(m1: int, m2: int, n: int, q: int, form: QuadraticForm) -> ComplexValue:
    """Brute-force sum*_{a mod q} sum*_{beta mod q/n} e(abar beta/(q/n))
    frakC'(m1, m2, a; q).  The beta-sum is a Ramanujan sum at abar."""
    if q < 1 or n < 1 or q % n != 0:
        raise ValueError("n | q required")
    if q == 1:
        return ComplexValue(1.0 + 0j, 0.0)
    qn = q // n
    units = _units(q)
    inv = _inv_units(q)
    cp = frakCprime_units(m1, m2, q, form)[inv]
    ram = np.array([ramanujan_sum(int(x), qn) for x in inv % qn], dtype=np.int64)
    return _cv((cp * ram).sum(), q * q + units.size * qn)


def frakS1_bound_ratio(
    m1: int, m2: int, n: int, q: int, form: QuadraticForm
) -> float:
    """|frakS1| over the lemma bound (q1^3/n) q2^2 d(q1) d(q2), where q1 is
    the part of q built from primes dividing 2n|det|, without the slack."""
    seed = 2 * n * abs(form.det)
    q1, q2 = modulus_split(q, seed)
    bound = (q1 ** 3 / n) * q2 ** 2 * len(divisors(q1)) * len(divisors(q2))
    return abs(frakS1(m1, m2, n, q, form)) / bound

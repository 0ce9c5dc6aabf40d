"""Coefficient sources for the headline sums.

Three families are supported: the triple divisor function (the degenerate
fully-split case), the symmetric-square lift of the discriminant cusp form
(built from an exact Ramanujan-tau expansion), and user-supplied tables.

The tau expansion is computed exactly: eta^3 has the sparse Jacobi expansion
sum (-1)^k (2k+1) q^{k(k+1)/2}, eta^6 is its convolution square (int64), and
eta^24 follows from two big-integer squarings via Kronecker substitution at
stride 2^192 (gmpy2).  Coefficients of eta^24 stay below 2^160, so digits of
the packed square recover them exactly after a borrow pass.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import gmpy2
import numpy as np

from .arith import divisors, factorize

_STRIDE_WORDS = 3  # 192-bit digits
_STRIDE_BYTES = 8 * _STRIDE_WORDS


def sigma00(m: int, n: int) -> int:
    """Count pairs d1 | n, d2 | (n/d1) with gcd(d2, m) = 1."""
    if m < 1 or n < 1:
        raise ValueError("m, n >= 1 required")
    total = 0
    for d1 in divisors(n):
        for d2 in divisors(n // d1):
            if math.gcd(d2, m) == 1:
                total += 1
    return total


def _eta3_support(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    ks = np.arange(int((math.isqrt(8 * n_max + 1) + 1) // 2) + 2, dtype=np.int64)
    idx = ks * (ks + 1) // 2
    keep = idx <= n_max
    ks, idx = ks[keep], idx[keep]
    val = np.where(ks % 2 == 0, 2 * ks + 1, -(2 * ks + 1))
    return idx, val


def _eta6(n_max: int) -> np.ndarray:
    idx, val = _eta3_support(n_max)
    s = (idx[:, None] + idx[None, :]).ravel()
    w = (val[:, None] * val[None, :]).ravel().astype(np.float64)
    keep = s <= n_max
    # all partial sums stay below (sum |val|)^2 < 2^53, so bincount over
    # float64 weights is exact
    out = np.bincount(s[keep], weights=w[keep], minlength=n_max + 1)
    return np.rint(out).astype(np.int64)


def _pack_signed(arr: np.ndarray) -> gmpy2.mpz:
    n = arr.size
    buf = np.zeros((n, _STRIDE_WORDS), dtype=np.uint64)
    buf[:, 0] = np.where(arr > 0, arr, 0).astype(np.uint64)
    pos = gmpy2.mpz(int.from_bytes(buf.tobytes(), "little"))
    buf[:, 0] = np.where(arr < 0, -arr, 0).astype(np.uint64)
    neg = gmpy2.mpz(int.from_bytes(buf.tobytes(), "little"))
    return pos - neg


def _digit_words(p: gmpy2.mpz, count: int) -> np.ndarray:
    need = count * _STRIDE_BYTES
    nbytes = max(need, (int(p.bit_length()) + 7) // 8)
    raw = int(p).to_bytes(nbytes, "little")[:need]
    return np.frombuffer(raw, dtype=np.uint64).reshape(count, _STRIDE_WORDS).copy()


def _signed_digits(p: gmpy2.mpz, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Decode the low `count` base-2^192 digits of p >= 0 as signed values.

    Returns (neg, words): words hold |digit| as three little-endian uint64
    words after borrow propagation, neg flags the negative digits.
    """
    w = _digit_words(p, count)
    borrow = np.zeros(count, dtype=np.uint64)
    for _ in range(64):
        w0 = w[:, 0] + borrow
        c = (w0 < borrow).astype(np.uint64)
        w1 = w[:, 1] + c
        c = (w1 < c).astype(np.uint64)
        w2 = w[:, 2] + c
        c2 = w2 < c
        pred = (w2 >> np.uint64(63)).astype(bool) | c2
        nb = np.zeros(count, dtype=np.uint64)
        nb[1:] = pred[:-1].astype(np.uint64)
        if np.array_equal(nb, borrow):
            break
        borrow = nb
    else:  # pragma: no cover
        raise ArithmeticError("borrow propagation did not converge")
    out = np.empty_like(w)
    out[:, 0], out[:, 1], out[:, 2] = w0, w1, w2
    neg = pred
    if neg.any():
        m0 = (~w0[neg]) + np.uint64(1)
        c = (w0[neg] == 0).astype(np.uint64)
        m1 = (~w1[neg]) + c
        c = ((w1[neg] == 0) & (c == 1)).astype(np.uint64)
        m2 = (~w2[neg]) + c
        out[neg, 0], out[neg, 1], out[neg, 2] = m0, m1, m2
    return neg, out


def _eta24_digits(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    e6 = _eta6(n_max)
    if int(np.abs(e6).max()) >= 1 << 62:
        raise OverflowError("eta^6 coefficients exceed the packing budget")
    a = _pack_signed(e6)
    p = a * a  # eta^12 in the digits
    p = p * p  # eta^24
    return _signed_digits(p, n_max + 1)


def _words_to_float(neg: np.ndarray, words: np.ndarray) -> np.ndarray:
    f = (
        words[:, 0].astype(np.float64)
        + words[:, 1].astype(np.float64) * 2.0**64
        + words[:, 2].astype(np.float64) * 2.0**128
    )
    return np.where(neg, -f, f)


def _words_to_int(neg: np.ndarray, words: np.ndarray, i: int) -> int:
    v = int(words[i, 0]) + (int(words[i, 1]) << 64) + (int(words[i, 2]) << 128)
    return -v if neg[i] else v


@lru_cache(maxsize=4)
def _tau_data(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """(neg, words) for tau(1..n_max); tau(n) sits at row n-1."""
    if n_max < 1:
        raise ValueError("n_max >= 1 required")
    return _eta24_digits(n_max - 1)


def tau_table(n_max: int) -> List[int]:
    """Exact Ramanujan tau values tau(1..n_max) (index n-1).

    Memory: Python integers, roughly 60 bytes each; n_max = 10**6 needs about
    100 MB.  For larger ranges use tau_float_table, which stores float64.
    """
    neg, words = _tau_data(n_max)
    return [_words_to_int(neg, words, i) for i in range(n_max)]


def tau_float_table(n_max: int) -> np.ndarray:
    """tau(n) as float64 for n = 1..n_max (entry [n] with a dead zero slot)."""
    neg, words = _tau_data(n_max)
    out = np.zeros(n_max + 1, dtype=np.float64)
    out[1:] = _words_to_float(neg, words)
    return out


def tau_exact(n: int, n_max_hint: int = 0) -> int:
    """Exact tau(n) for one n (builds/caches a table up to max(n, hint))."""
    neg, words = _tau_data(max(n, n_max_hint))
    return _words_to_int(neg, words, n - 1)


# --- symmetric-square Schur coefficients -----------------------------------

_TAU_NORM = 11.0 / 2.0


def _h_sequence(e1: float, length: int) -> List[float]:
    """Complete homogeneous symmetric values h_k of {x, 1, 1/x} with
    e1 = e2 = x + 1 + 1/x, e3 = 1: h_k = e1 h_{k-1} - e1 h_{k-2} + h_{k-3}."""
    h = [1.0, e1, e1 * e1 - e1]
    while len(h) < length:
        h.append(e1 * h[-1] - e1 * h[-2] + h[-3])
    return h[:length]


def _schur_from_h(a: int, b: int, h: Sequence[float]) -> float:
    """s_{(a+b, b, 0)} by the 3x3 Jacobi-Trudi determinant, which collapses to
    h_{a+b} h_b - h_{a+b+1} h_{b-1} because the last row is (0, 0, 1)."""
    hb1 = h[b - 1] if b >= 1 else 0.0
    return h[a + b] * h[b] - h[a + b + 1] * hb1


def schur_weyl_ratio(a: int, b: int, alpha_sq: complex, tol: float = 1e-8) -> float:
    """s_{(a+b, b, 0)}(alpha_sq, 1, 1/alpha_sq) as a Vandermonde ratio.

    Independent of the Jacobi-Trudi route; at the confluent point (all three
    Satake values within `tol` of 1) the ratio degenerates and the Weyl
    dimension formula is the limit.
    """
    lam = (a + b, b, 0)
    xs = (alpha_sq, 1.0 + 0j, 1.0 / alpha_sq)
    if abs(alpha_sq - 1.0) < tol:
        l1, l2, l3 = lam
        return (l1 - l2 + 1) * (l2 - l3 + 1) * (l1 - l3 + 2) / 2.0
    num = np.array([[x ** (lam[i] + 2 - i) for x in xs] for i in range(3)])
    den = np.array([[x ** (2 - i) for x in xs] for i in range(3)])
    val = np.linalg.det(num) / np.linalg.det(den)
    return float(val.real)


@dataclass(frozen=True)
class KernelParams:
    """Archimedean parameter triple for the dual-sum kernels.

    The kernels are evaluated at the fully degenerate triple (0, 0, 0); the
    type validates the general constraints so that configurations declare
    their intent explicitly.
    """

    alpha: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if abs(sum(self.alpha)) > 1e-12:
            raise ValueError("parameters must sum to zero")
        if any(abs(a) >= 0.5 for a in self.alpha):
            raise ValueError("parameters must satisfy |alpha_j| < 1/2")

    @property
    def is_degenerate(self) -> bool:
        return all(a == 0.0 for a in self.alpha)


# --- coefficient sources -----------------------------------------------------


class TripleDivisorSource:
    """Fourier coefficients of the fully split degenerate form: the marginal
    Lambda(1, n) is d3(n) and Lambda(p^a, p^b) = (a+1)(b+1)(a+b+2)/2."""

    name = "d3"

    def coeff(self, m: int, n: int) -> float:
        if m < 1 or n < 1:
            raise ValueError("m, n >= 1 required")
        fac: Dict[int, List[int]] = {}
        for p, e in factorize(m):
            fac.setdefault(p, [0, 0])[0] = e
        for p, e in factorize(n):
            fac.setdefault(p, [0, 0])[1] = e
        out = 1.0
        for a, b in fac.values():
            out *= (a + 1) * (b + 1) * (a + b + 2) / 2.0
        return out

    def lambda1_table(self, n_max: int) -> np.ndarray:
        from .arith import mult_tables

        return mult_tables(n_max).d3.astype(np.float64)


class Sym2Source:
    """Symmetric-square lift of the weight-12 discriminant form.

    Hecke-normalized: lambda(p) = tau(p) / p^{11/2}, Satake set
    {alpha_p^2, 1, alpha_p^{-2}}, and Lambda(p^a, p^b) the Schur function
    s_{(a+b, b, 0)} of that set, evaluated through the h-basis so that the
    dyadic case Lambda(1, 2) = lambda(2)^2 - 1 = -23/32 is exact in floats.
    """

    name = "sym2"

    def __init__(self, n_max: int):
        self.n_max = int(n_max)
        self._tau = tau_float_table(self.n_max)

    def _e1(self, p: int) -> float:
        lam = self._tau[p] / float(p) ** _TAU_NORM
        return lam * lam - 1.0

    def coeff(self, m: int, n: int) -> float:
        if m < 1 or n < 1:
            raise ValueError("m, n >= 1 required")
        if max(m, n) > self.n_max:
            raise ValueError("argument beyond tau table range")
        fac: Dict[int, List[int]] = {}
        for p, e in factorize(m):
            fac.setdefault(p, [0, 0])[0] = e
        for p, e in factorize(n):
            fac.setdefault(p, [0, 0])[1] = e
        out = 1.0
        for p, (a, b) in fac.items():
            h = _h_sequence(self._e1(p), a + b + 2)
            out *= _schur_from_h(a, b, h)
        return out

    def lambda1_table(self, n_max: int) -> np.ndarray:
        """Lambda(1, n) for n <= n_max as float64, via a vectorized
        multiplicative fill over the smallest-prime-power decomposition."""
        if n_max > self.n_max:
            raise ValueError("argument beyond tau table range")
        from .arith import _spf_sieve

        n = int(n_max)
        spf = _spf_sieve(n)
        idx = np.arange(n + 1, dtype=np.int64)
        p = spf.copy()
        p[0] = 1
        rest = idx.copy()
        rest[0] = 1
        e = np.zeros(n + 1, dtype=np.int64)
        while True:
            mask = (rest != 1) & (rest % p == 0)
            if not mask.any():
                break
            rest[mask] //= p[mask]
            e[mask] += 1
        pr = (rest == 1) & (e == 1)  # n prime
        prime_idx = idx[pr]
        lam_vals = self._tau[prime_idx] / prime_idx.astype(np.float64) ** _TAU_NORM
        e1 = np.zeros(n + 1, dtype=np.float64)
        e1[prime_idx] = lam_vals * lam_vals - 1.0
        e1_of = e1[p]  # e1 at the smallest prime factor of each n
        max_e = int(e.max()) if n >= 2 else 0
        h0 = np.ones(n + 1)
        h1 = e1_of.copy()
        h2 = e1_of * e1_of - e1_of
        local = np.ones(n + 1)
        hs = [h0, h1, h2]
        for k in range(3, max_e + 1):
            hs.append(e1_of * hs[-1] - e1_of * hs[-2] + hs[-3])
        for k in range(1, max_e + 1):
            local = np.where(e == k, hs[k], local)
        out = _chain_product_float(local, rest)
        out[0] = 0.0
        return out


def _chain_product_float(local: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    ans = local.copy()
    ptr = nxt.copy()
    for _ in range(6):
        ans *= ans[ptr]
        ptr = ptr[ptr]
    return ans


class UserTableSource:
    """Coefficients loaded from a CSV file: rows `n,value` or `m,n,value`."""

    name = "user"

    def __init__(self, path: str):
        self._pairs: Dict[Tuple[int, int], float] = {}
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if len(row) == 2:
                    self._pairs[(1, int(row[0]))] = float(row[1])
                elif len(row) == 3:
                    self._pairs[(int(row[0]), int(row[1]))] = float(row[2])
                else:
                    raise ValueError("expected rows `n,value` or `m,n,value`")
        if not self._pairs:
            raise ValueError("empty coefficient table")
        self.n_max = max(n for (_, n) in self._pairs)

    def coeff(self, m: int, n: int) -> float:
        try:
            return self._pairs[(m, n)]
        except KeyError as exc:
            raise KeyError(f"no coefficient for (m, n) = ({m}, {n})") from exc

    def lambda1_table(self, n_max: int) -> np.ndarray:
        out = np.zeros(n_max + 1)
        for (m, n), v in self._pairs.items():
            if m == 1 and n <= n_max:
                out[n] = v
        return out


def l2_ratio(x: int, source, w: float = 0.0) -> float:
    """sum_{m^2 n <= X} |Lambda(m, n)|^2 / (m^2 n)^w, the Rankin-Selberg-type
    mean: divided by X^(1-w) while w < 1, returned raw once the sum itself
    is bounded (w >= 1)."""
    if x < 1:
        raise ValueError("X >= 1 required")
    if w < 0:
        raise ValueError("w >= 0 required")
    total = 0.0
    m = 1
    while m * m <= x:
        for n in range(1, x // (m * m) + 1):
            term = source.coeff(m, n) ** 2
            if w != 0.0:
                term /= float(m * m * n) ** w
            total += term
        m += 1
    return total / x ** (1.0 - w) if w < 1.0 else total

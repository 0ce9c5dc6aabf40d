"""Exact integer arithmetic used throughout the package.

Factorization, sieves of multiplicative functions (d, d3, mu, von Mangoldt,
phi), Jacobi symbols, modular inverses, squarefull counting, and the two
modulus splittings (squarefree/squarefull and seed-adic/coprime) that the
character-sum bounds are stated in terms of.

Everything is exact integer arithmetic; floating point appears only in the
von Mangoldt table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, NamedTuple, Tuple

import numpy as np

Factorization = List[Tuple[int, int]]

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin with a fixed witness set)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite n.

    Deterministic: polynomial shifts are tried in a fixed order.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")  # pragma: no cover


def factorize(n: int) -> Factorization:
    """Prime factorization of n >= 1 as an ordered list of (prime, exponent)."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    # trial division by 6k+-1 up to a fixed bound, rho beyond
    f = 49
    while f * f <= n and f < 1 << 20:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m)
        stack.extend((d, m // d))
    return sorted(out.items())


def divisors(n: int) -> List[int]:
    """Sorted list of positive divisors of n."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


@dataclass(frozen=True)
class MultTables:
    """Sieved multiplicative-function tables on 1..n_max (index = n).

    Index 0 is a dead slot so that table[n] reads naturally.  `spf` holds the
    smallest prime factor, the workhorse for multiplicative fills.
    """

    n_max: int
    spf: np.ndarray  # int64, smallest prime factor, spf[1] = 1
    d: np.ndarray  # int64, number of divisors
    d3: np.ndarray  # int64, triple divisor function
    mu: np.ndarray  # int8, Moebius
    mangoldt: np.ndarray  # float64, von Mangoldt Lambda
    phi: np.ndarray  # int64, Euler phi

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max >= 1 required")


def _spf_sieve(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            spf[p] = p
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    # remaining zeros at indices >= 2 are primes above sqrt(n)
    idx = np.nonzero(spf == 0)[0]
    spf[idx] = idx
    if n >= 1:
        spf[0] = 0
    return spf


def _chain_product(local: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Product of `local` along the chain n -> nxt[n] -> ... -> 1.

    Pointer doubling: six rounds cover chains of length 64, far beyond the
    at most 9 distinct primes of any 64-bit integer.
    """
    ans = local.copy()
    ptr = nxt.copy()
    for _ in range(6):
        ans *= ans[ptr]
        ptr = ptr[ptr]
    return ans


def mult_tables(n_max: int) -> MultTables:
    """Build the d, d3, mu, von Mangoldt and phi tables up to n_max.

    Memory: six arrays of length n_max+1 (about 50 bytes/entry); n_max = 10**7
    stays near 500 MB.  The fill is fully vectorized: the smallest-prime-power
    decomposition n = p^e * rest is extracted by repeated division and each
    multiplicative table is the chain product of its local values p^e -> f(p,e)
    along rest-chains.  d3 uses d3(p^e) = (e+1)(e+2)/2.
    """
    if n_max < 1:
        raise ValueError("n_max >= 1 required")
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
    pk = np.ones(n + 1, dtype=np.int64)
    pk[1:] = idx[1:] // rest[1:]

    d = _chain_product(e + 1, rest)
    d3 = _chain_product((e + 1) * (e + 2) // 2, rest)
    mu64 = _chain_product(np.where(e == 1, -1, np.where(e == 0, 1, 0)), rest)
    phi = _chain_product(np.where(e > 0, pk // p * (p - 1), 1), rest)
    mangoldt = np.zeros(n + 1, dtype=np.float64)
    pp = (rest == 1) & (idx >= 2)
    mangoldt[pp] = np.log(spf[pp].astype(np.float64))
    for arr in (d, d3, mu64, phi):
        arr[0] = 0
    return MultTables(
        n_max=n, spf=spf, d=d, d3=d3, mu=mu64.astype(np.int8), mangoldt=mangoldt, phi=phi
    )


def d3_of(n: int) -> int:
    """Triple divisor function of a single n via factorization (no sieve)."""
    out = 1
    for _, e in factorize(n):
        out *= (e + 1) * (e + 2) // 2
    return out


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd n >= 1."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs odd n >= 1")
    a %= n
    t = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def eps_q(q: int) -> complex:
    """The quarter-period sign: 1 for q = 1 (mod 4), i for q = 3 (mod 4)."""
    r = q % 4
    if r == 1:
        return 1 + 0j
    if r == 3:
        return 1j
    raise ValueError("eps_q is defined for odd q only")


def inv_mod(a: int, q: int) -> int:
    """Inverse of a modulo q in [0, q); raises ValueError if gcd(a, q) > 1."""
    if q < 1:
        raise ValueError("modulus must be positive")
    try:
        return pow(a, -1, q)
    except ValueError as exc:
        raise ValueError(f"{a} is not invertible mod {q}") from exc


class SquarefullSplit(NamedTuple):
    """q = squarefree * squarefull with coprime parts."""

    squarefree: int
    squarefull: int


def squarefull_split(q: int) -> SquarefullSplit:
    """Split q into the product of exponent-1 primes and the squarefull rest."""
    if q < 1:
        raise ValueError("q >= 1 required")
    free = full = 1
    for p, e in factorize(q):
        if e == 1:
            free *= p
        else:
            full *= p**e
    return SquarefullSplit(free, full)


def is_squarefull(n: int) -> bool:
    """True when every prime of n divides it at least twice (1 counts)."""
    return all(e >= 2 for _, e in factorize(n))


def count_squarefull(x: int) -> int:
    """Number of squarefull integers <= x.

    Uses the unique representation n = a^2 b^3 with b squarefree, so the
    count is sum over cubefree-squarefree b of floor(sqrt(x / b^3)).
    """
    if x < 1:
        return 0
    total = 0
    b = 1
    while b**3 <= x:
        if all(e == 1 for _, e in factorize(b)) or b == 1:
            total += math.isqrt(x // b**3)
        b += 1
    return total


class ModulusSplit(NamedTuple):
    """q = seed_part * coprime with every prime of seed_part dividing the seed."""

    seed_part: int
    coprime: int


def modulus_split(q: int, seed: int) -> ModulusSplit:
    """Split q into its seed-adic part and the part coprime to the seed.

    Every prime of `seed_part` divides seed, gcd(coprime, seed) = 1, and the
    product is q.  When n | q and every prime of n divides the seed, n divides
    the seed part.
    """
    if q < 1 or seed < 1:
        raise ValueError("q, seed >= 1 required")
    part = 1
    rest = q
    for p, e in factorize(q):
        if seed % p == 0:
            part *= p**e
            rest //= p**e
    return ModulusSplit(part, rest)


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> Tuple[int, ...]:
    """Primes <= n as a tuple (cached)."""
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return tuple(int(p) for p in np.nonzero(sieve)[0])

"""Desk-scale evaluation of the headline triple sums and exponent diagnostics.

The sums here are the objects the asymptotic theorems speak about, evaluated
exactly at small scale: a triple sum of coefficients at n1^2 + n2^2 + n3^k
with an arithmetic weight on n3, and a Theorem-2 style double sum over a
positive definite binary form.  Nothing at this scale can confirm an
asymptotic exponent; what the diagnostics do check is that exact evaluation,
an independent enumeration oracle, and the trivial-bound ratios all agree,
and that fitted exponents sit on the right side of the trivial ones.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analytic.bump import BumpFunction, canonical_bump
from .arith import factorize, mult_tables
from .expsum import QuadraticForm

WEIGHTS = ("unit", "mobius", "vonMangoldt")

# sieve tables above this argument ceiling are refused rather than attempted
TABLE_CAP = 40_000_000

# chunk boundaries are independent of the worker count so that the reduced
# float total is bit-identical no matter how many threads run the chunks
_N_CHUNKS = 64

_ENV_THREADS = "DELTASUM_THREADS"


@dataclass(frozen=True)
class WindowConfig:
    """Ranges and windows for one evaluation of the triple sum.

    Y is X^(1/k) unless theta is set, in which case Y = X^theta (the
    Theorem-2 shape).  The delta scale is recorded in the 2 L^(1/2)
    convention: Q = sqrt(X) corresponds to L = X/4, Q = X to L = X^2/4.
    """

    X: float
    k: int = 3
    theta: Optional[float] = None
    mode: str = "sharp"
    w1: Optional[BumpFunction] = None
    w2: Optional[BumpFunction] = None
    w3: Optional[BumpFunction] = None

    def __post_init__(self) -> None:
        if self.X < 4:
            raise ValueError("X >= 4 required")
        if self.k < 3:
            raise ValueError("k >= 3 required")
        if self.theta is not None and not 0.0 < self.theta <= 1.0:
            raise ValueError("theta in (0, 1] required")
        if self.mode not in ("sharp", "smooth"):
            raise ValueError("mode is sharp or smooth")

    @property
    def Y(self) -> float:
        if self.theta is not None:
            return self.X ** self.theta
        return self.X ** (1.0 / self.k)

    @property
    def delta_scale(self) -> float:
        """Q = 2 L^(1/2): sqrt(X) in the k-th power context, X otherwise."""
        return self.X if self.theta is not None else math.sqrt(self.X)

    def window(self, which: int) -> BumpFunction:
        w = (self.w1, self.w2, self.w3)[which - 1]
        return w if w is not None else canonical_bump(1.0, 2.0)


def _threads(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, threads)
    return max(1, int(os.environ.get(_ENV_THREADS, "1")))


def _weight_table(weight: str, n_max: int) -> np.ndarray:
    tables = mult_tables(n_max)
    if weight == "unit":
        return np.ones(n_max + 1)
    if weight == "mobius":
        return tables.mu.astype(np.float64)
    if weight == "vonMangoldt":
        return tables.mangoldt.copy()
    raise ValueError(f"unknown weight {weight!r}")


def _weight_of(weight: str, n: int) -> float:
    """Single-point weight via factorization; independent of the sieve."""
    if weight == "unit":
        return 1.0
    fac = factorize(n)
    if weight == "mobius":
        if n == 1:
            return 1.0
        if any(e > 1 for _, e in fac):
            return 0.0
        return -1.0 if len(fac) % 2 else 1.0
    if weight == "vonMangoldt":
        return math.log(fac[0][0]) if len(fac) == 1 else 0.0
    raise ValueError(f"unknown weight {weight!r}")


def _coeff_table(source, n_max: int) -> np.ndarray:
    if n_max > TABLE_CAP:
        raise ValueError(
            f"coefficient table range exceeded: need {n_max} > cap {TABLE_CAP}")
    return source.lambda1_table(n_max)


def _sk_ranges(cfg: WindowConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray,
                                           np.ndarray, np.ndarray, np.ndarray]:
    """(n1, n2, n3, w1(n1), w2(n2), w3(n3)) for the configured windows."""
    sx = math.sqrt(cfg.X)
    if cfg.mode == "sharp":
        n1 = np.arange(1, int(math.floor(sx)) + 1)
        n3 = np.arange(1, int(math.floor(cfg.Y)) + 1)
        return n1, n1, n3, np.ones(n1.size), np.ones(n1.size), np.ones(n3.size)
    w1, w2, w3 = cfg.window(1), cfg.window(2), cfg.window(3)
    n1 = np.arange(max(1, math.ceil(w1.support[0] * sx)),
                   int(math.floor(w1.support[1] * sx)) + 1)
    n2 = np.arange(max(1, math.ceil(w2.support[0] * sx)),
                   int(math.floor(w2.support[1] * sx)) + 1)
    n3 = np.arange(max(1, math.ceil(w3.support[0] * cfg.Y)),
                   int(math.floor(w3.support[1] * cfg.Y)) + 1)
    return n1, n2, n3, w1(n1 / sx), w2(n2 / sx), w3(n3 / cfg.Y)


def eval_Sk(cfg: WindowConfig, source, weight: str = "unit",
            threads: Optional[int] = None) -> float:
    """Triple sum of coeff(n1^2 + n2^2 + n3^k) * a(n3) over the windows.

    Deterministic for any thread count: the outer n1 range is split into
    chunks at thread-count-independent boundaries and the partial sums are
    reduced in index order, so the float result is bit-identical for any nt.
    """
    n1, n2, n3, wv1, wv2, wv3 = _sk_ranges(cfg)
    if weight not in WEIGHTS:
        raise ValueError(f"unknown weight {weight!r}")
    n3k = n3.astype(np.int64) ** cfg.k
    max_arg = int(n1[-1]) ** 2 + int(n2[-1]) ** 2 + int(n3k[-1])
    lam = _coeff_table(source, max_arg)
    aw = _weight_table(weight, int(n3[-1]))[n3] * wv3
    col = aw * 1.0
    sq2 = n2.astype(np.int64) ** 2

    def chunk_sum(lo: int, hi: int) -> float:
        total = 0.0
        for i in range(lo, hi):
            args = int(n1[i]) ** 2 + sq2[:, None] + n3k[None, :]
            total += float(wv1[i] * np.sum(lam[args] * (wv2[:, None] * col[None, :])))
        return total

    nt = _threads(threads)
    bounds = np.linspace(0, n1.size, _N_CHUNKS + 1).astype(int)
    jobs = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if nt == 1:
        parts = [chunk_sum(a, b) for a, b in jobs]
    else:
        with ThreadPoolExecutor(max_workers=nt) as pool:
            parts = list(pool.map(lambda ab: chunk_sum(*ab), jobs))
    return math.fsum(parts)


def eval_sk_enumeration(cfg: WindowConfig, source, weight: str = "unit") -> float:
    """Independent oracle: plain nested loops, per-term factorization.

    Shares no tables with eval_Sk; d3 and the weights come from factorize on
    each argument.  Meant for small X only.
    """
    n1, n2, n3, wv1, wv2, wv3 = _sk_ranges(cfg)
    total = 0.0
    for i, a in enumerate(n1):
        for j, b in enumerate(n2):
            base = int(a) ** 2 + int(b) ** 2
            for t, c in enumerate(n3):
                arg = base + int(c) ** cfg.k
                term = source.coeff(1, arg) * _weight_of(weight, int(c))
                total += wv1[i] * wv2[j] * wv3[t] * term
    return total


def eval_s_quad_enumeration(cfg: WindowConfig, form: QuadraticForm, source) -> float:
    """Independent oracle for the double sum: nested loops, per-term coeff."""
    if form.a <= 0 or form.det <= 0:
        raise ValueError("positive definite form required")
    if cfg.theta is None:
        raise ValueError("theta must be set for the double sum")
    n1, n2, wv1, wv2 = _quad_ranges(cfg)
    total = 0.0
    for i, a in enumerate(n1):
        for j, b in enumerate(n2):
            arg = form.a * int(a) ** 2 + form.b * int(b) ** 2 + 2 * form.c * int(a) * int(b)
            total += wv1[i] * wv2[j] * source.coeff(1, int(arg))
    return total


def _quad_ranges(cfg: WindowConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if cfg.mode == "sharp":
        n1 = np.arange(1, int(math.floor(cfg.X)) + 1)
        n2 = np.arange(1, int(math.floor(cfg.Y)) + 1)
        return n1, n2, np.ones(n1.size), np.ones(n2.size)
    w1, w2 = cfg.window(1), cfg.window(2)
    n1 = np.arange(max(1, math.ceil(w1.support[0] * cfg.X)),
                   int(math.floor(w1.support[1] * cfg.X)) + 1)
    n2 = np.arange(max(1, math.ceil(w2.support[0] * cfg.Y)),
                   int(math.floor(w2.support[1] * cfg.Y)) + 1)
    return n1, n2, w1(n1 / cfg.X), w2(n2 / cfg.Y)


def eval_S_quad(cfg: WindowConfig, form: QuadraticForm, source,
                threads: Optional[int] = None) -> float:
    """Double sum of coeff(Q(n1, n2)) with windows at n1 ~ X, n2 ~ Y.

    Requires a positive definite form (a > 0 and det > 0).
    """
    if form.a <= 0 or form.det <= 0:
        raise ValueError("positive definite form required")
    if cfg.theta is None:
        raise ValueError("theta must be set for the double sum")
    n1, n2, wv1, wv2 = _quad_ranges(cfg)
    u_hi, v_hi = int(n1[-1]), int(n2[-1])
    max_arg = form.a * u_hi * u_hi + form.b * v_hi * v_hi + 2 * abs(form.c) * u_hi * v_hi
    lam = _coeff_table(source, int(max_arg))
    u = n1.astype(np.int64)
    v = n2.astype(np.int64)
    vv = form.b * v * v

    def chunk_sum(lo: int, hi: int) -> float:
        total = 0.0
        for i in range(lo, hi):
            args = form.a * int(u[i]) ** 2 + vv + 2 * form.c * int(u[i]) * v
            total += float(wv1[i] * np.sum(lam[args] * wv2))
        return total

    nt = _threads(threads)
    bounds = np.linspace(0, n1.size, _N_CHUNKS + 1).astype(int)
    jobs = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if nt == 1:
        parts = [chunk_sum(a, b) for a, b in jobs]
    else:
        with ThreadPoolExecutor(max_workers=nt) as pool:
            parts = list(pool.map(lambda ab: chunk_sum(*ab), jobs))
    return math.fsum(parts)


def trivial_ratio(cfg: WindowConfig, value: float) -> float:
    """|value| against the trivial scale X^(1+1/k), or X^(1+theta)."""
    if cfg.theta is not None:
        expo = 1.0 + cfg.theta
    else:
        expo = 1.0 + 1.0 / cfg.k
    return abs(value) / cfg.X ** expo


@dataclass(frozen=True)
class ExponentFit:
    """Log-log least-squares slope over a series of (X, value) points."""

    points: Tuple[Tuple[float, float], ...]
    slope: float
    stderr: float


def exponent_fit(series: Sequence[Tuple[float, float]]) -> ExponentFit:
    """Least-squares slope of log|value| against log X, with standard error."""
    pts = [(float(x), float(v)) for x, v in series]
    if len(pts) < 3:
        raise ValueError("need at least 3 sample points")
    if any(v == 0.0 for _, v in pts):
        raise ValueError("zero values make the log-log fit degenerate")
    lx = np.log([x for x, _ in pts])
    lv = np.log([abs(v) for _, v in pts])
    n = len(pts)
    xm = lx.mean()
    sxx = float(np.sum((lx - xm) ** 2))
    if sxx == 0.0:
        raise ValueError("degenerate series: all X equal")
    slope = float(np.sum((lx - xm) * lv) / sxx)
    icept = float(lv.mean() - slope * xm)
    rss = float(np.sum((lv - icept - slope * lx) ** 2))
    stderr = math.sqrt(max(rss, 0.0) / (n - 2) / sxx) if n > 2 else 0.0
    return ExponentFit(points=tuple(pts), slope=slope, stderr=stderr)


def subtract_main_term(series: Sequence[Tuple[float, float]], k: int
                       ) -> Tuple[np.ndarray, List[Tuple[float, float]]]:
    """Remove a fitted X^(1+1/k) (c0 + c1 log X + c2 log^2 X) main term.

    For nonnegative coefficients with unit weight the raw sum is dominated by
    this positive main term; cancellation diagnostics run on the residuals.
    Returns (fitted coefficients, residual series).
    """
    pts = [(float(x), float(v)) for x, v in series]
    if len(pts) < 4:
        raise ValueError("need at least 4 points to fit 3 coefficients")
    x = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    scale = x ** (1.0 + 1.0 / k)
    ll = np.log(x)
    design = np.stack([np.ones_like(ll), ll, ll * ll], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, v / scale, rcond=None)
    resid = v - scale * (design @ coeffs)
    return coeffs, list(zip(x.tolist(), resid.tolist()))


def zhou_hu_delta(k: int) -> Fraction:
    """Power saving of the prior k-th power result."""
    if k < 3:
        raise ValueError("k >= 3 required")
    if k == 3:
        return Fraction(1, 15)
    if 4 <= k <= 7:
        return Fraction(1, k * 2 ** (k - 1))
    return Fraction(1, 2 * k * k * (k - 1))


def theorem_exponents(k: int, theorem: int, theta: float = 1.0) -> Dict[str, float]:
    """Total X-exponents: trivial, best prior, and the bounds verified here.

    Theorem-1 entries fold Y = X^(1/k) into the exponent; the Theorem-2
    trivial entry depends on theta while the other two do not.
    """
    if k < 3:
        raise ValueError("k >= 3 required")
    if theorem == 1:
        trivial = 1.0 + 1.0 / k
        this = 7.0 / 8.0 + 1.0 / k if k == 3 else 1.0 + 1.0 / (2 * k)
        return {
            "trivial": trivial,
            "zhou_hu": trivial - float(zhou_hu_delta(k)),
            "this_paper": this,
        }
    if theorem == 2:
        return {
            "trivial": 1.0 + theta,
            "prior": 2.0 - 1.0 / 68.0,
            "this_paper": 7.0 / 4.0,
        }
    raise ValueError("theorem is 1 or 2")


def weight_l2_ratio(weight: str, x: int) -> float:
    """Mean-square monitor for the n3 weights.

    unit and mobius are measured against X; the von Mangoldt weight against
    X log X, its Chebyshev-type mean square.  All should sit at C <= 2 for
    X >= 10^3.
    """
    if x < 2:
        raise ValueError("x >= 2 required")
    table = _weight_table(weight, x)[1:]
    total = float(np.sum(table * table))
    if weight == "vonMangoldt":
        return total / (x * math.log(x))
    return total / x


@dataclass(frozen=True)
class SumResult:
    """One evaluated sum, as emitted in CSV reports."""

    X: float
    k_or_theta: float
    source: str
    weight: str
    value: float
    trivial_ratio: float


CSV_COLUMNS = ("X", "k_or_theta", "source", "weight", "value", "trivial_ratio")


def results_csv(rows: Sequence[SumResult]) -> str:
    """Fixed-column CSV; float formatting is repr-stable for diffing."""
    out = [",".join(CSV_COLUMNS)]
    for r in rows:
        out.append(",".join([
            f"{r.X:.17g}", f"{r.k_or_theta:.17g}", r.source, r.weight,
            f"{r.value:.17g}", f"{r.trivial_ratio:.17g}",
        ]))
    return "\n".join(out) + "\n"


def run_report(config: Dict, rows: Sequence[SumResult]) -> Dict:
    """JSON-ready report: config echo, content-addressed run id, rows."""
    payload = {
        "config": config,
        "rows": [r.__dict__ for r in rows],
    }
    digest = hashlib.sha1(
        json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()
    payload["run_id"] = digest[:12]
    return payload

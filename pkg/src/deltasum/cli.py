"""Batch verification entry point.

Each subcommand runs one verification suite or experiment sweep and emits a
machine-readable report: JSON for assertion lists (stable key order, floats
round-tripped at 17 significant digits), CSV for bulk tables.  Identical run
configurations produce byte-identical CSV regardless of thread count.

Exit codes: 0 all assertions pass; 1 suite failure; 2 runtime cap exceeded;
3 unknown parameter; 4 type mismatch or invalid value; 5 missing required
parameter; 6 unreadable config file.

Every assertion row carries a stable anchor string naming the identity or
bound it checks, plus the observed value, the bound, and pass/fail.
"""

from __future__ import annotations

import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_TIME_CAP = 2
EXIT_UNKNOWN_PARAM = 3
EXIT_TYPE_MISMATCH = 4
EXIT_MISSING_PARAM = 5
EXIT_BAD_CONFIG = 6


class CliError(Exception):
    """Parse or validation failure carrying its exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # int | float | str | flag | intlist | floatlist
    default: object = None
    required: bool = False
    positive: bool = False


_COMMON = (
    Param("out", "str", default=""),
    Param("format", "str", default="json"),
    Param("threads", "int", default=0),
    Param("time-cap", "float", default=0.0),
)

SCHEMAS: Dict[str, Tuple[Param, ...]] = {
    "sieve": (Param("nmax", "int", default=5000, positive=True),) + _COMMON,
    "gauss": (
        Param("qmax", "int", default=999, positive=True),
        Param("per-q", "int", default=10, positive=True),
        Param("tol", "float", default=1e-6, positive=True),
    ) + _COMMON,
    "expsum": (
        Param("pmax", "int", default=2000, positive=True),
        Param("samples", "int", default=100, positive=True),
        Param("crt-count", "int", default=500, positive=True),
        Param("crt-qmax", "int", default=100000, positive=True),
        Param("tol", "float", default=1e-8, positive=True),
        Param("seed", "int", default=1),
    ) + _COMMON,
    "charsum": (
        Param("qmax", "int", default=499, positive=True),
        Param("freq-qmax", "int", default=60, positive=True),
        Param("corr-pmax", "int", default=300, positive=True),
        Param("draws", "int", default=50, positive=True),
        Param("tol", "float", default=1e-6, positive=True),
        Param("seed", "int", default=1),
    ) + _COMMON,
    "voronoi": (
        Param("q", "int", default=1, positive=True),
        Param("a", "int", default=1, positive=True),
        Param("X", "float", default=1000.0, positive=True),
        Param("budget", "float", default=1e-3, positive=True),
    ) + _COMMON,
    "delta": (
        Param("Q", "float", default=50.0, positive=True),
        Param("nmax", "int", default=1000, positive=True),
        Param("tol", "float", default=1e-9, positive=True),
    ) + _COMMON,
    "osc": (
        Param("ym", "floatlist", default=(1e3, 1e4, 1e5)),
        Param("slope-Q", "float", default=1000.0, positive=True),
        Param("quick", "flag", default=False),
    ) + _COMMON,
    "sum": (
        Param("X", "floatlist", default=(16.0, 64.0, 256.0)),
        Param("k", "int", default=3),
        Param("theta", "float", default=0.0),
        Param("source", "str", default="d3"),
        Param("weight", "str", default="unit"),
        Param("mode", "str", default="sharp"),
    ) + _COMMON,
    "fit": (
        Param("series", "str", required=True),
    ) + _COMMON,
    "verify-all": (
        Param("profile", "str", default="quick"),
    ) + _COMMON,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run: subcommand plus validated parameters."""

    subcommand: str
    params: Dict[str, object]

    def __getitem__(self, key: str) -> object:
        return self.params[key]


def _convert(param: Param, raw: object) -> object:
    try:
        if param.kind == "int":
            if isinstance(raw, bool) or isinstance(raw, float) and not float(raw).is_integer():
                raise ValueError
            val = int(raw)
        elif param.kind == "float":
            val = float(raw)
        elif param.kind == "str":
            val = str(raw)
        elif param.kind == "flag":
            if isinstance(raw, bool):
                val = raw
            elif str(raw).lower() in ("1", "true", "yes"):
                val = True
            elif str(raw).lower() in ("0", "false", "no"):
                val = False
            else:
                raise ValueError
        elif param.kind == "intlist":
            items = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
            val = tuple(int(x) for x in items)
            if not val:
                raise ValueError
        elif param.kind == "floatlist":
            items = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
            val = tuple(float(x) for x in items)
            if not val:
                raise ValueError
        else:  # pragma: no cover - schema bug
            raise ValueError(f"bad schema kind {param.kind}")
    except (TypeError, ValueError):
        raise CliError(EXIT_TYPE_MISMATCH,
                       f"--{param.name}: cannot read {raw!r} as {param.kind}")
    if param.positive:
        bad = (val <= 0) if param.kind in ("int", "float") else False
        if bad:
            raise CliError(EXIT_TYPE_MISMATCH, f"--{param.name} must be positive")
    return val


def parse(argv: Sequence[str]) -> RunConfig:
    """Resolve argv (and an optional --config JSON file) into a RunConfig.

    Flags override config-file values.  A leading `verify` token is
    accepted and skipped, so `verify gauss --qmax 999` names the gauss suite.
    """
    args = list(argv)
    if args and args[0] == "verify":
        args = args[1:]
    if not args:
        raise CliError(EXIT_MISSING_PARAM,
                       f"missing subcommand; one of {sorted(SCHEMAS)}")
    sub = args[0]
    if sub not in SCHEMAS:
        raise CliError(EXIT_UNKNOWN_PARAM,
                       f"unknown subcommand {sub!r}; one of {sorted(SCHEMAS)}")
    schema = {p.name: p for p in SCHEMAS[sub]}

    flat: Dict[str, str] = {}
    config_path: Optional[str] = None
    i = 1
    while i < len(args):
        tok = args[i]
        if not tok.startswith("--"):
            raise CliError(EXIT_UNKNOWN_PARAM, f"unexpected token {tok!r}")
        name = tok[2:]
        if "=" in name:
            name, _, value = name.partition("=")
        else:
            if name in schema and schema[name].kind == "flag":
                value = "true"
            else:
                i += 1
                if i >= len(args):
                    raise CliError(EXIT_TYPE_MISMATCH, f"--{name} needs a value")
                value = args[i]
        if name == "config":
            config_path = value
        else:
            if name not in schema:
                raise CliError(EXIT_UNKNOWN_PARAM, f"unknown flag --{name}")
            flat[name] = value
        i += 1

    resolved: Dict[str, object] = {p.name: p.default for p in SCHEMAS[sub]}
    if config_path is not None:
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_BAD_CONFIG, f"cannot read config file: {exc}")
        if not isinstance(loaded, dict):
            raise CliError(EXIT_BAD_CONFIG, "config file must hold a JSON object")
        for key, value in loaded.items():
            if key == "subcommand":
                continue
            if key not in schema:
                raise CliError(EXIT_UNKNOWN_PARAM, f"unknown config key {key!r}")
            resolved[key] = _convert(schema[key], value)
    for key, value in flat.items():
        resolved[key] = _convert(schema[key], value)
    for p in SCHEMAS[sub]:
        if p.required and resolved.get(p.name) is None:
            raise CliError(EXIT_MISSING_PARAM, f"--{p.name} is required")
    return RunConfig(subcommand=sub, params=resolved)


# ---------------------------------------------------------------------------
# assertion plumbing


@dataclass(frozen=True)
class Assertion:
    """One checked fact: anchor id, observed value, bound, and the verdict."""

    anchor: str
    observed: float
    bound: float
    relation: str  # "<=", ">=", "=="
    passed: bool
    note: str = ""


def check(anchor: str, observed: float, relation: str, bound: float,
          note: str = "") -> Assertion:
    ok = {"<=": observed <= bound,
          ">=": observed >= bound,
          "==": observed == bound}[relation]
    return Assertion(anchor=anchor, observed=float(observed), bound=float(bound),
                     relation=relation, passed=bool(ok), note=note)


def _round17(obj):
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    return obj


def report_json(report: Dict) -> str:
    return json.dumps(_round17(report), sort_keys=True, indent=1) + "\n"


# ---------------------------------------------------------------------------
# suites


def suite_sieve(nmax: int = 5000) -> List[Assertion]:
    """Multiplicative-table identities on an exact integer sieve."""
    from .arith import mult_tables

    t = mult_tables(nmax)
    n = np.arange(1, nmax + 1)
    conv_d = np.zeros(nmax + 1, dtype=np.int64)
    conv_phi = np.zeros(nmax + 1, dtype=np.int64)
    conv_mu = np.zeros(nmax + 1, dtype=np.int64)
    conv_lam = np.zeros(nmax + 1)
    for d in range(1, nmax + 1):
        mult = np.arange(d, nmax + 1, d)
        conv_d[mult] += t.d[d]
        conv_phi[mult] += t.phi[d]
        conv_mu[mult] += t.mu[d]
        conv_lam[mult] += t.mangoldt[d]
    out = [
        check("sieve.d3.dirichlet_cube", float(np.max(np.abs(conv_d[n] - t.d3[n]))),
              "<=", 0.0, "sum_{d|n} d(d) = d3(n)"),
        check("sieve.phi.divisor_sum", float(np.max(np.abs(conv_phi[n] - n))),
              "<=", 0.0, "sum_{d|n} phi(d) = n"),
        check("sieve.mu.unit_mass", float(np.max(np.abs(conv_mu[2:]))),
              "<=", 0.0, "sum_{d|n} mu(d) = [n=1]"),
        check("sieve.mangoldt.log", float(np.max(np.abs(conv_lam[n] - np.log(n)))),
              "<=", 1e-9, "sum_{d|n} Lambda(d) = log n"),
    ]
    from .arith import d3_of
    spot = max(abs(d3_of(int(m)) - int(t.d3[m]))
               for m in (1, 2, 16, 360, nmax) if m <= nmax)
    out.append(check("sieve.d3.factorized_spot", float(spot), "<=", 0.0,
                     "sieved d3 equals per-term factorization"))
    return out


def suite_gauss(qmax: int = 999, per_q: int = 10, tol: float = 1e-6) -> List[Assertion]:
    """Quadratic Gauss sums: direct evaluation against the closed form."""
    from .arith import primes_up_to
    from .expsum import quad_gauss

    worst = 0.0
    count = 0
    for q in range(3, qmax + 1, 2):
        units = [a for a in range(1, q) if math.gcd(a, q) == 1]
        stride = max(1, len(units) // per_q)
        for a in units[::stride][:per_q]:
            d = quad_gauss(a, q, mode="direct")
            c = quad_gauss(a, q, mode="closed")
            worst = max(worst, abs(d.value - c.value))
            count += 1
    # wall time stays out of the anchor table: identical configs must give
    # byte-identical CSV, and the JSON report already carries elapsed_s
    return [
        check("gauss.closed_form.odd_q", worst, "<=", tol,
              f"{count} (a, q) pairs, odd q <= {qmax}"),
    ]


def suite_expsum(pmax: int = 2000, samples: int = 100, crt_count: int = 500,
                 crt_qmax: int = 100000, tol: float = 1e-8,
                 seed: int = 1) -> List[Assertion]:
    """Kloosterman sums: Weil bound and CRT factorization against direct."""
    from .arith import factorize, primes_up_to
    from .expsum import kloosterman

    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    for p in primes_up_to(pmax - 1):
        if p < 3:
            continue
        for _ in range(samples if p > 50 else min(samples, (p - 1) ** 2)):
            a = int(rng.integers(1, p))
            b = int(rng.integers(1, p))
            s = kloosterman(a, b, p, mode="direct")
            worst_ratio = max(worst_ratio, abs(s.value) / (2.0 * math.sqrt(p)))
    out = [check("kloosterman.weil.prime", worst_ratio, "<=", 1.0,
                 f"primes p < {pmax}, {samples} samples each")]

    worst = 0.0
    tested = 0
    while tested < crt_count:
        q = int(rng.integers(12, crt_qmax))
        fac = factorize(q)
        if len(fac) < 2:
            continue
        a = int(rng.integers(1, q))
        b = int(rng.integers(1, q))
        d = kloosterman(a, b, q, mode="direct")
        c = kloosterman(a, b, q, mode="crt")
        worst = max(worst, abs(d.value - c.value))
        tested += 1
    out.append(check("kloosterman.crt.composite", worst, "<=", tol,
                     f"{crt_count} composite q <= {crt_qmax}"))
    return out


def suite_charsum(qmax: int = 499, freq_qmax: int = 60, corr_pmax: int = 300,
                  draws: int = 50, tol: float = 1e-6,
                  seed: int = 1) -> List[Assertion]:
    """Complete character sums: closed forms, zero frequency, correlation."""
    from .arith import primes_up_to
    from .charsum import (CorrelationParams, FreqSumInput, frakC, frak_S,
                          kloosterman_correlation, zero_freq_oracle)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for q in range(3, qmax + 1, 2):
        for _ in range(2):
            a = int(rng.integers(1, q))
            if math.gcd(a, q) != 1:
                continue
            m1 = int(rng.integers(0, q))
            m2 = int(rng.integers(0, q))
            d = frakC(m1, m2, a, q, mode="direct")
            c = frakC(m1, m2, a, q, mode="closed")
            worst = max(worst, abs(d.value - c.value))
    out = [check("charsum.gauss_product.closed", worst, "<=", tol,
                 f"odd q <= {qmax}")]

    worst_rel = 0.0
    worst_bound = 0.0
    for q in range(3, freq_qmax + 1, 2):
        for k in (3, 4):
            n3 = int(rng.integers(1, 6))
            n3p = int(rng.integers(1, 6))
            inp = FreqSumInput(q=q, n=1, m1=int(rng.integers(0, q)),
                               m2=int(rng.integers(0, q)), n3=n3, n3p=n3p, k=k, m=0)
            got = frak_S(inp).value
            want = zero_freq_oracle(inp).value
            scale = max(abs(want), 1.0)
            worst_rel = max(worst_rel, abs(got - want) / scale)
            if (n3p ** k - n3 ** k) % q == 0:
                worst_bound = max(worst_bound, abs(got) / q ** 4)
    out.append(check("charsum.zero_freq.oracle", worst_rel, "<=", 1e-4,
                     f"odd q <= {freq_qmax}, k in {{3, 4}}"))
    out.append(check("charsum.zero_freq.q4_bound", worst_bound, "<=", 1.0,
                     "|S_0| <= q^4 on congruent twists"))

    worst_corr = 0.0
    for p in primes_up_to(corr_pmax):
        if p <= 20:
            continue
        for _ in range(draws):
            cs = [int(rng.integers(1, p)) for _ in range(5)]
            params = CorrelationParams(p=p, c1=cs[0], c2=cs[1], c3=cs[2],
                                       c4=cs[3], c5=cs[4])
            val = kloosterman_correlation(p, params)
            worst_corr = max(worst_corr, abs(val.value) / p ** 1.5)
    out.append(check("charsum.correlation.p32", worst_corr, "<=", 10.0,
                     f"{draws} draws per prime, 20 < p <= {corr_pmax}"))
    return out


def suite_delta(Q: float = 50.0, nmax: int = 1000, tol: float = 1e-9) -> List[Assertion]:
    """Additive-character delta expansion: exactness and plateau shape."""
    from .analytic.delta import delta_eval, dfi_delta

    exp = dfi_delta(Q)
    at0 = abs(delta_eval(exp, 0) - 1.0)
    worst = max(abs(delta_eval(exp, n)) for n in range(1, nmax + 1))
    worst = max(worst, max(abs(delta_eval(exp, -n)) for n in (1, 7, nmax)))
    out = [
        check("delta.normalized.at_zero", at0, "<=", tol),
        check("delta.telescoping.nonzero", worst, "<=", tol,
              f"1 <= |n| <= {nmax} at Q = {Q:g}"),
        check("delta.weight.unit_mass", abs(exp.weight_sum() - 1.0), "<=", 1e-12),
    ]
    q = max(2, int(Q) // 2)
    u = np.linspace(-0.5 * q * Q, 0.5 * q * Q, 64)
    flat = float(np.max(np.abs(exp.kernel(q, u) - exp.plateau_constant(q))))
    out.append(check("delta.kernel.plateau", flat, "<=", 1e-12,
                     "Delta_q constant on |u| < q Q"))
    return out


def suite_osc(ym: Sequence[float] = (1e3, 1e4, 1e5), slope_Q: float = 1000.0,
              quick: bool = False) -> List[Assertion]:
    """Oscillatory kernels and composite integrals: the bound-shape checks."""
    from .analytic.bump import canonical_bump
    from .analytic.kernels import g0_asymptotic, g_ell
    from .analytic.mellin import log_moment
    from .analytic.oscint import (OscIntegralSpec, composite_lemma_ratio,
                                  osc_composite, osc_poisson_kernel,
                                  osc_voronoi_kernel, stationary_p,
                                  stationary_p_ratio, voronoi_kernel_trivial,
                                  _delta_for)

    out: List[Assertion] = []
    X = 1.0e4
    bench = OscIntegralSpec(X=X, Q=math.sqrt(X), q=20, u=0.5)
    half = OscIntegralSpec(X=X, Q=math.sqrt(X), q=20, m=bench.K / 2.0, u=0.5)
    r1 = osc_voronoi_kernel(half, variant="I")
    r2 = osc_voronoi_kernel(half, variant="I", rel_tol=1e-6)
    out.append(check("osc.kernel.two_scheme", abs(r1.value - r2.value), "<=",
                     1e-6, "benchmark X=1e4, q=20, u=0.5, n2m=K/2"))
    out.append(check("osc.kernel.trivial_bound",
                     abs(r1.value) / voronoi_kernel_trivial(half), "<=", 1.0))
    faint = OscIntegralSpec(X=X, Q=math.sqrt(X), q=5,
                            m=100.0 * OscIntegralSpec(X=X, Q=math.sqrt(X), q=5, u=0.5).K,
                            u=0.5)
    out.append(check("osc.kernel.negligible_past_cut",
                     abs(osc_voronoi_kernel(faint).value) / voronoi_kernel_trivial(faint),
                     "<=", 1e-6, "n2m = 100 K at q = 5"))

    j0 = osc_poisson_kernel(OscIntegralSpec(X=X, Q=math.sqrt(X), q=20, u=0.0))
    intw = log_moment(canonical_bump(1.0, 2.0), 0).value.real
    out.append(check("osc.poisson.zero_freq", abs(j0.value - intw * intw), "<=",
                     1e-9, "J(0,0,0) = (int W1)(int W2)"))
    jd = osc_poisson_kernel(OscIntegralSpec(
        X=X, Q=math.sqrt(X), q=20, m1=10.5 * 20 / math.sqrt(X), u=0.0))
    out.append(check("osc.poisson.m1_decay", abs(jd.value) / abs(j0.value),
                     "<=", 1e-3, "m1 = 10.5 q / sqrt(X)"))

    g = canonical_bump(1.0, 2.0)
    mass_hi = g.support[1]
    for y_m in (ym[:1] if quick else ym):
        y = y_m / mass_hi
        exact = g_ell(y, 0, g).value
        approx = g0_asymptotic(y, g)
        rel = abs(exact - approx) / max(abs(exact), 1e-300)
        out.append(check(f"osc.kernel.asymptotic_ym{int(y_m):d}", rel, "<=",
                         5.0 * y_m ** (-1.0 / 3.0)))

    if not quick:
        delta = _delta_for(slope_Q)
        Xb = slope_Q * slope_Q
        qs = [8, 32, 128, 512, 1000]
        sups = []
        for q in qs:
            best = 0.0
            for n3 in (60, 80):
                spec = OscIntegralSpec(X=Xb, Q=slope_Q, q=q, m=1.0e3, n3=n3,
                                       k=3, m1=1.0, m2=1.0)
                r = osc_composite(spec, "L", delta=delta)
                best = max(best, abs(r.value))
                out.append(check(f"osc.composite.lemma_ratio_q{q}_n{n3}",
                                 composite_lemma_ratio(spec, r.value, "L"),
                                 "<=", 10.0))
            sups.append(best)
        slope = float(np.polyfit(np.log(qs), np.log(sups), 1)[0])
        out.append(check("osc.composite.dyadic_slope", slope, ">=", 1.3,
                         f"dyadic q in [Q^0.3, Q] at Q = {slope_Q:g}"))
        spec0 = OscIntegralSpec(X=Xb, Q=slope_Q, q=50, m=0.0, n3=60, k=3,
                                m1=1.0, m2=1.0, u=1.0)
        z0 = osc_composite(spec0, "Z", delta=delta)
        m_cut = 100.0 * spec0.Mcut
        zm = osc_composite(OscIntegralSpec(X=Xb, Q=slope_Q, q=50, m=m_cut,
                                           n3=60, k=3, m1=1.0, m2=1.0, u=1.0),
                           "Z", delta=delta)
        out.append(check("osc.correlation.suppression",
                         abs(zm.value) / abs(z0.value), "<=", 1e-6,
                         f"m = 100 M = {m_cut:g} at q = 50"))

    worst_p = 0.0
    for q in (5, 20, 80):
        for nm in (10.0, 100.0, 1000.0):
            s = OscIntegralSpec(X=X, Q=100.0, q=q, m=nm, m1=1.0, n3=2, k=3)
            worst_p = max(worst_p, stationary_p_ratio(s, stationary_p(s).value))
    out.append(check("osc.stationary.sqrtq_ratio", worst_p, "<=", 10.0,
                     "9-point benchmark grid"))
    return out


def suite_voronoi(pairs: Sequence[Tuple[int, int]] = ((1, 1),),
                  X: float = 1000.0, budget: float = 1e-3,
                  calibrate: bool = False) -> Tuple[List[Assertion], Dict]:
    """Dual-sum identity at the requested moduli, with per-term breakdown."""
    from .analytic.bump import canonical_bump
    from .analytic.voronoi import main_scale_calibration, voronoi_d3_check
    from .expsum import kloosterman_row, ramanujan_sum
    from .arith import divisors, inv_mod

    out: List[Assertion] = []
    details: Dict[str, object] = {}
    h = canonical_bump(X, 2.0 * X)
    for q, a in pairs:
        rep = voronoi_d3_check(a, q, h, rel_budget=budget)
        out.append(check(f"voronoi.identity.q{q}a{a}", rep.rel_discrepancy,
                         "<=", budget, f"n2 <= {rep.n2_used}"))
        details[f"q{q}a{a}"] = {
            "lhs": [rep.lhs.real, rep.lhs.imag],
            "rhs": [rep.rhs.real, rep.rhs.imag],
            "dual": [rep.dual_total.real, rep.dual_total.imag],
            "main_terms": dict(rep.main_terms),
            "main_scale": rep.main_scale,
            "tail_estimate": rep.tail_estimate,
            "kernel_error": rep.kernel_error,
        }
    if calibrate:
        cal = main_scale_calibration(h)
        out.append(check("voronoi.main_scale.identity_route",
                         abs(cal["identity_ratio"] - 2.0), "<=", 1e-6))
        details["main_scale_calibration"] = cal
    q4 = 4
    abar = inv_mod(1, q4)
    worst = max(abs(float(kloosterman_row(abar, q4 // n1)[0].real)
                    - float(ramanujan_sum(abar, q4 // n1)))
                for n1 in divisors(q4))
    out.append(check("voronoi.s_ab0.ramanujan_crosscheck", worst, "<=", 1e-9,
                     "S(abar, 0; c) = c_c(abar) at q = 4"))
    return out, details


def suite_sum(X_grid: Sequence[float] = (16.0, 64.0, 256.0),
              quick: bool = True, threads: Optional[int] = None
              ) -> Tuple[List[Assertion], Dict]:
    """Triple-sum oracle equality, exponent fits, L2 monitors."""
    from .coeffs import Sym2Source, TripleDivisorSource, l2_ratio
    from .expsum import QuadraticForm
    from .sums import (SumResult, WindowConfig, eval_S_quad, eval_Sk,
                       eval_sk_enumeration, exponent_fit, results_csv,
                       theorem_exponents, trivial_ratio, weight_l2_ratio)

    out: List[Assertion] = []
    d3src = TripleDivisorSource()
    rows: List[SumResult] = []
    worst = 0.0
    for X in X_grid:
        for k in ((3,) if quick and X > 64 else (3, 4, 5)):
            cfg = WindowConfig(X=float(X), k=k, mode="sharp")
            v = eval_Sk(cfg, d3src, "unit", threads=threads)
            o = eval_sk_enumeration(cfg, d3src, "unit")
            worst = max(worst, abs(v - o))
            rows.append(SumResult(X=float(X), k_or_theta=float(k), source="d3",
                                  weight="unit", value=v,
                                  trivial_ratio=trivial_ratio(cfg, v)))
    out.append(check("sum.oracle.exact_equality", worst, "<=", 0.0,
                     f"X in {tuple(int(x) for x in X_grid)}"))

    e_hi = 8 if quick else 10
    form = QuadraticForm(1, 1, 0)
    src2 = Sym2Source(2 * (2 * 2 ** e_hi) ** 2)
    series = []
    for e in range(6, e_hi + 1):
        Xq = float(2 ** e)
        vq = eval_S_quad(WindowConfig(X=Xq, theta=1.0, mode="smooth"), form,
                         src2, threads=threads)
        series.append((Xq, vq))
        rows.append(SumResult(X=Xq, k_or_theta=1.0, source="sym2", weight="unit",
                              value=vq, trivial_ratio=abs(vq) / Xq ** 2))
    fit = exponent_fit(series)
    out.append(check("sum.sym2.fitted_exponent", fit.slope, "<=", 1.95,
                     f"X in 2^6..2^{e_hi}, theta = 1"))

    lx = 1000 if quick else 100000
    out.append(check("sum.sym2.l2_ratio", l2_ratio(lx, src2), "<=", 10.0,
                     f"X = {lx}"))
    out.append(check("sum.sym2.lambda12_exact",
                     abs(src2.coeff(1, 2) - (-0.71875)), "<=", 0.0))
    for w in ("unit", "mobius", "vonMangoldt"):
        out.append(check(f"sum.weight_l2.{w}", weight_l2_ratio(w, lx), "<=", 2.0))

    t1 = theorem_exponents(3, 1)
    out.append(check("sum.exponents.k3_total",
                     abs(t1["this_paper"] - (7.0 / 8.0 + 1.0 / 3.0)), "<=", 0.0))
    t2 = theorem_exponents(3, 2)
    out.append(check("sum.exponents.thm2_prior",
                     abs(t2["prior"] - (2.0 - 1.0 / 68.0)), "<=", 0.0))
    return out, {"csv": results_csv(rows), "exponents": {"thm1_k3": t1, "thm2": t2}}


def suite_fit() -> List[Assertion]:
    """Exponent-fit plumbing on closed-form series."""
    from .sums import exponent_fit

    f2 = exponent_fit([(10.0 ** e, (10.0 ** e) ** 2) for e in range(1, 5)])
    fc = exponent_fit([(10.0 ** e, 5.0) for e in range(1, 4)])
    return [
        check("fit.power.slope_two", abs(f2.slope - 2.0), "<=", 1e-12),
        check("fit.constant.slope_zero", abs(fc.slope), "<=", 1e-12),
    ]


# ---------------------------------------------------------------------------
# dispatch


def _suite_rows(cfg: RunConfig) -> Tuple[List[Assertion], Dict]:
    sub = cfg.subcommand
    p = cfg.params
    details: Dict = {}
    if sub == "sieve":
        return suite_sieve(int(p["nmax"])), details
    if sub == "gauss":
        return suite_gauss(int(p["qmax"]), int(p["per-q"]), float(p["tol"])), details
    if sub == "expsum":
        return suite_expsum(int(p["pmax"]), int(p["samples"]), int(p["crt-count"]),
                            int(p["crt-qmax"]), float(p["tol"]), int(p["seed"])), details
    if sub == "charsum":
        return suite_charsum(int(p["qmax"]), int(p["freq-qmax"]),
                             int(p["corr-pmax"]), int(p["draws"]),
                             float(p["tol"]), int(p["seed"])), details
    if sub == "voronoi":
        return suite_voronoi(((int(p["q"]), int(p["a"])),), float(p["X"]),
                             float(p["budget"]))
    if sub == "delta":
        return suite_delta(float(p["Q"]), int(p["nmax"]), float(p["tol"])), details
    if sub == "osc":
        return suite_osc(tuple(p["ym"]), float(p["slope-Q"]), bool(p["quick"])), details
    if sub == "sum":
        theta = float(p["theta"]) if float(p["theta"]) > 0 else None
        return _run_sum_command(tuple(p["X"]), int(p["k"]), theta,
                                str(p["source"]), str(p["weight"]),
                                str(p["mode"]), int(p["threads"]) or None)
    if sub == "fit":
        return _run_fit_command(str(p["series"]))
    raise CliError(EXIT_UNKNOWN_PARAM, f"unknown subcommand {sub!r}")


def _run_sum_command(X_grid: Sequence[float], k: int, theta: Optional[float],
                     source: str, weight: str, mode: str,
                     threads: Optional[int]) -> Tuple[List[Assertion], Dict]:
    from .coeffs import Sym2Source, TripleDivisorSource
    from .expsum import QuadraticForm
    from .sums import (SumResult, WindowConfig, eval_S_quad, eval_Sk,
                       results_csv, trivial_ratio)

    rows: List[SumResult] = []
    out: List[Assertion] = []
    for X in X_grid:
        cfg = WindowConfig(X=float(X), k=k, theta=theta, mode=mode)
        if source == "d3":
            src = TripleDivisorSource()
        elif source == "sym2":
            if theta is not None:
                src = Sym2Source(int(2 * (2 * X) ** 2) + 1)
            else:
                src = Sym2Source(int(16 * X) + 1)
        else:
            raise CliError(EXIT_TYPE_MISMATCH, f"unknown source {source!r}")
        if theta is not None:
            v = eval_S_quad(cfg, QuadraticForm(1, 1, 0), src, threads=threads)
        else:
            v = eval_Sk(cfg, src, weight, threads=threads)
        tr = trivial_ratio(cfg, v)
        rows.append(SumResult(X=float(X), k_or_theta=float(theta if theta is not None else k),
                              source=source, weight=weight, value=v, trivial_ratio=tr))
        out.append(check(f"sum.eval.X{int(X)}", tr, "<=", math.inf,
                         "reported, not bounded"))
    return out, {"csv": results_csv(rows)}


def _run_fit_command(path: str) -> Tuple[List[Assertion], Dict]:
    import csv as _csv

    from .sums import exponent_fit

    series: List[Tuple[float, float]] = []
    try:
        with open(path, newline="") as fh:
            for row in _csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    series.append((float(row[0]), float(row[1])))
                except ValueError:
                    continue  # header line
    except OSError as exc:
        raise CliError(EXIT_BAD_CONFIG, f"cannot read series file: {exc}")
    try:
        fit = exponent_fit(series)
    except ValueError as exc:
        raise CliError(EXIT_BAD_CONFIG, f"unusable series file: {exc}")
    rows = [check("fit.series.slope_finite", abs(fit.slope), "<=", math.inf,
                  f"slope {fit.slope:.6g} +- {fit.stderr:.3g}")]
    return rows, {"slope": fit.slope, "stderr": fit.stderr,
                  "points": len(fit.points)}


_VERIFY_ORDER = ("sieve", "fit", "gauss", "expsum", "charsum", "delta", "osc",
                 "voronoi", "sum")


def run_verify_all(profile: str = "quick", time_cap: float = 0.0
                   ) -> Tuple[List[Assertion], Dict, bool]:
    """The full assertion sweep; quick scales ranges for a one-minute run."""
    if profile not in ("quick", "full"):
        raise CliError(EXIT_TYPE_MISMATCH, "profile is quick or full")
    quick = profile == "quick"
    cap = time_cap if time_cap > 0 else (60.0 if quick else 3600.0)
    t0 = time.time()
    rows: List[Assertion] = []
    details: Dict = {"profile": profile}
    capped = False

    def over() -> bool:
        return time.time() - t0 > cap

    for name in _VERIFY_ORDER:
        if over():
            capped = True
            break
        if name == "sieve":
            rows += suite_sieve(2000 if quick else 5000)
        elif name == "fit":
            rows += suite_fit()
        elif name == "gauss":
            rows += suite_gauss(999, 10)  # 0.5 s; full range fits both profiles
        elif name == "expsum":
            rows += suite_expsum(200 if quick else 2000, 20 if quick else 100,
                                 50 if quick else 500, 10000 if quick else 100000)
        elif name == "charsum":
            rows += suite_charsum(99 if quick else 499, 20 if quick else 60,
                                  100 if quick else 300, 10 if quick else 50)
        elif name == "delta":
            rows += suite_delta(50.0, 200 if quick else 1000)
        elif name == "osc":
            rows += suite_osc(quick=quick)
        elif name == "voronoi":
            pairs = ((1, 1),) if quick else ((1, 1), (3, 1), (4, 1), (5, 2))
            vr, vd = suite_voronoi(pairs, calibrate=not quick)
            rows += vr
            details["voronoi"] = vd
        elif name == "sum":
            sr, sd = suite_sum(quick=quick)
            rows += sr
            details["sum"] = sd
    details["elapsed_s"] = time.time() - t0
    details["cap_s"] = cap
    return rows, details, capped


def run(cfg: RunConfig) -> Tuple[int, Dict]:
    """Execute one RunConfig; returns (exit code, report dict)."""
    if int(cfg.params.get("threads", 0) or 0) > 0:
        os.environ["DELTASUM_THREADS"] = str(int(cfg.params["threads"]))
    t0 = time.time()
    capped = False
    if cfg.subcommand == "verify-all":
        rows, details, capped = run_verify_all(str(cfg["profile"]),
                                               float(cfg.params.get("time-cap", 0.0)))
    else:
        rows, details = _suite_rows(cfg)
        cap = float(cfg.params.get("time-cap", 0.0))
        if cap > 0 and time.time() - t0 > cap:
            capped = True
    report = {
        "subcommand": cfg.subcommand,
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in cfg.params.items()},
        "assertions": [r.__dict__ for r in rows],
        "passed": sum(1 for r in rows if r.passed),
        "failed": sum(1 for r in rows if not r.passed),
        "details": details,
        "elapsed_s": time.time() - t0,
    }
    if capped:
        return EXIT_TIME_CAP, report
    if any(not r.passed for r in rows):
        return EXIT_SUITE_FAILURE, report
    return EXIT_OK, report


def _emit(cfg: RunConfig, report: Dict) -> None:
    fmt = str(cfg.params.get("format", "json"))
    out_path = str(cfg.params.get("out", "") or "")
    if fmt == "csv":
        csv_text = report.get("details", {}).get("csv")
        if csv_text is None:
            lines = ["anchor,observed,relation,bound,passed,note"]
            for a in report["assertions"]:
                lines.append(",".join([
                    a["anchor"], f"{a['observed']:.17g}", a["relation"],
                    f"{a['bound']:.17g}", str(a["passed"]).lower(),
                    '"%s"' % a["note"].replace('"', "'"),
                ]))
            csv_text = "\n".join(lines) + "\n"
        text = csv_text
    else:
        text = report_json(report)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse(args)
        code, report = run(cfg)
        _emit(cfg, report)
        return code
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

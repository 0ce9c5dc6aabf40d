"""deltasum: numerical toolkit for delta-method exponential-sum experiments.

Layers, bottom up:

- arith: exact integer base (sieves, factorization, Jacobi symbols).
- expsum: complete exponential sums (Gauss, Kloosterman, Ramanujan) with
  closed forms checked against direct evaluation.
- coeffs: GL(3) coefficient sources (triple divisor, symmetric-square lift).
- charsum: complete character sums attached to two-square counting and
  their independent oracles.
- analytic: bump functions, oscillatory quadrature, Mellin transforms,
  Voronoi kernels, the delta expansion, and composite-integral pipelines.
- sums: desk-scale evaluation of the headline sums and exponent fits.
- cli: batch verification suites behind the `deltasum` entry point.
"""

from .arith import (MultTables, divisors, eps_q, factorize, inv_mod, is_prime,
                    jacobi, mult_tables, primes_up_to)
from .coeffs import (Sym2Source, TripleDivisorSource, UserTableSource,
                     l2_ratio, sigma00, tau_exact, tau_table)
from .expsum import (ComplexValue, QuadraticForm, form_gauss, kloosterman,
                     kloosterman_row, quad_gauss, ramanujan_sum)
from .charsum import (CorrelationParams, FreqSumInput, frakC, frak_S,
                      kloosterman_correlation, nonzero_bound_ratio,
                      zero_freq_oracle)
from .sums import (ExponentFit, SumResult, WindowConfig, eval_S_quad, eval_Sk,
                   eval_sk_enumeration, exponent_fit, results_csv, run_report,
                   subtract_main_term, theorem_exponents, trivial_ratio,
                   weight_l2_ratio, zhou_hu_delta)

__version__ = "0.1.0"

__all__ = [
    "ComplexValue",
    "CorrelationParams",
    "ExponentFit",
    "FreqSumInput",
    "MultTables",
    "QuadraticForm",
    "SumResult",
    "Sym2Source",
    "TripleDivisorSource",
    "UserTableSource",
    "WindowConfig",
    "divisors",
    "eps_q",
    "eval_S_quad",
    "eval_Sk",
    "eval_sk_enumeration",
    "exponent_fit",
    "factorize",
    "form_gauss",
    "frakC",
    "frak_S",
    "inv_mod",
    "is_prime",
    "jacobi",
    "kloosterman",
    "kloosterman_correlation",
    "kloosterman_row",
    "l2_ratio",
    "mult_tables",
    "nonzero_bound_ratio",
    "primes_up_to",
    "quad_gauss",
    "ramanujan_sum",
    "results_csv",
    "run_report",
    "sigma00",
    "subtract_main_term",
    "tau_exact",
    "tau_table",
    "theorem_exponents",
    "trivial_ratio",
    "weight_l2_ratio",
    "zero_freq_oracle",
    "zhou_hu_delta",
    "__version__",
]

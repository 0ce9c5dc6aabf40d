"""The two real constants entering the divisor main terms.

Both are stored as double literals and re-derived at test time from
Euler-Maclaurin tail-corrected partial sums, which converge fast enough that
the correction terms certify far more digits than a double holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Constants:
    """gamma = lim(H_N - log N); gamma1 = lim(sum log k / k - log^2 N / 2)."""

    euler_gamma: float = 0.5772156649015329
    stieltjes_gamma1: float = -0.07281584548367672


def euler_gamma_series(n: int = 10_000) -> float:
    """Harmonic partial sum with Euler-Maclaurin corrections through N^-6."""
    k = np.arange(1, n + 1, dtype=np.float64)
    h = math.fsum(1.0 / k)
    return (h - math.log(n) - 1.0 / (2 * n) + 1.0 / (12 * n**2)
            - 1.0 / (120 * n**4) + 1.0 / (252 * n**6))


def stieltjes_gamma1_series(n: int = 100_000) -> float:
    """Partial sums of log k / k, corrected with f(N)/2 + f'(N)/12 - f'''(N)/720."""
    k = np.arange(1, n + 1, dtype=np.float64)
    s = math.fsum(np.log(k) / k)
    ln = math.log(n)
    f_n = ln / n
    fp_n = (1.0 - ln) / n**2
    fppp_n = (11.0 - 6.0 * ln) / n**4
    return s - ln**2 / 2 - f_n / 2 - fp_n / 12 + fppp_n / 720

"""Complete character sums behind the two-squares setup.

Three stages, mirroring how the sums appear after Poisson summation:
the quadratic sum over shifted squares collapses to a Gauss-type closed
form, the zero frequency of the opened square reduces by orthogonality,
and the Kloosterman correlation exhibits square-root cancellation.
"""

import numpy as np

from deltasum.arith import primes_up_to
from deltasum.charsum import (CorrelationParams, FreqSumInput, frakC, frak_S,
                              kloosterman_correlation, zero_freq_main_term,
                              zero_freq_oracle)

print("Two-square character sum: closed form for odd q")
print(f"{'q':>4} {'(m1,m2)':>9} {'|direct|':>10} {'|closed|':>10} {'diff':>9}")
for q in (9, 25, 49, 121):
    for m1, m2 in ((0, 0), (1, 3)):
        d = frakC(m1, m2, 2, q, mode="direct").value
        c = frakC(m1, m2, 2, q, mode="closed").value
        print(f"{q:>4} {str((m1, m2)):>9} {abs(d):>10.4f} {abs(c):>10.4f}"
              f" {abs(d - c):>9.2e}")
print("(|frakC| = q exactly: two quadratic Gauss sums of modulus sqrt(q) each)")

print()
print("Zero-frequency sum vs its orthogonality reduction (k = 3, twists 1, 2)")
print(f"{'q':>4} {'frak_S':>14} {'reduction':>14} {'diag shorthand':>15}")
for q in (3, 7, 15, 27):
    inp = FreqSumInput(q=q, n=1, m1=0, m2=0, n3=1, n3p=2, k=3, m=0)
    s = frak_S(inp).value.real
    o = zero_freq_oracle(inp).value.real
    short = zero_freq_main_term(inp)
    print(f"{q:>4} {s:>14.4f} {o:>14.4f} {short:>15}")
print("(the executed j-sum is exact; the diagonal-only shorthand q^3 c_q"
      " only matches in order)")

print()
print("Kloosterman correlation: sum over beta of S S-bar stays near p^(3/2)")
rng = np.random.default_rng(7)
print(f"{'p':>5} {'max |sum|/p^1.5 over 30 draws':>32}")
for p in primes_up_to(200):
    if p <= 60:
        continue
    worst = 0.0
    for _ in range(30):
        c = [int(x) for x in rng.integers(1, p, size=5)]
        v = kloosterman_correlation(p, CorrelationParams(p, *c))
        worst = max(worst, abs(v.value) / p ** 1.5)
    print(f"{p:>5} {worst:>32.4f}")
print("(trivial size would be p^2: the ratio would grow like sqrt(p))")

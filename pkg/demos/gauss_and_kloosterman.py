"""Exponential sums: closed forms, the Weil bound, and CRT factorization.

Run:  python3 demos/gauss_and_kloosterman.py
"""

import math

import numpy as np

from deltasum.arith import factorize, primes_up_to
from deltasum.expsum import QuadraticForm, form_gauss, kloosterman, quad_gauss

print("Quadratic Gauss sums g(a; q): direct summation vs the closed form")
print(f"{'q':>5} {'a':>4} {'direct':>24} {'closed':>24} {'|diff|':>9}")
for q, a in ((7, 3), (45, 4), (121, 5), (999, 998)):
    d = quad_gauss(a, q, mode="direct").value
    c = quad_gauss(a, q, mode="closed").value
    print(f"{q:>5} {a:>4} {d:>24.12f} {c:>24.12f} {abs(d - c):>9.2e}")

print()
print("Kloosterman sums S(a, b; p): |S| never exceeds 2 sqrt(p)")
rng = np.random.default_rng(1)
ratios = []
for p in primes_up_to(500):
    if p < 5:
        continue
    for _ in range(20):
        a, b = int(rng.integers(1, p)), int(rng.integers(1, p))
        ratios.append(abs(kloosterman(a, b, p).value) / (2 * math.sqrt(p)))
ratios = np.array(ratios)
print(f"  {ratios.size} samples over primes p < 500")
print(f"  max ratio {ratios.max():.4f}   mean {ratios.mean():.4f}"
      f"   (the bound is ratio <= 1)")

print()
print("Composite moduli factor through the Chinese remainder theorem:")
q = 3 * 5 * 7 * 11
d = kloosterman(2, 9, q, mode="direct").value
c = kloosterman(2, 9, q, mode="crt").value
parts = " * ".join(f"{p}^{e}" for p, e in factorize(q))
print(f"  q = {q} = {parts}")
print(f"  direct {d:+.12f}   crt {c:+.12f}   |diff| {abs(d - c):.2e}")

print()
print("Gauss sums of a binary quadratic form, with a linear shift m:")
form = QuadraticForm(2, 3, 1)
print(f"  Q(x, y) = {form.a} x^2 + {form.b} y^2 + {2 * form.c} x y,"
      f" det {form.det}")
for q, a, m in ((9, 2, (1, 2)), (77, 3, (4, 0)), (143, 10, (7, 7))):
    d = form_gauss(form, m, a, q, mode="direct").value
    c = form_gauss(form, m, a, q, mode="closed").value
    print(f"  q={q:<4} a={a:<3} m={m}:  |direct - closed| = {abs(d - c):.2e}")

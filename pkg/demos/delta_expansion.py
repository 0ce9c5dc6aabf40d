"""The additive-character expansion of the Kronecker delta.

delta(n) is written as a sum over moduli q <= 2 Q of complete additive
characters e(an/q) weighted by a smooth kernel Delta_q.  The expansion is
exact on integers, and Delta_q is constant on |u| < q Q, which is what
lets the arithmetic separate from the analysis downstream.
"""

import numpy as np

from deltasum.analytic.delta import delta_eval, dfi_delta

Q = 30.0
expansion = dfi_delta(Q)
print(f"expansion at scale Q = {Q:g}: moduli up to {expansion.qmax},"
      f" weight mass {expansion.weight_sum():.15f}")

print()
print("exactness on integers:")
for n in (0, 1, -1, 17, 500, -999):
    print(f"  delta({n:>5}) = {delta_eval(expansion, n):+.3e}")

print()
print("the per-modulus kernel is flat where the expansion needs it:")
q = 10
c = expansion.plateau_constant(q)
print(f"{'u / (qQ)':>10} {'Delta_q(u)':>14} {'deviation from plateau':>24}")
for frac in (-0.95, -0.5, 0.0, 0.5, 0.95, 1.05, 1.3, 1.7):
    u = frac * q * Q
    val = expansion.kernel(q, np.array([u]))[0]
    print(f"{frac:>10.2f} {val:>14.6e} {val - c:>24.6e}")
print(f"(plateau height C_q = {c:.6e}; the kernel only moves past |u| = qQ)")

print()
print("plateau heights are order 1/(qQ) across the modulus range:")
for q in (1, 2, 5, 10, 20, 40):
    cq = expansion.plateau_constant(q)
    print(f"  q = {q:>3}:  C_q * q * Q = {cq * q * Q:.4f}")

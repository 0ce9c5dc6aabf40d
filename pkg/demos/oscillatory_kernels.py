"""Oscillatory kernels: the inverse-Mellin weight and the integrals it feeds.

Run:  python3 demos/oscillatory_kernels.py
"""

import math

from deltasum.analytic.bump import canonical_bump
from deltasum.analytic.kernels import g0_asymptotic, g_ell
from deltasum.analytic.oscint import (OscIntegralSpec, osc_voronoi_kernel,
                                      stationary_p, stationary_p_ratio,
                                      voronoi_kernel_trivial)

g = canonical_bump(1.0, 2.0)

print("g_0(y) against its leading y^(1/3)-scale asymptotic:")
print(f"{'y':>10} {'g_0(y)':>16} {'asymptotic':>16} {'rel dev':>10}")
for y in (50.0, 500.0, 5000.0, 50000.0):
    exact = g_ell(y, 0, g).value.real
    approx = g0_asymptotic(y, g).real
    print(f"{y:>10.0f} {exact:>16.8e} {approx:>16.8e}"
          f" {abs(exact - approx) / abs(exact):>10.2e}")
print("(agreement improves like (y M)^(-1/3): one saddle dominates)")

print()
print("the dual-side integral dies once the frequency passes its cut:")
X = 1.0e4
q = 20
base = OscIntegralSpec(X=X, Q=math.sqrt(X), q=q, u=0.5)
print(f"  X = {X:g}, q = {q}, cut K = {base.K:.1f}")
print(f"{'m / K':>8} {'|I| / trivial':>16}")
for mult in (0.5, 1.0, 2.0, 5.0, 20.0, 100.0):
    spec = OscIntegralSpec(X=X, Q=math.sqrt(X), q=q, m=mult * base.K, u=0.5)
    r = osc_voronoi_kernel(spec)
    print(f"{mult:>8.1f} {abs(r.value) / voronoi_kernel_trivial(spec):>16.3e}")

print()
print("stationary phase keeps the P integral at the sqrt(q) scale:")
print(f"{'q':>6} {'n2 m':>8} {'|P| / (sqrt(q) scale)':>24}")
for q in (5, 20, 80):
    for nm in (10.0, 1000.0):
        s = OscIntegralSpec(X=X, Q=100.0, q=q, m=nm, m1=1.0, n3=2, k=3)
        ratio = stationary_p_ratio(s, stationary_p(s).value)
        print(f"{q:>6} {nm:>8.0f} {ratio:>24.3f}")

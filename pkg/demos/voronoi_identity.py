"""Dual-sum identity for the triple divisor function, term by term.

The twisted sum over d3(n) h(n) equals polynomial main terms (residues of
zeta^3, degree-2 polynomial in log) plus a dual sum running over divisors
n1 | q and a dual variable n2, with Kloosterman-type coefficients and an
oscillatory integral kernel.  This script prints both sides and the
pieces that make them up.
"""

from deltasum.analytic.bump import canonical_bump
from deltasum.analytic.voronoi import voronoi_d3_check

h = canonical_bump(1000.0, 2000.0)

for q, a in ((1, 1), (3, 1)):
    rep = voronoi_d3_check(a, q, h, rel_budget=1e-3)
    print(f"modulus q = {q}, residue a = {a}")
    print(f"  twisted sum (LHS)      {rep.lhs.real:+.10e}")
    print(f"  main + dual (RHS)      {rep.rhs.real:+.10e}")
    print(f"  relative discrepancy   {rep.rel_discrepancy:.3e}"
          f"   (budget 1e-3, met: {rep.budget_met})")
    print(f"  main terms (x {rep.main_scale:g}):")
    for name, val in sorted(rep.main_terms.items()):
        print(f"    {name:<12} {val:+.6e}")
    print(f"  dual sum               {rep.dual_total.real:+.6e}"
          f"  ({rep.n2_used} dual terms, tail < {rep.tail_estimate:.1e})")
    print()

print("The identity is exact; the printed discrepancy is all quadrature")
print("and truncation.  Squeezing the budget pulls in more dual terms.")

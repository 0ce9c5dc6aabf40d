"""Coefficient sources: d3 and the symmetric-square lift of the
discriminant form, with the Hecke structure made visible."""

from deltasum.arith import mult_tables
from deltasum.coeffs import Sym2Source, TripleDivisorSource, l2_ratio

d3 = TripleDivisorSource()
print("d3(n) = # ordered triples with product n (coefficients of zeta^3):")
print("  n   :", "  ".join(f"{n:>3}" for n in range(1, 13)))
print("  d3  :", "  ".join(f"{d3.coeff(1, n):>3.0f}" for n in range(1, 13)))

sym2 = Sym2Source(100000)
print()
print("symmetric-square coefficients Lambda(m, n), Hecke normalized:")
print(f"  Lambda(1, 1) = {sym2.coeff(1, 1):+.6f}")
print(f"  Lambda(1, 2) = {sym2.coeff(1, 2):+.6f}   (= lambda(2)^2 - 1,"
      f" an exact dyadic rational)")
print(f"  Lambda(2, 1) = {sym2.coeff(2, 1):+.6f}   (symmetric in the"
      f" Hecke relations, not in general)")
print(f"  Lambda(1, 6) = {sym2.coeff(1, 6):+.6f} ="
      f" Lambda(1,2) Lambda(1,3) = {sym2.coeff(1, 2) * sym2.coeff(1, 3):+.6f}")

print()
print("mean square per X stays bounded (Rankin-Selberg):")
for x in (1000, 10000, 100000):
    print(f"  X = {x:>6}:  sum |Lambda|^2 / X = {l2_ratio(x, sym2):.4f}")

print()
print("the sieve behind d3 carries the companions the sums need:")
t = mult_tables(30)
print("  n       :", "  ".join(f"{n:>3}" for n in range(1, 11)))
print("  mu      :", "  ".join(f"{t.mu[n]:>3}" for n in range(1, 11)))
print("  phi     :", "  ".join(f"{t.phi[n]:>3}" for n in range(1, 11)))
print("  Lambda  :", "  ".join(f"{t.mangoldt[n]:>3.1f}" for n in range(1, 11)))

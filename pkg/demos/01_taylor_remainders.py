"""Taylor remainder traces of a matrix function, three ways.

For self-adjoint A and V, the remainder of order k is

    Tr[phi(A+V) - phi(A) - D1 phi(A)(V) - ... - D^{k-1} phi(A)(V,..)/(k-1)!]

Order 1 is the plain spectral difference, order 2 subtracts the first
derivative term, order 3 also subtracts half the second.  For monomials the
third-order remainder has an independent representation as an integral over
the coupling constant (the triangle 0 <= tau <= s <= 1), and this script
shows both paths agreeing to rounding error.
"""

import numpy as np

from specshift import (
    HermitianOperator,
    remainder_simplex_poly,
    remainder_trace,
)
from specshift.functions import monomial
from specshift.oracles import random_instance

A, V = random_instance(seed=42, n=5, v_norm=0.8)
print(f"random instance: n = {A.n}, ||V||_2 = 0.8, seed = 42\n")

print("order-k remainders of phi(x) = x^5:")
p5 = monomial(5)
for order in (1, 2, 3):
    print(f"  order {order}: {remainder_trace(p5, A, V, order):+.12e}")

print("\nthird-order remainder: spectral route vs coupling-constant integral")
print(f"  {'r':>3} {'spectral':>22} {'simplex':>22} {'difference':>12}")
for r in range(3, 11):
    lhs = remainder_trace(monomial(r), A, V, 3)
    rhs = remainder_simplex_poly(A, V, r, quad_order=32)
    print(f"  {r:>3} {lhs:+.15e} {rhs:+.15e} {abs(lhs - rhs):.2e}")

print("\nremainders of degree <= 2 vanish identically:")
for r in (0, 1, 2):
    print(f"  r = {r}: {remainder_trace(monomial(r), A, V, 3)!r}")

print("\ncanonical 1x1 sanity check, phi = x^3: remainder equals Tr(V^3)")
A1 = HermitianOperator([[0.0]])
V1 = HermitianOperator([[1.0]])
print(f"  computed {remainder_trace(monomial(3), A1, V1, 3):.15f}, "
      f"Tr(V^3) = {np.trace(V1.entries @ V1.entries @ V1.entries).real:.0f}")

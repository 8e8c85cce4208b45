"""
Exact polynomial algebra for 2-D filters
========================================

Filters are bivariate Laurent polynomials in ``zm`` (one column to the right)
and ``zn`` (one row down), with rational coefficients.  Nothing is rounded.
"""

from wavelift.poly2 import LaurentPoly2 as P

# the LeGall 5/3 predict filter, horizontal
p = P.parse("-1/2 -1/2*zm")
print("P      =", p)

# its transpose is the same filter acting on the vertical axis
print("P*     =", p.transpose())

# the tensor product is the non-separable stencil that fuses both axes
print("P P*   =", p * p.transpose())

# detaching the constant term: the constant part never reads a neighbour
p0, p1 = p.split_constant()
print("P0, P1 =", p0, "|", p1)

# even/odd split of a 1-D filter gives its polyphase components
g = P.parse("-1/8*zm^-2 + 1/4*zm^-1 + 3/4 + 1/4*zm - 1/8*zm^2")
even, odd = g.even_odd_split()
print("g even =", even)
print("g odd  =", odd)
assert even.upsample(2) + odd.upsample(2, shift=1) == g

# parse errors point at the offending column
try:
    P.parse("1/2 * zq")
except ValueError as exc:
    print("error  :", exc)

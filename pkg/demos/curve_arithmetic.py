"""Divisors and Riemann-Roch spaces on y^2 = x^3 + x + 3 over F_101.

Walks from points to classes to function spaces, then shows the doubling
pullback on a curve whose 2-torsion is fully rational.
"""

from atlas.divisor_class import ClassGroup, Divisor, miller_reduce, rr_basis
from atlas.field_tower import INFINITY, CurveSpec

curve = CurveSpec(101, 1, 3)
points = curve.points()
print(f"{curve} has {len(points)} rational points")

affine = [P for P in points if not P.is_infinity]
p = affine[0]
q = next(P for P in affine if P.x != p.x)
print(f"p = {p}, q = {q}, p + q = {curve.add(p, q)}")

# every degree-0 divisor is equivalent to R - O for a single point R
group = ClassGroup("concrete", curve)
D = Divisor.of((p, 2), (q, -1), (INFINITY, -1))
R, h = miller_reduce(curve, D)
print(f"{D} reduces to {R} - O, and the tracked function has divisor {h.divisor()}")
print(f"class of D: {group.class_of(D)}")

# L(p + q) is two-dimensional; it contains the constants and a function with simple poles at p and q
B = rr_basis(curve, Divisor.of((p, 1), (q, 1)))
print(f"h0(p + q) = {B.dimension}")
for f in B.basis:
    print(f"  basis element {f}")

for n in range(1, 5):
    print(f"h0({n}p) = {rr_basis(curve, Divisor.point(p, n)).dimension}")

# the pullback along multiplication by two acts as doubling on degree-zero classes
small = CurveSpec(13, 12, 0)
sg = ClassGroup("concrete", small)
P = small.points()[3]
print(f"on {small}: m2*([{P} - O]) = [{sg.m2_pullback(sg.element(0, P)).cl0} - O], 2P = {small.add(P, P)}")

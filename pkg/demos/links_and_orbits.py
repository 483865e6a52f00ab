"""Classifying bundles and exploring their conjugacy orbits.

Uses the abstract class group Z^2 + Z/2 so that classes of infinite and of
finite order are both available.
"""

from atlas.bundle_data import A0, A1, TRIVIAL, SurfaceTag
from atlas.classifier import bir_maximality, classify, stiffness
from atlas.divisor_class import ClassGroup
from atlas.link_engine import (Dec, FiberProduct, available_links, describe, enumerate_orbit, is_conjugate,
                               set_default_group)

G = ClassGroup("abstract", None, 2, (2,))
set_default_group(G)
g1, torsion = G.generator(1), G.generator(3)
Ds = G.Dsigma()

for d in (FiberProduct(A0, A1), FiberProduct(A1, A0), FiberProduct(TRIVIAL, TRIVIAL), Dec(A0, 3, G.zero())):
    v = classify(d)
    print(f"{describe(d)}: relatively maximal = {v.relatively_maximal} ({v.rule})")
    for step in v.witness:
        print(f"    {step['selector']} -> {step['target']}  conjugating: {step['conjugates_full_group']}")

# over A1, the fiber product with SL(D) starts an infinite family of conjugate bundles
start = FiberProduct(A1, SurfaceTag("SL", g1))
print(f"\nlinks from {describe(start)}:")
for choice, result in available_links(start):
    print(f"  {choice.selector}: {describe(result.target)} [{result.link_type}, {result.rule}]")

orbit = enumerate_orbit(start, 2)
print(f"orbit within two links: {[describe(n) for n in orbit.nodes]}")
print(f"stiffness: {stiffness(start).status}; family {stiffness(start).family.name}")
print(f"maximal in Bir: {bir_maximality(start).status}")

D = G.element(-1, [1, 0, 0])
answer = is_conjugate(Dec(A1, 2, D), Dec(A1, 6, D - Ds), 3)
print(f"\nDec(A1, 2, D) ~ Dec(A1, 6, D - Dsigma)? {answer.status} via {[sel for sel, _ in answer.path]}")
print(f"Trivial product vs that bundle: {is_conjugate(FiberProduct(TRIVIAL, TRIVIAL), Dec(A1, 2, D), 3).status}")

# a two-torsion class breaks the family: the link is only equivariant for a subgroup
weak = FiberProduct(A1, SurfaceTag("SL", torsion))
print(f"\n{describe(weak)}: {classify(weak).rule}, witness {[s['selector'] for s in classify(weak).witness]}")

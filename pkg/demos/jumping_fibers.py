"""Finding and removing a jumping fiber of an F_b-bundle over the affine line.

A transition matrix over F_101(x)[y, 1/y] is planted with generic type 1 and a
single fiber of type 5 over x = 17.  Elementary transformations at that fiber
bring every fiber back to the generic type.
"""

import random

from atlas.splitting_type import (birkhoff_split, fiber_type, generic_type, planted_jump_instance,
                                  planted_split_instance, remove_all_jumps, scan_fibers)

rng = random.Random(0xC0FFEE)

# a constant matrix first: the certificate M^-1 A N = diag(y^m, y^n) is checked exactly
A, m, n = planted_split_instance(101, 3, -1, rng)
cert = birkhoff_split(A)
print(f"planted ({m}, {n}), recovered ({cert.m}, {cert.n}), certificate verifies: {cert.verify(A)}")

A = planted_jump_instance(101, 1, 2, 17, rng)
print(f"generic type {generic_type(A)}, fiber over 17 has type {fiber_type(A, 17)}")

window = range(10, 25)
report = scan_fibers(A, window)
print(f"jumps in x = 10..24: {report.jumps}")

B, passes = remove_all_jumps(A, window)
print(f"after {passes} elementary transformations the jumps are {scan_fibers(B, window).jumps}")
print(f"fiber over 17 now has type {fiber_type(B, 17)}")

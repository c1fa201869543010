#!/usr/bin/env python3
"""Why the sphere-difference system needs a quadratic, not a matrix inverse.

Walks through the cyclic difference rows for a worked 3-tower example,
shows that their 3x3 matrix is singular by construction, solves via the
quadratic in the plane-normal direction (both mirror branches), and then
removes the ambiguity with a fourth tower and least squares.
"""

import math

import numpy as np

from gsmloc import (
    NONNEGATIVE,
    NONPOSITIVE,
    Point3,
    TowerSite,
    build_difference_system,
    multilaterate_lsq,
    solve_position,
)

towers = [
    TowerSite(0, Point3(0, 0, 0)),
    TowerSite(1, Point3(10, 0, 0)),
    TowerSite(2, Point3(0, 10, 0)),
]
# ranges measured from the (hidden) true point (3, 4, 5)
ranges = [math.sqrt(50), math.sqrt(90), math.sqrt(70)]

system = build_difference_system(towers, ranges)
print("cyclic difference rows (lambda, mu, sigma | xi):")
for row in system.rows:
    print(f"  {row[0]:8.2f} {row[1]:8.2f} {row[2]:8.2f} | {row[3]:10.2f}")
print(f"row0 + row1 + row2 = {system.rows.sum(axis=0)}")
print(f"det of the 3x3 coefficient matrix: {np.linalg.det(system.matrix):.3e}")
print("-> the rows always sum to zero, so inverting the matrix is impossible;")
print("   two rows fix the radical line, the first sphere fixes the height.")
print()

for convention in (NONNEGATIVE, NONPOSITIVE):
    fix = solve_position(towers, ranges, z_convention=convention)
    p = fix.position
    print(f"3-tower solve, z {convention:>11}: ({p.x:.6f}, {p.y:.6f}, {p.z:+.6f})"
          f"  max residual {max(fix.residuals):.2e} m")

print()
fourth = TowerSite(3, Point3(0, 0, 10))
towers4 = towers + [fourth]
ranges4 = ranges + [math.sqrt(9 + 16 + 25)]
fix4 = multilaterate_lsq(towers4, ranges4)
p = fix4.position
print(f"4-tower least squares:          ({p.x:.6f}, {p.y:.6f}, {p.z:+.6f})"
      f"  branch: {fix4.z_branch}")
print("the overdetermined solve lands on the correct mirror image on its own.")

"""
Periodic orbits of the cat map
==============================

Enumerate the closed orbits of x -> A x on the torus, check the
fixed-point counts against |det(A^nu - I)|, and tag each orbit with its
Frobenius class in the order-12 quotient (Z/2)^2 x| Z/3.
"""

import numpy as np

from chebolab import fingroup, oracles, orbitgen

A = orbitgen.CAT_MATRIX

# fixed points of A^nu come straight from the Smith normal form
for nu in range(1, 6):
    pts = orbitgen.cat_fixed_points(A, nu)
    print(f"nu={nu}: {len(pts):4d} fixed points, |det(A^nu - I)| = {oracles.det_count(A, nu)}")

# primitive orbits, origin left out as usual
table = orbitgen.cat_orbit_table(A, 12)
per_period = np.bincount(table.period)[1:]
print("orbits per period 1..12:", per_period.tolist())

# a single orbit: base point, period, and the integer lift of A^nu x - x
orb = table.orbit(3)
print("orbit 3:", orb.period, orb.base_point, orb.translation)

# Frobenius classes in the semidirect quotient
G, q = fingroup.semidirect_quotient(2, A)
tags = orbitgen.frobenius_class_indices(table, q)
for i, c in enumerate(G.classes):
    print(f"class of size {c.size}: {np.mean(tags == i):.4f}  (|C|/|G| = {c.size / G.order:.4f})")

# the Z/3 coordinate of Frobenius is nu mod 3, so frequencies follow the
# share of the last period rather than settling down
print("share of orbits with period 12:", per_period[-1] / per_period.sum())

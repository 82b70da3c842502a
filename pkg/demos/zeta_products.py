"""
Zeta partial products
=====================

The link zeta function factors over conjugacy classes.  Check the
factorisation numerically and compare against a high-precision product.
"""

import math

from chebolab import density, fingroup, oracles, orbitgen

geos = orbitgen.modular_geodesics(14)
G, q = fingroup.psl2_quotient(3)
tags = orbitgen.frobenius_class_indices(geos, q)
lengths = orbitgen.assign_lengths(geos)

for s in (1.05, 1.1, 1.2):
    total = density.zeta_partial(lengths, s)
    parts = [density.zeta_relative(lengths, tags, i, s) for i in range(len(G.classes))]
    print(f"s={s}: zeta = {total:.12f}, product over {len(parts)} classes = {math.prod(parts):.12f}")

# the float path against mpmath at 40 digits
s = 1.1
print("float:", density.zeta_partial(lengths, s))
print("mpmath:", oracles.zeta_product_mp(lengths.norms, s))

# logarithmic derivative and its Mellin form through psi
print("-zeta'/zeta(2) =", density.log_derivative(lengths, 2.0))
print("s * int psi(x) x^(-s-1) dx =", density.mellin_psi(lengths, 2.0, u_max=200.0))

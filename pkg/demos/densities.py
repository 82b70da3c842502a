"""
Natural and Dirichlet densities
===============================

Stream modular geodesics of length <= 18 through PSL_2(F_2), in the
canonical order, and compare class frequencies with |C|/|G|.  The identity class
should approach 1/6.
"""

import numpy as np

from chebolab import density, fingroup, orbitgen

geos = orbitgen.order_knots(orbitgen.modular_geodesics(18))
G, q = fingroup.psl2_quotient(2)
tags = orbitgen.frobenius_class_indices(geos, q)
lengths = orbitgen.assign_lengths(geos)

rep = density.density_report(G, tags, lengths)
print(rep.to_csv())

# running frequency of the identity class
ident = G.class_index[G.identity]
run = density.natural_density(tags, ident)
for nu in (100, 1000, 10_000, len(run)):
    print(f"after {nu:6d} geodesics: {run[nu - 1]:.4f}")

# Dirichlet ratios on the s grid, and how much they move if half the knots are dropped
est = density.dirichlet_density(lengths, tags == ident)
print("ratios:", np.round(est.ratios, 4), "extrapolated:", round(est.extrapolated, 4))
print("truncation sensitivity:", round(est.diagnostics["truncation_sensitivity"], 4))

# counting functions for the prime-number length scheme
cf = density.counting_functions(lengths, tags)
print("pi(100) =", cf.pi(100), " pi_C(100) =", cf.pi(100, ident), " psi(100) =", round(cf.psi(100), 3))

"""
Decomposition and inertia in finite covers
==========================================

A knot's meridian and longitude map to a commuting pair (mu, lam) in G.
Compute e, f, g, the Frobenius class, the components in a non-Galois
subcover, and run the split-set rigidity sweep.
"""

from chebolab import covers, fingroup, grouplib

G = grouplib.by_label("S4")
pairs = covers.commuting_pairs(G)
print(f"{G.label}: {len(pairs)} commuting pairs")

# first pair that is both ramified and inert to some degree
for mu, lam in pairs.tolist():
    p = covers.PeripheralImage(mu, lam, G)
    d = covers.splitting_data(p)
    if d.e > 1 and d.f > 1:
        break
print("e, f, g =", d.e, d.f, d.g, " frobenius:", d.frobenius)

# components above the knot in the cover for a point stabiliser S3 < S4
H = next(h for h in fingroup.subgroups(G) if len(h) == 6)
for c in covers.subcover_components(p, H):
    print("component", c.component_id, "e =", c.e, "f =", c.f, "cosets", c.cosets)

# the two conventions for induced length differ once e > 1
for conv in covers.InducedLength:
    print(conv.value, covers.induced_length(1.0, d, conv))

# f is multiplicative along G -> G/N -> base
for N in fingroup.normal_subgroups(G):
    t = covers.tower_degrees(G, N, p)
    print(f"|N| = {len(N):2d}: f = {t.total} = {t.base} * {t.intermediate}")

rep = covers.split_rigidity_sweep(16)
print(rep.summary())

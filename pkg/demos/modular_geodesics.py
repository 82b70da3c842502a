"""
Modular geodesics as R/L words
==============================

Closed geodesics on the modular surface are cyclic words in
R = [[1,1],[0,1]] and L = [[1,0],[1,1]].  List the short ones, their traces
and lengths, their Rademacher values, and their images in PSL_2(F_p).
"""

import collections

from chebolab import fingroup, oracles, orbitgen

geos = orbitgen.modular_geodesics(5)
for g in geos:
    print(f"{g.word_string():6s} trace {g.trace:3d}  length {g.geo_length:.5f}  "
          f"Rademacher {orbitgen.rademacher(g):+d}")

# the Rademacher value by letter counting agrees with the Dedekind-sum formula
for g in geos:
    assert orbitgen.rademacher(g) == oracles.rademacher_psi(oracles.letters_matrix(g.word_string()))

# count classes by word length; these are the binary necklace counts minus R^n, L^n
counts = collections.Counter(g.letter_count for g in orbitgen.modular_geodesics(14))
print("classes by length:", dict(sorted(counts.items())))

# Frobenius in PSL_2(F_2) = S_3: identity, 3-cycles, transpositions
G, q = fingroup.psl2_quotient(2)
for g in geos[:6]:
    x = orbitgen.frobenius_element(g, q)
    print(g.word_string(), "->", G.element_labels[x], "order", G.element_orders[x])

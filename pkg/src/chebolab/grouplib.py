"""A small library of explicit groups for exhaustive sweeps.

Contains one representative of every isomorphism class of order <= 16
(41 groups) together with a handful of order-24 groups.  Groups are built
from concrete models (cyclic/metacyclic formulas, matrices, direct and
semidirect products) and tabulated; isomorphism-class distinctness is
checked by invariants in the test-suite rather than assumed.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .fingroup import FiniteGroup, group_from_generators, group_from_operation, make_group


def cyclic(n: int) -> FiniteGroup:
    a = np.arange(n)
    return make_group((a[:, None] + a[None, :]) % n, f"Z{n}")


def direct_product(*groups: FiniteGroup, label: str | None = None) -> FiniteGroup:
    elems = list(product(*(range(G.order) for G in groups)))

    def op(x, y):
        return tuple(G.mul(a, b) for G, a, b in zip(groups, x, y))

    return group_from_operation(elems, op, label or "x".join(G.label for G in groups))


def abelian(*ns: int) -> FiniteGroup:
    return direct_product(*(cyclic(n) for n in ns), label="x".join(f"Z{n}" for n in ns))


def metacyclic(m: int, n: int, r: int, label: str) -> FiniteGroup:
    """Z/m x| Z/n with the generator of Z/n acting as x -> r x (needs r^n = 1 mod m)."""
    assert pow(r, n, m) == 1 % m
    elems = list(product(range(m), range(n)))

    def op(x, y):
        return ((x[0] + pow(r, x[1], m) * y[0]) % m, (x[1] + y[1]) % n)

    return group_from_operation(elems, op, label)


def dihedral(k: int) -> FiniteGroup:
    """Symmetries of a k-gon, order 2k."""
    return metacyclic(k, 2, k - 1, f"D{2 * k}")


def dicyclic(k: int) -> FiniteGroup:
    """<a, x | a^{2k} = 1, x^2 = a^k, x a x^-1 = a^-1>, order 4k."""
    m = 2 * k
    elems = list(product(range(m), range(2)))

    def op(p, q):
        (i, s), (j, t) = p, q
        j2 = j if s == 0 else -j
        if s and t:
            return ((i + j2 + k) % m, 0)
        return ((i + j2) % m, (s + t) % 2)

    label = "Q8" if k == 2 else ("Q16" if k == 4 else f"Dic{4 * k}")
    return group_from_operation(elems, op, label)


def semidirect(N: FiniteGroup, H: FiniteGroup, action, label: str) -> FiniteGroup:
    """N x| H where ``action(h)`` is a permutation array of N (an automorphism)."""
    perms = [np.asarray(action(h)) for h in H.elements]
    elems = list(product(N.elements, H.elements))

    def op(x, y):
        (n1, h1), (n2, h2) = x, y
        return (N.mul(n1, int(perms[h1][n2])), H.mul(h1, h2))

    return group_from_operation(elems, op, label)


def symmetric(k: int) -> FiniteGroup:
    ident = tuple(range(k))
    gens = [tuple([1, 0] + list(range(2, k))), tuple(list(range(1, k)) + [0])]

    def op(p, q):
        return tuple(p[q[i]] for i in range(k))

    return group_from_generators(gens, op, ident, f"S{k}")


def alternating(k: int) -> FiniteGroup:
    ident = tuple(range(k))
    gens = []
    for i in range(k - 2):
        c = list(range(k))
        c[i], c[i + 1], c[i + 2] = c[i + 1], c[i + 2], c[i]
        gens.append(tuple(c))

    def op(p, q):
        return tuple(p[q[i]] for i in range(k))

    return group_from_generators(gens, op, ident, f"A{k}")


def _matrix_group(gens, p, label):
    def op(a, b):
        return tuple(
            tuple(sum(a[i][t] * b[t][j] for t in range(len(b))) % p for j in range(len(b[0])))
            for i in range(len(a))
        )

    n = len(gens[0])
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return group_from_generators(gens, op, ident, label)


def sl2_3() -> FiniteGroup:
    return _matrix_group([((1, 1), (0, 1)), ((1, 0), (1, 1))], 3, "SL(2,3)")


def pauli() -> FiniteGroup:
    """The Pauli group <X, Y, Z>, i.e. the central product Z4 o D8, order 16.

    Entries live in Z[i] encoded as Gaussian-integer pairs modulo 5 via
    i -> 2 (a faithful model since all entries are in {0, +-1, +-i}).
    """
    i = 2  # 2^2 = -1 mod 5
    X = ((0, 1), (1, 0))
    Z = ((1, 0), (0, 4))
    Y = ((0, (-i) % 5), (i, 0))
    return _matrix_group([X, Y, Z], 5, "Pauli")


def _g16_3() -> FiniteGroup:
    """<a, b, c | a^4, b^2, c^2, [a,b], [b,c], c a c = a b>."""
    N = abelian(4, 2)
    elems = list(product(range(4), range(2)))
    idx = {e: k for k, e in enumerate(elems)}

    def act(h):
        if h == 0:
            return list(range(N.order))
        return [idx[(x, (y + x) % 2)] for x, y in elems]

    return semidirect(N, cyclic(2), act, "(Z4xZ2)x|Z2")


@lru_cache(maxsize=None)
def library(max_order: int = 24) -> tuple[FiniteGroup, ...]:
    """Groups sorted by order.  Complete for orders <= 16."""
    groups: list[FiniteGroup] = []
    add = groups.append
    for n in (1, 2, 3, 5, 7, 11, 13):
        add(cyclic(n))
    add(cyclic(4)); add(abelian(2, 2))
    add(cyclic(6)); add(dihedral(3))
    add(cyclic(8)); add(abelian(4, 2)); add(abelian(2, 2, 2)); add(dihedral(4)); add(dicyclic(2))
    add(cyclic(9)); add(abelian(3, 3))
    add(cyclic(10)); add(dihedral(5))
    add(cyclic(12)); add(abelian(6, 2)); add(alternating(4)); add(dihedral(6)); add(dicyclic(3))
    add(cyclic(14)); add(dihedral(7))
    add(cyclic(15))
    # order 16: all 14 classes
    add(cyclic(16))
    add(abelian(4, 4))
    add(_g16_3())
    add(metacyclic(4, 4, 3, "Z4x|Z4"))
    add(abelian(8, 2))
    add(metacyclic(8, 2, 5, "M16"))
    add(dihedral(8))
    add(metacyclic(8, 2, 3, "SD16"))
    add(dicyclic(4))
    add(abelian(4, 2, 2))
    add(direct_product(dihedral(4), cyclic(2), label="D8xZ2"))
    add(direct_product(dicyclic(2), cyclic(2), label="Q8xZ2"))
    add(pauli())
    add(abelian(2, 2, 2, 2))
    if max_order >= 24:
        add(symmetric(4))
        add(sl2_3())
        add(direct_product(alternating(4), cyclic(2), label="A4xZ2"))
        add(dihedral(12))
        add(metacyclic(3, 8, 2, "Z3x|Z8"))
        add(direct_product(dicyclic(2), cyclic(3), label="Q8xZ3"))
        add(abelian(12, 2))
    groups = [G for G in groups if G.order <= max_order]
    groups.sort(key=lambda G: G.order)
    return tuple(groups)


def by_label(label: str) -> FiniteGroup:
    for G in library():
        if G.label == label:
            return G
    raise KeyError(label)

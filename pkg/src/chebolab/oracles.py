"""Independent slow routes used to cross-check the fast code paths.

Nothing here shares an algorithm with the module it checks: fixed points
come from scanning a rational grid instead of a Smith normal form, normal
subgroups from a search over class unions instead of normal closures,
Rademacher values from Dedekind sums instead of exponent counting, zeta
products from mpmath instead of compensated float sums.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import mpmath
import numpy as np


# --------------------------------------------------------------------------
# cat map


def det_count(A, nu: int) -> int:
    """|det(A^nu - I)| with exact integers."""
    P = [[1, 0], [0, 1]]
    for _ in range(nu):
        P = [[P[0][0] * A[0][0] + P[0][1] * A[1][0], P[0][0] * A[0][1] + P[0][1] * A[1][1]],
             [P[1][0] * A[0][0] + P[1][1] * A[1][0], P[1][0] * A[0][1] + P[1][1] * A[1][1]]]
    return abs((P[0][0] - 1) * (P[1][1] - 1) - P[0][1] * P[1][0])


def _power(A, nu):
    P = np.eye(2, dtype=object)
    M = np.array(A, dtype=object)
    for _ in range(nu):
        P = P.dot(M)
    return P


def grid_fixed_points(A, nu: int) -> list[tuple[Fraction, Fraction]]:
    """Scan every point (i/d, j/d), d = |det(A^nu - I)|, and keep the fixed ones.

    Any fixed point x satisfies (A^nu - I) x in Z^2, so its coordinates have
    denominators dividing d.  Cost is d^2; fine for nu <= 8 with the cat map.
    """
    d = det_count(A, nu)
    B = (_power(A, nu) - np.eye(2, dtype=object)).astype(np.int64)
    i = np.arange(d, dtype=np.int64)
    I, J = np.meshgrid(i, i, indexing="ij")
    ok = ((B[0, 0] * I + B[0, 1] * J) % d == 0) & ((B[1, 0] * I + B[1, 1] * J) % d == 0)
    return sorted((Fraction(int(a), d), Fraction(int(b), d)) for a, b in zip(I[ok], J[ok]))


def closure_fixed_points(A, nu: int) -> list[tuple[Fraction, Fraction]]:
    """Fixed points as the subgroup of (Q/Z)^2 spanned by the columns of (A^nu - I)^-1.

    The inverse is adj(B)/det(B).  The subgroup of (Z/d)^2 is the cyclic
    group of the first column plus its translates by multiples of the second.
    """
    B = _power(A, nu) - np.eye(2, dtype=object)
    det = int(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
    d = abs(det)
    adj = [[int(B[1, 1]), -int(B[0, 1])], [-int(B[1, 0]), int(B[0, 0])]]
    sign = 1 if det > 0 else -1
    g1, g2 = (np.array([(sign * adj[0][c]) % d, (sign * adj[1][c]) % d], dtype=np.int64) for c in range(2))
    cyc = [np.zeros(2, dtype=np.int64)]
    while True:
        nxt = (cyc[-1] + g1) % d
        if not nxt.any():
            break
        cyc.append(nxt)
    H1 = np.array(cyc)
    keys = set((H1[:, 0] * d + H1[:, 1]).tolist())
    cosets, shift = [H1], g2 % d
    while (int(shift[0]) * d + int(shift[1])) not in keys:
        cosets.append((H1 + shift) % d)
        shift = (shift + g2) % d
    pts = np.unique(np.concatenate(cosets), axis=0)
    return sorted((Fraction(int(a), d), Fraction(int(b), d)) for a, b in pts)


def mobius(n: int) -> int:
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def primitive_orbit_counts(A, nu_max: int) -> dict[int, int]:
    """Primitive orbit counts (origin included) by Moebius inversion of det counts."""
    out = {}
    for nu in range(1, nu_max + 1):
        total = sum(mobius(nu // d) * det_count(A, d) for d in range(1, nu + 1) if nu % d == 0)
        assert total % nu == 0
        out[nu] = total // nu
    return out


# --------------------------------------------------------------------------
# finite groups


def conjugation_classes(table) -> list[frozenset[int]]:
    """Classes by the definition: x ~ y iff y = g x g^-1 for some g."""
    t = np.asarray(table)
    n = len(t)
    e = next(i for i in range(n) if all(t[i, j] == j for j in range(n)))
    inv = [next(j for j in range(n) if t[i, j] == e) for i in range(n)]
    classes = []
    for x in range(n):
        if any(x in c for c in classes):
            continue
        classes.append(frozenset(int(t[t[g, x], inv[g]]) for g in range(n)))
    return classes


def normal_subgroups_by_search(table) -> set[frozenset[int]]:
    """Unions of classes that contain e and are closed under multiplication.

    Depth-first over include/exclude decisions per class, pruning a branch
    as soon as a product of included elements lands in an excluded class.
    """
    t = np.asarray(table)
    classes = sorted(conjugation_classes(t), key=min)
    id_class = next(c for c in classes if all(t[min(c), j] == j for j in range(len(t))))
    rest = [c for c in classes if c is not id_class]
    found = set()

    def closed(members):
        m = sorted(members)
        return set(t[np.ix_(m, m)].ravel().tolist()) <= members

    def violates(members, excluded):
        m = sorted(members)
        return bool(excluded & set(t[np.ix_(m, m)].ravel().tolist()))

    def dfs(i, members, excluded):
        if violates(members, excluded):
            return
        if i == len(rest):
            if closed(members):
                found.add(frozenset(members))
            return
        dfs(i + 1, members | rest[i], excluded)
        dfs(i + 1, members, excluded | rest[i])

    dfs(0, set(id_class), set())
    return found


# --------------------------------------------------------------------------
# Dedekind sums


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) = sum_{r=1}^{k-1} ((r/k)) ((hr/k)) for k >= 1."""
    def saw(x: Fraction) -> Fraction:
        if x.denominator == 1:
            return Fraction(0)
        return x - (x.numerator // x.denominator) - Fraction(1, 2)

    return sum((saw(Fraction(r, k)) * saw(Fraction(h * r, k)) for r in range(1, k)), Fraction(0))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def rademacher_phi(M) -> Fraction:
    """The Rademacher function Phi on SL_2(Z)."""
    (a, b), (c, d) = M
    if c == 0:
        return Fraction(b, d)
    return Fraction(a + d, c) - 12 * _sign(c) * dedekind_sum(d, abs(c))


def rademacher_psi(M) -> int:
    """Conjugation-invariant Psi = Phi - 3 sign(c (a + d)) for hyperbolic M."""
    (a, _), (c, d) = M
    val = rademacher_phi(M) - 3 * _sign(c * (a + d))
    assert val.denominator == 1
    return int(val)


def letters_matrix(letters: str):
    R, L = ((1, 1), (0, 1)), ((1, 0), (1, 1))
    M = ((1, 0), (0, 1))
    for ch in letters:
        X = R if ch == "R" else L
        M = tuple(tuple(sum(M[i][k] * X[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return M


def hyperbolic_letter_words(max_len: int):
    """Every positive word in R, L with both letters and length <= max_len."""
    for n in range(2, max_len + 1):
        for w in product("RL", repeat=n):
            if "R" in w and "L" in w:
                yield "".join(w)


# --------------------------------------------------------------------------
# zeta products


def zeta_product_mp(norms, s: float, dps: int = 40) -> mpmath.mpf:
    with mpmath.workdps(dps):
        s = mpmath.mpf(s)
        out = mpmath.mpf(1)
        for N in np.asarray(norms).tolist():
            out /= 1 - mpmath.mpf(N) ** (-s)
        return +out


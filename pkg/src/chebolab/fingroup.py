"""Finite groups stored as explicit multiplication tables.

Elements are the integers ``0..n-1``.  Everything here is exhaustive: the
groups we care about have order at most a few hundred, so a full Cayley
table is cheap and every axiom can be checked directly.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import LabError

MAX_ORDER = 256
NORMAL_SUBGROUP_BOUND = 64


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A validated finite group.  Build it with :func:`make_group`."""

    table: np.ndarray
    identity: int
    inverse: np.ndarray
    label: str = ""
    element_labels: tuple = field(default=(), repr=False)

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a, b):
        return int(self.table[a, b])

    def inv(self, a):
        return int(self.inverse[a])

    def conj(self, g, x):
        """g x g^-1"""
        return int(self.table[self.table[g, x], self.inverse[g]])

    def power(self, x, k):
        if k < 0:
            x, k = self.inverse[x], -k
        result, base = self.identity, int(x)
        while k:
            if k & 1:
                result = int(self.table[result, base])
            base = int(self.table[base, base])
            k >>= 1
        return result

    def product(self, word: Iterable[int]) -> int:
        result = self.identity
        for x in word:
            result = int(self.table[result, x])
        return result

    def commute(self, a, b) -> bool:
        return self.table[a, b] == self.table[b, a]

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.ones(self.order, dtype=np.int64)
        cur = np.arange(self.order)
        done = cur == self.identity
        k = 1
        while not done.all():
            cur = self.table[cur, np.arange(self.order)]
            k += 1
            hit = (cur == self.identity) & ~done
            orders[hit] = k
            done |= hit
        return orders

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    @cached_property
    def classes(self) -> tuple[ConjClass, ...]:
        return tuple(_compute_classes(self))

    @cached_property
    def class_index(self) -> np.ndarray:
        """``class_index[x]`` is the position of x's class in :attr:`classes`."""
        idx = np.empty(self.order, dtype=np.int64)
        for i, c in enumerate(self.classes):
            idx[list(c.members)] = i
        return idx

    def class_of(self, x) -> ConjClass:
        return self.classes[self.class_index[x]]

    def to_dict(self) -> dict:
        return {"label": self.label, "order": self.order,
                "table": self.table.reshape(-1).tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self):
        return f"FiniteGroup({self.label!r}, order={self.order})"


@dataclass(frozen=True, order=True)
class ConjClass:
    representative: int
    members: tuple[int, ...] = field(compare=False)

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, x):
        return x in self.members


class SourceModel(str, enum.Enum):
    SEMIDIRECT_Z2_Z = "SEMIDIRECT_Z2_Z"
    FREE_PROD_Z2_Z3 = "FREE_PROD_Z2_Z3"
    FREE_ABELIAN = "FREE_ABELIAN"


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """A surjection from a link-group model onto ``target``.

    SEMIDIRECT_Z2_Z: images of (x, y, t) in Z^2 x|_A Z, with ``matrix`` = A.
    FREE_PROD_Z2_Z3: images of (sigma, tau) in Z/2 * Z/3.
    FREE_ABELIAN: images of a free abelian basis.
    """

    source_model: SourceModel
    generator_images: tuple[int, ...]
    target: FiniteGroup
    matrix: tuple[tuple[int, int], tuple[int, int]] | None = None

    def __post_init__(self):
        check_quotient_map(self)


def make_group(table, label: str = "", check_associativity: bool = True,
               max_order: int = MAX_ORDER) -> FiniteGroup:
    """Validate a multiplication table and wrap it as a :class:`FiniteGroup`."""
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
        raise LabError("BAD_TABLE", f"expected a square table, got shape {t.shape}")
    n = t.shape[0]
    if n > max_order:
        raise LabError("GROUP_TOO_LARGE", f"order {n} exceeds {max_order}")
    if t.min() < 0 or t.max() >= n:
        raise LabError("BAD_TABLE", "entries outside 0..n-1")
    ar = np.arange(n)
    ids = [e for e in range(n) if (t[e] == ar).all() and (t[:, e] == ar).all()]
    if not ids:
        raise LabError("NO_IDENTITY")
    e = ids[0]
    # Each row must contain e exactly once for two-sided inverses to exist.
    rows, cols = np.nonzero(t == e)
    inverse = np.full(n, -1, dtype=np.int64)
    if len(rows) != n or len(set(rows.tolist())) != n:
        raise LabError("NO_INVERSE")
    inverse[rows] = cols
    if not (t[inverse, ar] == e).all():
        raise LabError("NO_INVERSE")
    if check_associativity and not _is_associative(t):
        raise LabError("NON_ASSOCIATIVE")
    t.setflags(write=False)
    inverse.setflags(write=False)
    return FiniteGroup(t, int(e), inverse, label)


def _is_associative(t: np.ndarray) -> bool:
    n = t.shape[0]
    step = max(1, (1 << 22) // (n * n))
    for a0 in range(0, n, step):
        a = np.arange(a0, min(n, a0 + step))
        left = t[t[a][:, :, None], np.arange(n)[None, None, :]]   # (ab)c
        right = t[a[:, None, None], t[None, :, :]]                  # a(bc)
        if not np.array_equal(left, right):
            return False
    return True


def group_from_operation(elements: Sequence, op, label: str = "") -> FiniteGroup:
    """Tabulate a group given as a list of hashable elements and a product."""
    index = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[op(a, b)]
    return make_group(table, label)


def group_from_generators(gens: Sequence, op, identity, label: str = "") -> FiniteGroup:
    """Close ``gens`` under ``op`` and tabulate.  The identity is placed first."""
    elements = [identity]
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = op(x, g)
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    return group_from_operation(elements, op, label)


def group_from_dict(d: dict) -> FiniteGroup:
    n = int(d["order"])
    return make_group(np.asarray(d["table"], dtype=np.int64).reshape(n, n), d.get("label", ""))


def group_from_json(text: str) -> FiniteGroup:
    return group_from_dict(json.loads(text))


def group_from_csv(text: str, label: str = "") -> FiniteGroup:
    rows = [[int(x) for x in row] for row in csv.reader(io.StringIO(text)) if row]
    return make_group(rows, label)


def group_to_csv(G: FiniteGroup) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(G.table.tolist())
    return buf.getvalue()


def _compute_classes(G: FiniteGroup) -> list[ConjClass]:
    n = G.order
    t, inv = G.table, G.inverse
    g = np.arange(n)
    seen = np.zeros(n, dtype=bool)
    out = []
    for x in range(n):
        if seen[x]:
            continue
        members = np.unique(t[t[g, x], inv[g]])
        seen[members] = True
        out.append(ConjClass(int(members[0]), tuple(int(m) for m in members)))
    return out


def conjugacy_classes(G: FiniteGroup) -> list[ConjClass]:
    """Conjugacy classes ordered by representative (the minimal member)."""
    return list(G.classes)


def subgroup_generated(G: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    gens = [int(x) for x in gens]
    members = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(G.table[x, g])
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(members)


def is_subgroup(G: FiniteGroup, H: Iterable[int]) -> bool:
    h = np.fromiter(H, dtype=np.int64)
    if h.size == 0 or G.identity not in h:
        return False
    mask = np.zeros(G.order, dtype=bool)
    mask[h] = True
    return bool(mask[G.table[np.ix_(h, G.inverse[h])]].all())


def is_normal(G: FiniteGroup, N: Iterable[int]) -> bool:
    N = frozenset(N)
    if not is_subgroup(G, N):
        return False
    return all(G.conj(g, x) in N for g in G.elements for x in N)


def normal_closure(G: FiniteGroup, xs: Iterable[int]) -> frozenset[int]:
    gens = set()
    for x in xs:
        gens.update(G.class_of(x).members)
    return subgroup_generated(G, sorted(gens))


def normal_subgroups(G: FiniteGroup, bound: int = NORMAL_SUBGROUP_BOUND) -> list[frozenset[int]]:
    """All normal subgroups, smallest first.

    A normal subgroup is the join of the normal closures of its classes, so
    the lattice is reached from the trivial group by repeatedly joining one
    more class.
    """
    if G.order > bound:
        raise LabError("GROUP_TOO_LARGE", f"|G| = {G.order} > {bound}")
    reps = [c.representative for c in G.classes]
    trivial = frozenset([G.identity])
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for N in frontier:
            for r in reps:
                if r in N:
                    continue
                M = normal_closure(G, list(N) + [r])
                if M not in found:
                    found.add(M)
                    nxt.append(M)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def subgroups(G: FiniteGroup, bound: int = NORMAL_SUBGROUP_BOUND) -> list[frozenset[int]]:
    """All subgroups, smallest first, as joins of cyclic subgroups."""
    if G.order > bound:
        raise LabError("GROUP_TOO_LARGE", f"|G| = {G.order} > {bound}")
    gens, seen = [], set()
    for x in G.elements:
        C = subgroup_generated(G, [x])
        if C not in seen:
            seen.add(C)
            gens.append(x)
    trivial = frozenset([G.identity])
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for H in frontier:
            for x in gens:
                if x in H:
                    continue
                K = subgroup_generated(G, sorted(H) + [x])
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def quotient_group(G: FiniteGroup, N: Iterable[int], label: str = "") -> tuple[FiniteGroup, np.ndarray]:
    """G/N together with the projection ``proj[g] = coset index``."""
    N = sorted(frozenset(N))
    if not is_normal(G, N):
        raise LabError("NOT_NORMAL")
    proj = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in G.elements:
        if proj[g] >= 0:
            continue
        proj[G.table[g, N]] = len(reps)
        reps.append(g)
    k = len(reps)
    table = proj[G.table[np.ix_(reps, reps)]]
    Q = make_group(table, label or f"{G.label}/N{len(N)}")
    assert np.array_equal(proj[G.table], table[np.ix_(proj, proj)])
    return Q, proj


def check_quotient_map(q: QuotientMap) -> None:
    G = q.target
    im = [int(x) for x in q.generator_images]
    if any(x < 0 or x >= G.order for x in im):
        raise LabError("BAD_QUOTIENT", "generator image out of range")
    model = SourceModel(q.source_model)
    if model is SourceModel.FREE_PROD_Z2_Z3:
        if len(im) != 2:
            raise LabError("BAD_QUOTIENT", "need images of sigma and tau")
        s, t = im
        if G.power(s, 2) != G.identity or G.power(t, 3) != G.identity:
            raise LabError("BAD_QUOTIENT", "sigma^2 = tau^3 = e violated")
    elif model is SourceModel.SEMIDIRECT_Z2_Z:
        if len(im) != 3 or q.matrix is None:
            raise LabError("BAD_QUOTIENT", "need images of x, y, t and the matrix A")
        x, y, t = im
        (a, b), (c, d) = q.matrix
        if not G.commute(x, y):
            raise LabError("BAD_QUOTIENT", "[x, y] != e")
        ax = G.mul(G.power(x, a), G.power(y, c))
        ay = G.mul(G.power(x, b), G.power(y, d))
        if G.conj(t, x) != ax or G.conj(t, y) != ay:
            raise LabError("BAD_QUOTIENT", "t x t^-1 = A x violated")
    elif model is SourceModel.FREE_ABELIAN:
        if any(not G.commute(a, b) for a, b in product(im, im)):
            raise LabError("BAD_QUOTIENT", "images do not commute")
    if len(subgroup_generated(G, im)) != G.order:
        raise LabError("NOT_SURJECTIVE")


def _matrix_order_mod(A, m: int) -> int:
    A = np.asarray(A, dtype=np.int64) % m
    eye = np.eye(2, dtype=np.int64)
    P, r = A.copy(), 1
    while not np.array_equal(P, eye):
        P = (P @ A) % m
        r += 1
    return r


def semidirect_quotient(m: int, A) -> tuple[FiniteGroup, QuotientMap]:
    """The finite quotient (Z/m)^2 x| <A mod m> of Z^2 x|_A Z.

    Element index of (v, k) is ``k*m*m + v[0]*m + v[1]`` and
    (v, k)(w, l) = (v + A^k w, k + l).
    """
    if m < 2:
        raise LabError("MODULUS_TOO_SMALL", f"m = {m}")
    A = np.asarray(A, dtype=np.int64)
    if A.shape != (2, 2) or round(np.linalg.det(A)) != 1:
        raise LabError("BAD_MATRIX", "need a 2x2 integer matrix of determinant 1")
    r = _matrix_order_mod(A, m)
    powers = [np.eye(2, dtype=np.int64)]
    for _ in range(r - 1):
        powers.append((powers[-1] @ A) % m)
    powers = np.array(powers)
    n = m * m * r
    idx = np.arange(n)
    K, V0, V1 = idx // (m * m), (idx // m) % m, idx % m
    V = np.stack([V0, V1], axis=1)
    AW = np.einsum("aij,bj->abi", powers[K], V)          # A^{k_a} w_b
    S = (V[:, None, :] + AW) % m
    KL = (K[:, None] + K[None, :]) % r
    table = KL * m * m + S[..., 0] * m + S[..., 1]
    G = make_group(table, f"(Z/{m})^2 x| Z/{r}")
    x, y, t = m, 1, semidirect_element(m, r, (0, 0), 1)
    q = QuotientMap(SourceModel.SEMIDIRECT_Z2_Z, (x, y, t), G,
                    matrix=tuple(tuple(int(v) for v in row) for row in A.tolist()))
    return G, q


def semidirect_element(m: int, r: int, v, k: int) -> int:
    return (k % r) * m * m + (v[0] % m) * m + (v[1] % m)


def enumerate_pairs_23(G: FiniteGroup, dedup: bool = False) -> list[QuotientMap]:
    """Every surjection Z/2 * Z/3 -> G, as (sigma, tau) images."""
    orders = G.element_orders
    sigmas = [x for x in G.elements if orders[x] in (1, 2)]
    taus = [x for x in G.elements if orders[x] in (1, 3)]
    out = []
    for s, t in product(sigmas, taus):
        if len(subgroup_generated(G, (s, t))) != G.order:
            continue
        if dedup:
            canon = min((G.conj(g, s), G.conj(g, t)) for g in G.elements)
            if canon != (s, t):
                continue
        out.append(QuotientMap(SourceModel.FREE_PROD_Z2_Z3, (s, t), G))
    return out


def _mat_mul_mod(a, b, p):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) % p for j in range(2))
        for i in range(2)
    )


def _psl_canon(M, p):
    neg = tuple(tuple((-x) % p for x in row) for row in M)
    return min(M, neg)


def psl2_quotient(p: int) -> tuple[FiniteGroup, QuotientMap]:
    """Reduction PSL_2(Z) -> PSL_2(F_p) as a (sigma, tau) quotient.

    sigma = S = [[0,-1],[1,0]] and tau = S R with R = [[1,1],[0,1]], so that
    R = sigma tau and L = sigma tau^2.  Elements are 2x2 tuples mod p, taken
    modulo -I (a no-op for p = 2, where PSL_2(F_2) = SL_2(F_2) = S_3).
    """
    S = ((0, p - 1), (1, 0))
    R = ((1, 1), (0, 1))
    T = _mat_mul_mod(S, R, p)
    eye = ((1, 0), (0, 1))

    def op(a, b):
        return _psl_canon(_mat_mul_mod(a, b, p), p)

    gens = [_psl_canon(S, p), _psl_canon(T, p)]
    elements = [_psl_canon(eye, p)]
    seen = set(elements)
    frontier = list(elements)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = op(x, g)
                if y not in seen:
                    seen.add(y)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    elements.sort()
    G = replace(group_from_operation(elements, op, f"PSL2(F_{p})"),
                element_labels=tuple(elements))
    index = {x: i for i, x in enumerate(elements)}
    q = QuotientMap(SourceModel.FREE_PROD_Z2_Z3, (index[gens[0]], index[gens[1]]), G)
    return G, q

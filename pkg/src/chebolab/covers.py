"""Hilbert ramification data for finite covers described by quotient data.

A knot K in the base has a peripheral torus whose fundamental group is
generated by a commuting meridian/longitude pair.  For a Galois cover with
group G, their images ``mu`` and ``lam`` determine everything:

    I = <mu>            inertia,       e = |I|
    D = <mu, lam>       decomposition, f = |D| / |I|
    g = |G| / |D|       number of components above K

Intermediate covers correspond to subgroups H; the components above K are
the D-orbits on G/H.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import LabError
from .fingroup import (ConjClass, FiniteGroup, is_normal, is_subgroup, normal_subgroups,
                       quotient_group, subgroup_generated)

SWEEP_ORDER_BOUND = 64


@dataclass(frozen=True, eq=False)
class PeripheralImage:
    """Images of the meridian and longitude.  ``lam`` is the longitude."""

    mu: int
    lam: int
    target: FiniteGroup

    def __post_init__(self):
        G = self.target
        for x in (self.mu, self.lam):
            if not 0 <= x < G.order:
                raise LabError("INDEX_OUT_OF_RANGE", f"{x} not in {G.label}")
        if not G.commute(self.mu, self.lam):
            raise LabError("NONCOMMUTING_PERIPHERAL", f"mu={self.mu}, lam={self.lam} in {G.label}")


@dataclass(frozen=True)
class Component:
    component_id: int
    e: int
    f: int
    cosets: tuple[int, ...] = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class SplittingData:
    e: int
    f: int
    g: int
    D: frozenset[int]
    I: frozenset[int]
    frobenius: ConjClass | None
    components: tuple[Component, ...] = ()

    def to_dict(self) -> dict:
        return {
            "e": self.e, "f": self.f, "g": self.g,
            "D": sorted(self.D), "I": sorted(self.I),
            "frobenius": None if self.frobenius is None else list(self.frobenius.members),
            "components": [[c.component_id, c.e, c.f] for c in self.components],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def splitting_data_from_json(text: str) -> SplittingData:
    d = json.loads(text)
    frob = d["frobenius"]
    return SplittingData(
        d["e"], d["f"], d["g"], frozenset(d["D"]), frozenset(d["I"]),
        None if frob is None else ConjClass(min(frob), tuple(frob)),
        tuple(Component(*c) for c in d["components"]),
    )


class InducedLength(str, enum.Enum):
    DECOMP_ORDER = "DECOMP_ORDER"        # |D| * l
    COVERING_DEGREE = "COVERING_DEGREE"  # f * l


def splitting_data(p: PeripheralImage, H=None) -> SplittingData:
    """(e, f, g), D, I and Frobenius for the Galois cover; components for H if given."""
    G = p.target
    I = subgroup_generated(G, [p.mu])
    D = subgroup_generated(G, [p.mu, p.lam])
    e = len(I)
    f = len(D) // e
    g = G.order // len(D)
    frob = G.class_of(p.lam) if e == 1 else None
    comps = subcover_components(p, H) if H is not None else ()
    return SplittingData(e, f, g, D, I, frob, tuple(comps))


def coset_ids(G: FiniteGroup, H) -> np.ndarray:
    """``ids[g]`` labels the left coset gH, numbered by first appearance."""
    H = sorted(H)
    ids = np.full(G.order, -1, dtype=np.int64)
    k = 0
    for g in G.elements:
        if ids[g] < 0:
            ids[G.table[g, H]] = k
            k += 1
    return ids


def _orbits(action: np.ndarray, gens, n: int) -> list[list[int]]:
    """Orbits of the group generated by ``gens`` acting via ``action[g, point]``."""
    seen = np.zeros(n, dtype=bool)
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orbit, frontier = [start], [start]
        seen[start] = True
        while frontier:
            nxt = []
            for pt in frontier:
                for g in gens:
                    q = int(action[g, pt])
                    if not seen[q]:
                        seen[q] = True
                        orbit.append(q)
                        nxt.append(q)
            frontier = nxt
        out.append(sorted(orbit))
    return out


def subcover_components(p: PeripheralImage, H) -> list[Component]:
    """Components above the knot in the cover attached to H.

    They are the D-orbits on G/H; a component's branch index is the size
    of an I-orbit inside it, and its residue degree is the rest.
    """
    G = p.target
    H = frozenset(int(h) for h in H)
    if not is_subgroup(G, H):
        raise LabError("NOT_A_SUBGROUP")
    ids = coset_ids(G, H)
    n = G.order // len(H)
    reps = np.array([int(np.argmax(ids == c)) for c in range(n)])
    # action[g, c] = coset of g * rep_c
    action = ids[G.table[:, reps]]
    out = []
    for i, orbit in enumerate(_orbits(action, [p.mu, p.lam], n)):
        e_i = _orbit_size(action, p.mu, orbit[0])
        out.append(Component(i, e_i, len(orbit) // e_i, tuple(orbit)))
    return out


def _orbit_size(action: np.ndarray, g: int, start: int) -> int:
    k, pt = 1, int(action[g, start])
    while pt != start:
        pt = int(action[g, pt])
        k += 1
    return k


def is_totally_split(p: PeripheralImage) -> bool:
    return p.mu == p.target.identity and p.lam == p.target.identity


def induced_length(ell: float, data: SplittingData, convention=InducedLength.DECOMP_ORDER) -> float:
    """Length of a component above a knot of length ``ell``."""
    convention = InducedLength(convention)
    if convention is InducedLength.DECOMP_ORDER:
        return len(data.D) * ell
    return data.f * ell


def compositum(G: FiniteGroup, N1, N2) -> frozenset[int]:
    """The normal subgroup of the compositum of the covers for N1 and N2."""
    N1, N2 = frozenset(N1), frozenset(N2)
    if not (is_normal(G, N1) and is_normal(G, N2)):
        raise LabError("NOT_NORMAL")
    out = N1 & N2
    assert is_normal(G, out)
    return out


def split_class_set(G: FiniteGroup, N) -> frozenset[ConjClass]:
    """Classes whose knots split completely in the cover G/N, i.e. classes inside N."""
    N = frozenset(N)
    if not is_normal(G, N):
        raise LabError("NOT_NORMAL")
    return frozenset(C for C in G.classes if N.issuperset(C.members))


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepRow:
    group: str
    subgroup_a: tuple[int, ...]
    subgroup_b: tuple[int, ...]
    distinguished: bool


@dataclass(frozen=True)
class SweepReport:
    order_bound: int
    groups: tuple[str, ...]
    rows: tuple[SweepRow, ...]

    @property
    def counterexamples(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.distinguished]

    def summary(self) -> str:
        n = len(self.counterexamples)
        return (f"{n} counterexamples over {len(self.groups)} groups, "
                f"{len(self.rows)} normal-subgroup pairs, order <= {self.order_bound}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["group", "subgroup_a", "subgroup_b", "verdict"])
        for r in self.rows:
            w.writerow([r.group, " ".join(map(str, r.subgroup_a)), " ".join(map(str, r.subgroup_b)),
                        "distinguished" if r.distinguished else "COUNTEREXAMPLE"])
        return buf.getvalue()


def sweep_report_from_csv(text: str, order_bound: int) -> SweepReport:
    rows = []
    groups = []
    for rec in csv.DictReader(io.StringIO(text)):
        if rec["group"] not in groups:
            groups.append(rec["group"])
        rows.append(SweepRow(rec["group"], tuple(int(x) for x in rec["subgroup_a"].split()),
                             tuple(int(x) for x in rec["subgroup_b"].split()),
                             rec["verdict"] == "distinguished"))
    return SweepReport(order_bound, tuple(groups), tuple(rows))


def _rigidity_rows(G: FiniteGroup) -> list[SweepRow]:
    normals = normal_subgroups(G)
    sets = [split_class_set(G, N) for N in normals]
    return [SweepRow(G.label, tuple(sorted(normals[i])), tuple(sorted(normals[j])), sets[i] != sets[j])
            for i, j in combinations(range(len(normals)), 2)]


def split_rigidity_sweep(order_bound: int = 16, groups=None, workers: int = 1) -> SweepReport:
    """Check that distinct normal subgroups have distinct split-class sets."""
    if order_bound > SWEEP_ORDER_BOUND:
        raise LabError("GROUP_TOO_LARGE", f"order bound {order_bound} > {SWEEP_ORDER_BOUND}")
    if groups is None:
        from .grouplib import library
        groups = library(max(order_bound, 1))
    groups = [G for G in groups if G.order <= order_bound]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            chunks = list(ex.map(_rigidity_rows, groups))
    else:
        chunks = [_rigidity_rows(G) for G in groups]
    rows = tuple(r for chunk in chunks for r in chunk)
    return SweepReport(order_bound, tuple(G.label for G in groups), rows)


def commuting_pairs(G: FiniteGroup) -> np.ndarray:
    """All (mu, lam) with mu lam = lam mu, as an (k, 2) array."""
    mu, lam = np.nonzero(G.table == G.table.T)
    return np.stack([mu, lam], axis=1)


def residue_degree(G: FiniteGroup, mu: int, lam: int) -> int:
    return len(subgroup_generated(G, [mu, lam])) // len(subgroup_generated(G, [mu]))


@dataclass(frozen=True)
class TowerDegrees:
    total: int         # f for the cover with group G
    base: int          # f for the cover with group G/N
    intermediate: int  # f for the cover with group N above the G/N level

    @property
    def ok(self) -> bool:
        return self.total == self.base * self.intermediate


def tower_degrees(G: FiniteGroup, N, p: PeripheralImage, quotient=None) -> TowerDegrees:
    """Residue degrees along the tower M_G -> M_{G/N} -> base.

    ``quotient`` may pass a precomputed ``quotient_group(G, N)``.
    """
    N = frozenset(N)
    Q, proj = quotient if quotient is not None else quotient_group(G, N)
    total = residue_degree(G, p.mu, p.lam)
    base = residue_degree(Q, int(proj[p.mu]), int(proj[p.lam]))
    D = subgroup_generated(G, [p.mu, p.lam])
    I = subgroup_generated(G, [p.mu])
    inter = len(D & N) // len(I & N)
    return TowerDegrees(total, base, inter)


def multiplicativity_check(G: FiniteGroup, N, p: PeripheralImage, quotient=None) -> bool:
    return tower_degrees(G, N, p, quotient).ok

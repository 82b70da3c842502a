"""The two planetary link families and their Frobenius data.

* Cat-map orbits: periodic orbits of a hyperbolic toral automorphism A,
  which are closed orbits of the suspension flow on the mapping torus with
  fundamental group Z^2 x|_A Z.  The orbit of x with A^nu x = x + v (for a
  lift of x to R^2) has conjugacy class (v, nu).
* Modular geodesics: primitive hyperbolic conjugacy classes in PSL_2(Z),
  encoded as cyclic positive words in R = [[1,1],[0,1]], L = [[1,0],[1,1]].
"""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .errors import LabError
from .fingroup import ConjClass, QuotientMap, SourceModel

CAT_MATRIX = ((2, 1), (1, 1))
_INT64_SAFE = 1 << 62


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class CatOrbit:
    period: int
    base_point: tuple[Fraction, Fraction]
    translation: tuple[int, int]
    primitive: bool = True
    index: int = -1
    length: float | None = None

    @property
    def family(self):
        return "cat"


@dataclass(frozen=True)
class GeodesicClass:
    """A cyclic word R^{a1} L^{b1} ... R^{ak} L^{bk}, stored as [a1, b1, ...]."""

    word: tuple[int, ...]
    trace: int
    geo_length: float
    index: int = -1

    @property
    def family(self):
        return "modular"

    @property
    def letter_count(self) -> int:
        return sum(self.word)

    def word_string(self) -> str:
        return "".join(("R" if i % 2 == 0 else "L") * a for i, a in enumerate(self.word))


class LengthScheme(str, enum.Enum):
    PRIME_NUMBER = "PRIME_NUMBER"
    GEOMETRIC = "GEOMETRIC"


@dataclass(frozen=True, eq=False)
class LengthAssignment:
    """Lengths and norms N = e^length, indexed by knot position.

    ``norms`` may be passed explicitly when they are known exactly (the
    primes, for PRIME_NUMBER); otherwise they are e^length.
    """

    scheme: LengthScheme
    lengths: np.ndarray
    norms: np.ndarray | None = None

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=np.float64)
        if lengths.size and not (lengths > 0).all():
            raise LabError("BAD_LENGTHS", "lengths must be positive")
        norms = np.exp(lengths) if self.norms is None else np.asarray(self.norms, dtype=np.float64)
        if norms.shape != lengths.shape or not np.allclose(np.log(norms), lengths, rtol=1e-12, atol=0):
            raise LabError("BAD_LENGTHS", "norms inconsistent with lengths")
        object.__setattr__(self, "scheme", LengthScheme(self.scheme))
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "norms", norms)

    def __len__(self):
        return len(self.lengths)


# --------------------------------------------------------------------------
# cat map


def _check_anosov(A) -> np.ndarray:
    A = np.asarray(A, dtype=object)
    if A.shape != (2, 2):
        raise LabError("BAD_MATRIX", "A must be 2x2")
    if A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0] != 1:
        raise LabError("BAD_MATRIX", "det(A) must be 1")
    if abs(A[0, 0] + A[1, 1]) <= 2:
        raise LabError("NOT_ANOSOV", f"|trace| = {abs(A[0, 0] + A[1, 1])} <= 2")
    return A


def _mat_pow(A: np.ndarray, n: int) -> np.ndarray:
    """Exact power of a 2x2 object-dtype matrix."""
    result = np.array([[1, 0], [0, 1]], dtype=object)
    base = A.copy()
    while n:
        if n & 1:
            result = result.dot(base)
        base = base.dot(base)
        n >>= 1
    return result


def _fixed_point_grid(A: np.ndarray, nu: int) -> tuple[np.ndarray, int]:
    """Fixed points of A^nu on the torus as integer rows y with x = y / den.

    Uses the Smith form U B V = diag(d1, d2) of B = A^nu - I: the fixed
    points are B^-1 Z^2 / Z^2 = V diag(1/d1, 1/d2) Z^2 / Z^2.
    """
    B = _mat_pow(A, nu) - np.array([[1, 0], [0, 1]], dtype=object)
    D, _, V = smith_normal_decomp(DomainMatrix([[ZZ(int(x)) for x in row] for row in B], (2, 2), ZZ))
    d1, d2 = abs(int(D[0, 0].element)), abs(int(D[1, 1].element))
    den = d2
    Vm = np.array([[int(V[i, j].element) % den for j in range(2)] for i in range(2)], dtype=np.int64)
    i = np.arange(d1, dtype=np.int64) * (d2 // d1)
    j = np.arange(d2, dtype=np.int64)
    I, J = np.meshgrid(i, j, indexing="ij")
    coords = np.stack([I.ravel(), J.ravel()])                 # (2, d1*d2)
    Y = (Vm @ coords) % den
    return Y.T.copy(), den


def cat_fixed_points(A, nu: int) -> list[tuple[Fraction, Fraction]]:
    """All torus points fixed by A^nu, exactly, sorted lexicographically."""
    A = _check_anosov(A)
    if nu < 1:
        raise LabError("BAD_PERIOD", f"nu = {nu}")
    Y, den = _fixed_point_grid(A, nu)
    pts = sorted({(int(a), int(b)) for a, b in Y})
    return [(Fraction(a, den), Fraction(b, den)) for a, b in pts]


@dataclass(frozen=True, eq=False)
class CatOrbitTable:
    """Column-oriented primitive orbit data, in the fixed knot order.

    ``base_num[k] / base_den[k]`` is the lexicographically least orbit point
    and ``translation[k] = A^period x - x`` for its lift in [0, 1)^2.
    """

    matrix: tuple
    period: np.ndarray
    base_num: np.ndarray
    base_den: np.ndarray
    translation: np.ndarray

    def __len__(self):
        return len(self.period)

    def orbit(self, k: int) -> CatOrbit:
        den = int(self.base_den[k])
        bp = (Fraction(int(self.base_num[k, 0]), den), Fraction(int(self.base_num[k, 1]), den))
        return CatOrbit(int(self.period[k]), bp,
                        (int(self.translation[k, 0]), int(self.translation[k, 1])), True, k)

    def __iter__(self) -> Iterator[CatOrbit]:
        return (self.orbit(k) for k in range(len(self)))

    def fixed_point_counts(self) -> dict[int, int]:
        """#Fix(A^nu) rebuilt from primitive orbit counts (origin included)."""
        counts = np.bincount(self.period)
        nmax = len(counts) - 1
        out = {}
        for nu in range(1, nmax + 1):
            total = sum(d * int(counts[d]) for d in range(1, nu + 1) if nu % d == 0)
            origin_here = 0 if self._has_origin else 1
            out[nu] = total + origin_here
        return out

    @property
    def _has_origin(self) -> bool:
        return bool(len(self) and self.period[0] == 1 and not self.base_num[0].any())


def _primitive_orbits_of_period(A: np.ndarray, nu: int):
    Y0, den = _fixed_point_grid(A, nu)
    An = _mat_pow(A, nu)
    A64 = np.array(A.tolist(), dtype=np.int64) % den
    key0 = Y0[:, 0] * den + Y0[:, 1]
    minkey = key0.copy()
    primitive = np.ones(len(Y0), dtype=bool)
    cur = Y0
    for _ in range(1, nu):
        cur = (cur @ A64.T) % den
        primitive &= (cur != Y0).any(axis=1)
        np.minimum(minkey, cur[:, 0] * den + cur[:, 1], out=minkey)
    keep = primitive & (key0 == minkey)
    Y = Y0[keep]
    Y = Y[np.lexsort((Y[:, 1], Y[:, 0]))]
    bound = int(max(abs(int(x)) for x in An.ravel())) * den * 4
    if bound < _INT64_SAFE:
        An64 = np.array(An.tolist(), dtype=np.int64)
        moved = Y @ An64.T - Y
    else:
        moved = Y.astype(object).dot(An.T) - Y.astype(object)
    assert not (moved % den).any()
    trans = (moved // den).astype(np.int64)
    return Y, den, trans


def cat_orbit_table(A=CAT_MATRIX, nu_max: int = 8, include_origin: bool = False,
                    workers: int = 1) -> CatOrbitTable:
    """Primitive periodic orbits of period <= nu_max, ordered by (period, base point)."""
    A = _check_anosov(A)
    periods = list(range(1, nu_max + 1))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda n: _primitive_orbits_of_period(A, n), periods))
    else:
        parts = [_primitive_orbits_of_period(A, n) for n in periods]
    P, NUM, DEN, TR = [], [], [], []
    for nu, (Y, den, trans) in zip(periods, parts):
        if not include_origin:
            origin = ~Y.any(axis=1)
            Y, trans = Y[~origin], trans[~origin]
        P.append(np.full(len(Y), nu, dtype=np.int64))
        NUM.append(Y)
        DEN.append(np.full(len(Y), den, dtype=np.int64))
        TR.append(trans)
    return CatOrbitTable(
        tuple(tuple(int(x) for x in row) for row in A.tolist()),
        np.concatenate(P) if P else np.zeros(0, np.int64),
        np.concatenate(NUM) if NUM else np.zeros((0, 2), np.int64),
        np.concatenate(DEN) if DEN else np.zeros(0, np.int64),
        np.concatenate(TR) if TR else np.zeros((0, 2), np.int64),
    )


def cat_primitive_orbits(A=CAT_MATRIX, nu_max: int = 8, include_origin: bool = False) -> list[CatOrbit]:
    return list(cat_orbit_table(A, nu_max, include_origin))


# --------------------------------------------------------------------------
# modular geodesics


def _lyndon_words(n: int) -> Iterator[tuple[int, ...]]:
    """Duval's algorithm: binary Lyndon words of length 1..n in lex order."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < n:
            w.append(w[len(w) - m])
        while w and w[-1] == 1:
            w.pop()


def _letters_to_exponents(letters: Sequence[int]) -> tuple[int, ...]:
    out, prev = [], None
    for ch in letters:
        if ch == prev:
            out[-1] += 1
        else:
            out.append(1)
            prev = ch
    return tuple(out)


def word_matrix(word: Sequence[int]) -> tuple[int, int, int, int]:
    """R^{a1} L^{b1} ... as an exact integer matrix (a, b, c, d)."""
    a, b, c, d = 1, 0, 0, 1
    for i, e in enumerate(word):
        if i % 2 == 0:   # times [[1, e], [0, 1]]
            b, d = a * e + b, c * e + d
        else:            # times [[1, 0], [e, 1]]
            a, c = a + b * e, c + d * e
    return a, b, c, d


def word_trace(word: Sequence[int]) -> int:
    a, _, _, d = word_matrix(word)
    return a + d


def geodesic_length(trace: int) -> float:
    return 2.0 * math.acosh(trace / 2.0)


def modular_geodesics(max_word_length: int) -> list[GeodesicClass]:
    """Primitive hyperbolic classes with at most ``max_word_length`` letters.

    Each class is represented by its Lyndon word with R < L, which starts
    with R and ends with L.
    """
    if max_word_length < 2:
        raise LabError("BAD_LENGTH", "max_word_length must be >= 2")
    out = []
    for w in _lyndon_words(max_word_length):
        if len(w) < 2:
            continue
        exps = _letters_to_exponents(w)
        tr = word_trace(exps)
        out.append(GeodesicClass(exps, tr, geodesic_length(tr)))
    return order_knots(out)


def rademacher(word: Sequence[int]) -> int:
    """Exponent sum of R minus exponent sum of L."""
    word = getattr(word, "word", word)
    return sum(word[0::2]) - sum(word[1::2])


# --------------------------------------------------------------------------
# ordering and lengths


def _sort_key(k):
    if isinstance(k, CatOrbit):
        return (0, k.period, k.base_point)
    return (1, k.letter_count, k.trace, k.word_string())


def order_knots(orbits: Iterable) -> list:
    """Deterministic total order; each knot is re-stamped with its position."""
    ordered = sorted(orbits, key=_sort_key)
    out = []
    for i, k in enumerate(ordered):
        if isinstance(k, CatOrbit):
            out.append(CatOrbit(k.period, k.base_point, k.translation, k.primitive, i, k.length))
        else:
            out.append(GeodesicClass(k.word, k.trace, k.geo_length, i))
    return out


def first_primes(n: int) -> np.ndarray:
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    limit = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 3
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    primes = np.nonzero(sieve)[0]
    assert len(primes) >= n
    return primes[:n].astype(np.int64)


def anosov_eigenvalue(A=CAT_MATRIX) -> float:
    t = abs(A[0][0] + A[1][1])
    return (t + math.sqrt(t * t - 4)) / 2


def assign_lengths(orbits, scheme=LengthScheme.PRIME_NUMBER, matrix=CAT_MATRIX) -> LengthAssignment:
    """Lengths in knot order: ln(p_i) or the geometric length of each orbit.

    ``orbits`` may be a list of knots or a :class:`CatOrbitTable`.
    """
    scheme = LengthScheme(scheme)
    n = len(orbits)
    if scheme is LengthScheme.PRIME_NUMBER:
        primes = first_primes(n).astype(np.float64)
        return LengthAssignment(scheme, np.log(primes), primes)
    if isinstance(orbits, CatOrbitTable):
        return LengthAssignment(scheme, orbits.period * math.log(anosov_eigenvalue(orbits.matrix)))
    lam = math.log(anosov_eigenvalue(matrix))
    lengths = [k.period * lam if isinstance(k, CatOrbit) else k.geo_length for k in orbits]
    return LengthAssignment(scheme, np.array(lengths, dtype=np.float64))


# --------------------------------------------------------------------------
# Frobenius classes


def _power_table(G, x) -> np.ndarray:
    pw = [G.identity]
    cur = G.mul(G.identity, x)
    while cur != G.identity:
        pw.append(cur)
        cur = G.mul(cur, x)
    return np.array(pw, dtype=np.int64)


def cat_images(period, translation, q: QuotientMap) -> np.ndarray:
    """Vectorised image of (v, nu) = x^{v0} y^{v1} t^{nu} under ``q``."""
    if SourceModel(q.source_model) is not SourceModel.SEMIDIRECT_Z2_Z:
        raise LabError("MODEL_MISMATCH", "cat orbits need a SEMIDIRECT_Z2_Z quotient")
    G = q.target
    x, y, t = q.generator_images
    px, py, pt = _power_table(G, x), _power_table(G, y), _power_table(G, t)
    translation = np.asarray(translation, dtype=np.int64).reshape(-1, 2)
    period = np.asarray(period, dtype=np.int64).reshape(-1)
    gx = px[translation[:, 0] % len(px)]
    gy = py[translation[:, 1] % len(py)]
    gt = pt[period % len(pt)]
    return G.table[G.table[gx, gy], gt]


def modular_generator_images(q: QuotientMap) -> tuple[int, int]:
    """(rho(R), rho(L)) from (sigma, tau), using R = sigma tau, L = sigma tau^2."""
    if SourceModel(q.source_model) is not SourceModel.FREE_PROD_Z2_Z3:
        raise LabError("MODEL_MISMATCH", "geodesics need a FREE_PROD_Z2_Z3 quotient")
    G = q.target
    s, t = q.generator_images
    return G.mul(s, t), G.mul(s, G.mul(t, t))


def word_image(word: Sequence[int], G, rho_R: int, rho_L: int) -> int:
    g = G.identity
    for i, e in enumerate(word):
        g = G.mul(g, G.power(rho_R if i % 2 == 0 else rho_L, e))
    return g


def frobenius_element(orbit, q: QuotientMap) -> int:
    if isinstance(orbit, CatOrbit):
        return int(cat_images(orbit.period, orbit.translation, q)[0])
    if isinstance(orbit, GeodesicClass):
        rR, rL = modular_generator_images(q)
        return word_image(orbit.word, q.target, rR, rL)
    raise LabError("MODEL_MISMATCH", f"unknown knot type {type(orbit).__name__}")


def frobenius_class(orbit, q: QuotientMap) -> ConjClass:
    return q.target.class_of(frobenius_element(orbit, q))


def frobenius_class_indices(knots, q: QuotientMap) -> np.ndarray:
    """Class position (into ``q.target.classes``) for every knot, in order."""
    G = q.target
    if isinstance(knots, CatOrbitTable):
        return G.class_index[cat_images(knots.period, knots.translation, q)]
    knots = list(knots)
    if knots and isinstance(knots[0], GeodesicClass):
        rR, rL = modular_generator_images(q)
        return np.array([G.class_index[word_image(k.word, G, rR, rL)] for k in knots], dtype=np.int64)
    return np.array([G.class_index[frobenius_element(k, q)] for k in knots], dtype=np.int64)


# --------------------------------------------------------------------------
# JSON-lines interchange


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def knots_to_jsonl(knots, lengths_prime=None, lengths_geometric=None) -> str:
    knots = list(knots)
    lines = []
    for i, k in enumerate(knots):
        lp = None if lengths_prime is None else float(lengths_prime[i])
        lg = None if lengths_geometric is None else float(lengths_geometric[i])
        if isinstance(k, CatOrbit):
            rec = {"family": "cat", "index": k.index, "period_or_word": k.period,
                   "translation_or_trace": list(k.translation),
                   "length_prime": lp, "length_geometric": lg,
                   "base_point": [_frac(c) for c in k.base_point]}
        else:
            rec = {"family": "modular", "index": k.index, "period_or_word": list(k.word),
                   "translation_or_trace": k.trace,
                   "length_prime": lp, "length_geometric": lg}
        lines.append(json.dumps(rec, sort_keys=True))
    return "".join(line + "\n" for line in lines)


def knots_from_jsonl(text: str) -> list:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LabError("CONFIG_INVALID", f"bad JSON line: {exc}") from None
        if "summary" in rec:
            continue
        if rec.get("family") == "cat":
            bp = tuple(Fraction(s) for s in rec.get("base_point", ["0", "0"]))
            out.append(CatOrbit(int(rec["period_or_word"]), bp,
                                tuple(int(v) for v in rec["translation_or_trace"]),
                                True, int(rec["index"]), rec.get("length_prime")))
        elif rec.get("family") == "modular":
            word = tuple(int(v) for v in rec["period_or_word"])
            tr = int(rec["translation_or_trace"])
            if word_trace(word) != tr:
                raise LabError("CONFIG_INVALID", f"trace mismatch for word {word}")
            out.append(GeodesicClass(word, tr, geodesic_length(tr), int(rec["index"])))
        else:
            raise LabError("CONFIG_INVALID", f"unknown family {rec.get('family')!r}")
    return out

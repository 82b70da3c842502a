"""Abelianized local-global checks over F_p.

A link with linking matrix Lambda has H^1(complement, F_p) = F_p^n, with
phi_i the value on the meridian of component i.  Restricting phi to the
peripheral torus of component i gives the pair

    (phi(mu_i), phi(lambda_i)) = (phi_i, (Lambda phi)_i)

since the 0-framed longitude is homologous to sum_j lk(K_i, K_j) mu_j.
The local pairing on such pairs is a1*b2 - b1*a2.

Only this finite, trivial-coefficient shadow is computed here; the
profinite statements it mirrors are not finitely checkable.

Component indices are 0-based throughout.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import numpy as np
from sympy import isprime

from .errors import LabError

REPORT_SCOPE = "abelianized F_p shadow (trivial coefficients, finite truncation)"


@dataclass(frozen=True, eq=False)
class LinkingMatrix:
    """Symmetric integer matrix with zero diagonal.

    ``unchecked=True`` skips validation; it exists so tests can feed a
    deliberately broken matrix to the reciprocity check.
    """

    entries: np.ndarray
    unchecked: bool = field(default=False, repr=False)

    def __post_init__(self):
        M = np.asarray(self.entries, dtype=np.int64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise LabError("BAD_LINKING", f"expected a square matrix, got shape {M.shape}")
        if not self.unchecked:
            if not np.array_equal(M, M.T):
                raise LabError("BAD_LINKING", "linking matrix must be symmetric")
            if np.any(np.diag(M) != 0):
                raise LabError("BAD_LINKING", "diagonal must be zero (0-framed longitudes)")
        object.__setattr__(self, "entries", M)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class LocalPair:
    """Values of a cochain on (meridian, longitude)."""

    a: int
    b: int


def local_pairing(x: LocalPair, y: LocalPair, p: int) -> int:
    return (x.a * y.b - x.b * y.a) % p


# --------------------------------------------------------------------------
# linear algebra over F_p


def _check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
        raise LabError("NOT_PRIME", f"p = {p}")
    return int(p)


def row_reduce_mod_p(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        A = (A - np.outer(col, A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(M, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(row_reduce_mod_p(M, _check_prime(p))[1])


def kernel_mod_p(M, p: int) -> np.ndarray:
    """Basis of the right kernel over F_p, one vector per row."""
    p = _check_prime(p)
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = row_reduce_mod_p(M, p)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-R[i, fc]) % p
    return basis


# --------------------------------------------------------------------------
# restriction maps


def _indices(S: Iterable[int], n: int) -> list[int]:
    S = sorted({int(i) for i in S})
    if S and (S[0] < 0 or S[-1] >= n):
        raise LabError("INDEX_OUT_OF_RANGE", f"indices must lie in 0..{n - 1}")
    return S


def restriction_map(L: LinkingMatrix, p: int, S: Iterable[int]) -> np.ndarray:
    """The 2|S| x n matrix phi -> (phi_i, (Lambda phi)_i) for i in S, mod p.

    Rows come in pairs: meridian row e_i, then longitude row Lambda_i.
    """
    p = _check_prime(p)
    S = _indices(S, L.n)
    out = np.zeros((2 * len(S), L.n), dtype=np.int64)
    for k, i in enumerate(S):
        out[2 * k, i] = 1
        out[2 * k + 1] = L.entries[i]
    return out % p


def injectivity_check(L: LinkingMatrix, p: int, excluded: Iterable[int] = ()) -> int:
    """Kernel dimension of the restriction to every component not excluded."""
    excluded = set(_indices(excluded, L.n))
    S = [i for i in range(L.n) if i not in excluded]
    return L.n - rank_mod_p(restriction_map(L, p, S), p)


def surjectivity_check(L: LinkingMatrix, p: int, S: Iterable[int]) -> tuple[bool, int]:
    """Whether restriction onto the components in S is onto, and its rank."""
    S = _indices(S, L.n)
    R = restriction_map(L, p, S)
    rank = rank_mod_p(R, p)
    return rank == 2 * len(S), rank


@dataclass(frozen=True)
class ReciprocityReport:
    p: int
    n: int
    trials: int
    seed: int
    violations: int
    route_disagreements: int

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.route_disagreements == 0


def reciprocity_check(L: LinkingMatrix, p: int, trials: int = 100, seed: int = 0) -> ReciprocityReport:
    """Sum of local pairings of res(phi), res(psi) over all components.

    Computed twice: componentwise from the restriction maps, and as the
    bilinear form phi^T Lambda psi - psi^T Lambda phi.
    """
    p = _check_prime(p)
    if trials < 1:
        raise LabError("BAD_TRIALS", "trials must be >= 1")
    rng = np.random.default_rng(seed)
    R = restriction_map(L, p, range(L.n))
    M = L.entries % p
    violations = disagreements = 0
    for _ in range(trials):
        phi = rng.integers(0, p, L.n)
        psi = rng.integers(0, p, L.n)
        rphi, rpsi = (R @ phi) % p, (R @ psi) % p
        local = sum(local_pairing(LocalPair(int(rphi[2 * i]), int(rphi[2 * i + 1])),
                                  LocalPair(int(rpsi[2 * i]), int(rpsi[2 * i + 1])), p)
                    for i in range(L.n)) % p
        bilinear = int(phi @ M @ psi - psi @ M @ phi) % p
        violations += local != 0
        disagreements += local != bilinear
    return ReciprocityReport(p, L.n, trials, seed, violations, disagreements)


@dataclass(frozen=True)
class UnramifiedReport:
    p: int
    h1_size: int
    unramified_size: int
    complement_size: int
    self_orthogonal: bool
    complement_equal: bool

    @property
    def ok(self) -> bool:
        return (self.self_orthogonal and self.complement_equal
                and self.h1_size == self.p ** 2 and self.unramified_size == self.p)


def unramified_orthogonality(p: int) -> UnramifiedReport:
    """Exhaustive check that the line {a = 0} in F_p^2 is its own orthogonal complement."""
    p = _check_prime(p)
    h1 = [LocalPair(a, b) for a, b in product(range(p), repeat=2)]
    ur = [x for x in h1 if x.a == 0]
    self_orth = all(local_pairing(x, y, p) == 0 for x in ur for y in ur)
    complement = [x for x in h1 if all(local_pairing(x, y, p) == 0 for y in ur)]
    return UnramifiedReport(p, len(h1), len(ur), len(complement), self_orth, set(complement) == set(ur))


# --------------------------------------------------------------------------
# linking statistics


def linking_mod_distribution(values, n: int) -> np.ndarray:
    """Residue frequencies of integer values mod n."""
    if n < 1:
        raise LabError("BAD_MODULUS", f"n = {n}")
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        raise LabError("EMPTY_STREAM")
    return np.bincount(v % n, minlength=n) / v.size


def synthetic_linking_model(n: int, bound: int, seed: int) -> LinkingMatrix:
    """Symmetric zero-diagonal matrix with off-diagonal entries uniform in [-bound, bound]."""
    if n < 1 or bound < 1:
        raise LabError("CONFIG_INVALID", "need n >= 1 and bound >= 1")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.integers(-bound, bound + 1, (n, n)), k=1)
    return LinkingMatrix(upper + upper.T)


def linking_to_csv(L: LinkingMatrix) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(L.entries.tolist())
    return buf.getvalue()


def linking_from_csv(text: str) -> LinkingMatrix:
    rows = [[int(x) for x in r] for r in csv.reader(io.StringIO(text)) if r]
    return LinkingMatrix(np.array(rows, dtype=np.int64).reshape(len(rows), -1))


# --------------------------------------------------------------------------
# seeded experiments


@dataclass(frozen=True)
class LocalGlobalExperiment:
    seed: int
    p: int
    n: int
    bound: int
    s_size: int
    control: bool
    S: tuple[tuple[int, ...], ...]
    rank: tuple[int, ...]
    kernel: tuple[int, ...]
    threshold: float

    @property
    def surjective_rate(self) -> float:
        return float(np.mean([r == 2 * self.s_size for r in self.rank]))

    @property
    def injective_rate(self) -> float:
        return float(np.mean([k == 0 for k in self.kernel]))

    @property
    def verdict(self) -> str:
        if self.control:
            return "PASS" if self.surjective_rate == 0.0 else "FAIL"
        ok = self.surjective_rate >= self.threshold and self.injective_rate == 1.0
        return "PASS" if ok else "FAIL"

    def to_dict(self) -> dict:
        return {
            "scope": REPORT_SCOPE,
            "seed": self.seed, "p": self.p, "n": self.n, "bound": self.bound,
            "control": self.control, "threshold": self.threshold,
            "S": [list(s) for s in self.S], "rank": list(self.rank), "kernel": list(self.kernel),
            "surjective_rate": self.surjective_rate, "injective_rate": self.injective_rate,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def local_global_experiment(n: int = 50, bound: int = 10, p: int = 3, s_size: int = 3,
                            trials: int = 200, seed: int = 0, control: bool = False,
                            threshold: float = 0.9) -> LocalGlobalExperiment:
    """Seeded surjectivity/injectivity trials on random linking matrices.

    Each trial draws a fresh matrix (the zero matrix if ``control``), a
    random set S of ``s_size`` components for surjectivity, and an equally
    large excluded set for injectivity.
    """
    p = _check_prime(p)
    if s_size > n:
        raise LabError("CONFIG_INVALID", "s_size exceeds n")
    rng = np.random.default_rng(seed)
    Ss, ranks, kernels = [], [], []
    for _ in range(trials):
        if control:
            L = LinkingMatrix(np.zeros((n, n), dtype=np.int64))
        else:
            L = synthetic_linking_model(n, bound, int(rng.integers(2**63 - 1)))
        S = tuple(sorted(int(i) for i in rng.choice(n, s_size, replace=False)))
        excluded = rng.choice(n, s_size, replace=False)
        Ss.append(S)
        ranks.append(surjectivity_check(L, p, S)[1])
        kernels.append(injectivity_check(L, p, excluded))
    return LocalGlobalExperiment(seed, p, n, bound, s_size, control, tuple(Ss), tuple(ranks),
                                 tuple(kernels), threshold)

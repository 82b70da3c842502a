"""Counting functions, zeta partial products and density estimators.

Knot streams are handled as integer *tag* arrays: ``tags[j]`` is the
position of the Frobenius class of knot j in ``G.classes``.  Helpers accept
sequences of :class:`~chebolab.fingroup.ConjClass` (or ``(index, class)``
pairs) as well and convert them.

All long sums go through :func:`math.fsum`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import LabError
from .fingroup import ConjClass, FiniteGroup
from .orbitgen import LengthAssignment

DEFAULT_S_GRID = (1.2, 1.1, 1.05, 1.02)
DEFAULT_TOLERANCE = 0.05


def _membership(stream, C) -> np.ndarray:
    """Boolean mask ``stream[j] == C`` for tag arrays or ConjClass sequences."""
    if isinstance(stream, np.ndarray) and stream.dtype != object:
        if isinstance(C, ConjClass):
            raise LabError("MISMATCHED_CLASSES", "tag arrays need an integer class position")
        return stream == C
    items = list(stream)
    if items and isinstance(items[0], tuple):
        items = [c for _, c in items]
    return np.array([c == C for c in items], dtype=bool)


def natural_density(stream, C, skip_first: int = 0) -> np.ndarray:
    """Running frequencies f(nu) = #{n < j <= nu : class_j = C} / nu, nu = 1..len."""
    mask = _membership(stream, C)
    if mask.size == 0:
        raise LabError("EMPTY_STREAM")
    if skip_first < 0:
        raise LabError("BAD_SKIP", f"skip_first = {skip_first}")
    hits = mask.astype(np.int64)
    hits[:skip_first] = 0
    return np.cumsum(hits) / np.arange(1, mask.size + 1)


# --------------------------------------------------------------------------
# counting functions


@dataclass(frozen=True, eq=False)
class CountingFunctions:
    """Step functions pi, pi_C, theta, psi, psi_C of a truncated knot set."""

    norms: np.ndarray      # ascending
    lengths: np.ndarray
    tags: np.ndarray | None = None

    def _select(self, C):
        if C is None:
            return self.norms, self.lengths
        if self.tags is None:
            raise LabError("MISMATCHED_CLASSES", "no class tags attached")
        m = self.tags == C
        return self.norms[m], self.lengths[m]

    def pi(self, x, C=None):
        norms, _ = self._select(C)
        return np.searchsorted(norms, np.asarray(x, dtype=np.float64), side="right")

    def theta(self, x, C=None):
        norms, lengths = self._select(C)
        csum = np.concatenate([[0.0], np.cumsum(lengths)])
        return csum[np.searchsorted(norms, np.asarray(x, dtype=np.float64), side="right")]

    def psi(self, x, C=None):
        """sum_i l_i * #{n >= 1 : N_i^n <= x}."""
        norms, lengths = self._select(C)
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.empty(xs.shape)
        for k, xv in enumerate(xs):
            if xv < 1 or norms.size == 0:
                out[k] = 0.0
                continue
            n = np.floor(math.log(xv) / lengths)
            # fix floating error at exact prime powers
            n += (np.power(norms, n + 1) <= xv)
            n -= (np.power(norms, n) > xv) & (n > 0)
            out[k] = math.fsum(lengths * n)
        return out if np.ndim(x) else float(out[0])


def counting_functions(assignment: LengthAssignment, tags=None) -> CountingFunctions:
    order = np.argsort(assignment.norms, kind="stable")
    t = None if tags is None else np.asarray(tags)[order]
    return CountingFunctions(assignment.norms[order], assignment.lengths[order], t)


# --------------------------------------------------------------------------
# zeta functions


def _check_s(s):
    if not s > 1:
        raise LabError("S_OUT_OF_RANGE", f"s = {s} must exceed 1")


def _log_factors(norms: np.ndarray, s: float) -> np.ndarray:
    return -np.log1p(-np.power(norms, -s))


def _truncate(assignment: LengthAssignment, truncation):
    n = len(assignment) if truncation is None else int(truncation)
    if n < 0 or n > len(assignment):
        raise LabError("BAD_TRUNCATION", f"truncation {n} outside 0..{len(assignment)}")
    return n


def log_zeta_partial(assignment: LengthAssignment, s: float, truncation=None, skip_first: int = 0,
                     mask=None) -> float:
    _check_s(s)
    n = _truncate(assignment, truncation)
    norms = assignment.norms[skip_first:n]
    if mask is not None:
        norms = norms[np.asarray(mask)[skip_first:n]]
    return math.fsum(_log_factors(norms, s))


def zeta_partial(assignment: LengthAssignment, s: float, truncation=None, skip_first: int = 0) -> float:
    """prod_{skip_first <= i < truncation} 1 / (1 - N_i^-s)."""
    return math.exp(log_zeta_partial(assignment, s, truncation, skip_first))


def zeta_relative(assignment: LengthAssignment, tags, C, s: float, truncation=None,
                  skip_first: int = 0) -> float:
    """Partial product over knots j >= skip_first whose class is C."""
    mask = _membership(tags, C)
    return math.exp(log_zeta_partial(assignment, s, truncation, skip_first, mask))


def log_derivative(assignment: LengthAssignment, s: float, mask=None) -> float:
    """-zeta'/zeta(s) = sum_i l_i e^{-s l_i} / (1 - e^{-s l_i})."""
    _check_s(s)
    lengths, norms = assignment.lengths, assignment.norms
    if mask is not None:
        lengths, norms = lengths[mask], norms[mask]
    q = np.power(norms, -s)
    return math.fsum(lengths * q / (1 - q))


def mellin_psi(assignment: LengthAssignment, s: float, u_max: float, mask=None) -> float:
    """s * int_1^{e^u_max} psi(x) x^{-s-1} dx, by exact integration of the step function.

    With x = e^u the integrand is psi(e^u) s e^{-s u}; psi is constant between
    consecutive jump points u_j = n * l_i, so each piece integrates in closed
    form.  The tail beyond u_max is omitted.
    """
    _check_s(s)
    lengths = assignment.lengths if mask is None else assignment.lengths[mask]
    jumps, weights = [], []
    for l in lengths:
        n = int(u_max // l)
        if n:
            jumps.append(l * np.arange(1, n + 1))
            weights.append(np.full(n, l))
    if not jumps:
        return 0.0
    u = np.concatenate(jumps)
    w = np.concatenate(weights)
    order = np.argsort(u, kind="stable")
    u, w = u[order], w[order]
    level = np.cumsum(w)                     # psi on [u_k, u_{k+1})
    right = np.append(u[1:], u_max)
    pieces = level * (np.exp(-s * u) - np.exp(-s * right))
    return math.fsum(pieces)


# --------------------------------------------------------------------------
# Dirichlet density


@dataclass(frozen=True)
class DirichletEstimate:
    s_grid: tuple[float, ...]
    ratios: tuple[float, ...]
    extrapolated: float
    diagnostics: dict = field(default_factory=dict)


def _check_grid(s_grid) -> np.ndarray:
    s = np.asarray(s_grid, dtype=np.float64)
    if s.size < 2 or not (s > 1).all() or not (np.diff(s) < 0).all():
        raise LabError("S_OUT_OF_RANGE", "s_grid must be strictly decreasing, > 1, length >= 2")
    return s


def _ratios(norms: np.ndarray, mask: np.ndarray, s_grid: np.ndarray) -> np.ndarray:
    out = []
    for s in s_grid:
        w = np.power(norms, -s)
        total = math.fsum(w)
        out.append(math.fsum(w[mask]) / total if total else 0.0)
    return np.array(out)


def _extrapolate(s_grid: np.ndarray, ratios: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(s_grid - 1.0, ratios, 1)
    resid = ratios - (intercept + slope * (s_grid - 1.0))
    return float(intercept), float(np.max(np.abs(resid)))


def dirichlet_density(assignment: LengthAssignment, subset, s_grid=DEFAULT_S_GRID) -> DirichletEstimate:
    """Ratio sum_{subset} N^-s / sum_all N^-s on the grid, extrapolated linearly to s = 1.

    ``subset`` is a boolean mask over knots.  Diagnostics repeat the
    extrapolation on the first half of the knots to expose truncation
    sensitivity.
    """
    s = _check_grid(s_grid)
    mask = np.asarray(subset, dtype=bool)
    if mask.shape != assignment.norms.shape:
        raise LabError("MISMATCHED_CLASSES", "subset mask does not match the knot count")
    if mask.size == 0:
        raise LabError("EMPTY_STREAM")
    ratios = _ratios(assignment.norms, mask, s)
    est, resid = _extrapolate(s, ratios)
    half = max(1, mask.size // 2)
    half_est, _ = _extrapolate(s, _ratios(assignment.norms[:half], mask[:half], s))
    diag = {
        "fit_max_residual": resid,
        "half_truncation_estimate": half_est,
        "truncation_sensitivity": abs(est - half_est),
        "ratio_at_s1_finite": float(math.fsum(1 / assignment.norms[mask]) / math.fsum(1 / assignment.norms)),
    }
    return DirichletEstimate(tuple(float(x) for x in s), tuple(float(r) for r in ratios), est, diag)


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ClassStats:
    count: int
    natural_freq: float
    dirichlet_estimate: float
    dirichlet_ratios: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class DensityReport:
    quotient_label: str
    per_class: dict            # ConjClass -> ClassStats
    total_knots: int
    s_grid: tuple[float, ...]
    truncation: int
    expected: dict             # ConjClass -> |C|/|G|
    skip_first: int = 0

    def max_natural_deviation(self) -> float:
        return max(abs(st.natural_freq - self.expected[c]) for c, st in self.per_class.items())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class_rep", "class_size", "count", "natural"]
                   + [f"dirichlet_s{s:g}" for s in self.s_grid]
                   + ["dirichlet_extrapolated", "expected"])
        for c, st in sorted(self.per_class.items()):
            w.writerow([c.representative, c.size, st.count, f"{st.natural_freq:.12g}"]
                       + [f"{r:.12g}" for r in st.dirichlet_ratios]
                       + [f"{st.dirichlet_estimate:.12g}", f"{self.expected[c]:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "quotient_label": self.quotient_label,
            "total_knots": self.total_knots,
            "truncation": self.truncation,
            "skip_first": self.skip_first,
            "s_grid": list(self.s_grid),
            "classes": [
                {"representative": c.representative, "members": list(c.members), "count": st.count,
                 "natural_freq": st.natural_freq, "dirichlet_estimate": st.dirichlet_estimate,
                 "dirichlet_ratios": list(st.dirichlet_ratios), "expected": self.expected[c]}
                for c, st in sorted(self.per_class.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def density_report(G: FiniteGroup, tags, assignment: LengthAssignment, s_grid=DEFAULT_S_GRID,
                   skip_first: int = 0, label: str | None = None) -> DensityReport:
    """Per-class natural and Dirichlet densities of a tagged knot stream."""
    tags = np.asarray(tags, dtype=np.int64)
    if tags.size == 0:
        raise LabError("EMPTY_STREAM")
    if tags.shape != assignment.norms.shape:
        raise LabError("MISMATCHED_CLASSES", "tags and lengths differ in size")
    s = _check_grid(s_grid)
    tail = tags[skip_first:]
    sub = LengthAssignment(assignment.scheme, assignment.lengths[skip_first:], assignment.norms[skip_first:])
    total = int(tail.size)
    per_class, expected = {}, {}
    for i, c in enumerate(G.classes):
        mask = tail == i
        est = dirichlet_density(sub, mask, s)
        per_class[c] = ClassStats(int(mask.sum()), float(mask.sum()) / total, est.extrapolated, est.ratios)
        expected[c] = c.size / G.order
    return DensityReport(label or G.label, per_class, total, tuple(float(x) for x in s), int(tags.size),
                         expected, skip_first)


def running_series_csv(tags, G: FiniteGroup, skip_first: int = 0, stride: int = 1) -> str:
    """Plot-ready rows (nu, running frequency per class)."""
    tags = np.asarray(tags, dtype=np.int64)
    series = [natural_density(tags, i, skip_first) for i in range(len(G.classes))]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["nu"] + [f"class_{c.representative}" for c in G.classes])
    for nu in range(stride - 1, tags.size, stride):
        w.writerow([nu + 1] + [f"{s[nu]:.10g}" for s in series])
    return buf.getvalue()


@dataclass(frozen=True)
class EquivalenceReport:
    discrepancy: dict
    max_discrepancy: float


def density_equivalence_report(natural: dict, dirichlet: dict) -> EquivalenceReport:
    """Per-class |natural - Dirichlet| on matching class keys."""
    if set(natural) != set(dirichlet):
        raise LabError("MISMATCHED_CLASSES")
    disc = {c: abs(float(natural[c]) - float(dirichlet[c])) for c in natural}
    return EquivalenceReport(disc, max(disc.values()) if disc else 0.0)


def equivalence_from_report(report: DensityReport) -> EquivalenceReport:
    return density_equivalence_report(
        {c: st.natural_freq for c, st in report.per_class.items()},
        {c: st.dirichlet_estimate for c, st in report.per_class.items()},
    )

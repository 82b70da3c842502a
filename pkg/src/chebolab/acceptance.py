"""The acceptance suite: twelve checks, each reported PASS or with a failure kind.

Failure kinds:

* ``TOLERANCE_FAIL``: a statistical estimate missed its tolerance, or a
  time budget was exceeded.
* ``INVARIANT_FAIL``: an exact identity failed.
* ``CRASH``: the check raised.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import covers, density, fingroup, localglobal, oracles, orbitgen
from .errors import LabError
from .grouplib import library

PASS = "PASS"
TOLERANCE_FAIL = "TOLERANCE_FAIL"
INVARIANT_FAIL = "INVARIANT_FAIL"
CRASH = "CRASH"


@dataclass(frozen=True)
class AcceptanceConfig:
    density_tolerance: float = 0.05
    zeta_rtol: float = 1e-12
    cat_nu_max: int = 16
    cat_modulus: int = 2
    modular_max_len: int = 18
    modular_prime: int = 2
    s_grid: tuple[float, ...] = density.DEFAULT_S_GRID
    zeta_s: tuple[float, ...] = (1.05, 1.1, 1.2)
    zeta_skips: tuple[int, ...] = (0, 100)
    hilbert_order_bound: int = 24
    sweep_order_bound: int = 16
    reciprocity_primes: tuple[int, ...] = (2, 3, 5)
    reciprocity_sizes: tuple[int, ...] = (1, 2, 5, 10, 20, 40)
    reciprocity_trials: int = 100
    unramified_primes: tuple[int, ...] = (2, 3, 5, 7)
    lgp_n: int = 50
    lgp_bound: int = 10
    lgp_p: int = 3
    lgp_s_size: int = 3
    lgp_trials: int = 200
    lgp_threshold: float = 0.9
    rademacher_max_len: int = 10
    seed: int = 0
    time_limits: dict = field(default_factory=lambda: {1: 1.0, 2: 60.0, 3: 60.0, 6: 120.0})

    def validate(self) -> None:
        if self.cat_nu_max < 2 or self.modular_max_len < 2:
            raise LabError("DATASET_EMPTY", "cat_nu_max and modular_max_len must be >= 2")
        if self.density_tolerance < 0 or self.zeta_rtol < 0:
            raise LabError("CONFIG_INVALID", "tolerances must be non-negative")


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    status: str
    detail: str
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def line(self) -> str:
        return f"criterion {self.number:2d} {self.status:<14} {self.title}: {self.detail} [{self.seconds:.2f}s]"


class Datasets:
    """Shared enumerations, built lazily and reused across criteria."""

    def __init__(self, cfg: AcceptanceConfig):
        self.cfg = cfg

    @cached_property
    def cat(self):
        table = orbitgen.cat_orbit_table(orbitgen.CAT_MATRIX, self.cfg.cat_nu_max)
        if len(table) == 0:
            raise LabError("DATASET_EMPTY", "no cat orbits")
        G, q = fingroup.semidirect_quotient(self.cfg.cat_modulus, orbitgen.CAT_MATRIX)
        tags = orbitgen.frobenius_class_indices(table, q)
        return table, G, tags, orbitgen.assign_lengths(table)

    @cached_property
    def modular(self):
        knots = orbitgen.order_knots(orbitgen.modular_geodesics(self.cfg.modular_max_len))
        if not knots:
            raise LabError("DATASET_EMPTY", "no modular geodesics")
        G, q = fingroup.psl2_quotient(self.cfg.modular_prime)
        tags = orbitgen.frobenius_class_indices(knots, q)
        return knots, G, tags, orbitgen.assign_lengths(knots)


def _status(ok: bool, kind: str) -> str:
    return PASS if ok else kind


# --------------------------------------------------------------------------
# criteria; each returns (status, detail)


def crit_fixed_points(cfg, data):
    expected = [1, 5, 16, 45, 121]
    got, oracle = [], []
    for nu in range(1, 6):
        pts = orbitgen.cat_fixed_points(orbitgen.CAT_MATRIX, nu)
        got.append(len(pts))
        oracle.append(pts == oracles.grid_fixed_points(orbitgen.CAT_MATRIX, nu))
    ok = got == expected and all(oracle) and got == [oracles.det_count(orbitgen.CAT_MATRIX, nu)
                                                      for nu in range(1, 6)]
    return _status(ok, INVARIANT_FAIL), f"counts {got}, grid oracle agrees: {all(oracle)}"


def _class_deviation(G, tags):
    freq = np.bincount(tags, minlength=len(G.classes)) / tags.size
    expected = np.array([c.size / G.order for c in G.classes])
    return freq, expected, float(np.max(np.abs(freq - expected)))


def crit_cat_equidistribution(cfg, data):
    table, G, tags, _ = data.cat
    freq, expected, dev = _class_deviation(G, tags)
    per = ", ".join(f"{f:.4f}/{e:.4f}" for f, e in zip(freq, expected))
    return (_status(dev <= cfg.density_tolerance, TOLERANCE_FAIL),
            f"{len(table)} orbits into |G|={G.order}; freq/expected {per}; "
            f"max dev {dev:.4f} vs tol {cfg.density_tolerance}")


def crit_modular_split(cfg, data):
    knots, G, tags, _ = data.modular
    ident = int(G.class_index[G.identity])
    freq = float(np.mean(tags == ident))
    dev = abs(freq - 1 / G.order)
    return (_status(dev <= cfg.density_tolerance, TOLERANCE_FAIL),
            f"{len(knots)} geodesics; identity freq {freq:.4f} vs 1/{G.order}; "
            f"dev {dev:.4f} vs tol {cfg.density_tolerance}")


def crit_density_equivalence(cfg, data):
    _, G, tags, lengths = data.modular
    rep = density.density_report(G, tags, lengths, cfg.s_grid)
    eq = density.equivalence_from_report(rep)
    per = ", ".join(f"{st.natural_freq:.4f}/{st.dirichlet_estimate:.4f}"
                    for _, st in sorted(rep.per_class.items()))
    return (_status(eq.max_discrepancy <= cfg.density_tolerance, TOLERANCE_FAIL),
            f"natural/Dirichlet {per}; max |diff| {eq.max_discrepancy:.4f} vs tol {cfg.density_tolerance}")


def crit_zeta_partition(cfg, data):
    worst = 0.0
    for _, G, tags, lengths in (data.cat, data.modular):
        for s in cfg.zeta_s:
            for skip in cfg.zeta_skips:
                total = density.zeta_partial(lengths, s, skip_first=skip)
                prod = math.prod(density.zeta_relative(lengths, tags, i, s, skip_first=skip)
                                 for i in range(len(G.classes)))
                worst = max(worst, abs(prod / total - 1))
    return (_status(worst <= cfg.zeta_rtol, INVARIANT_FAIL),
            f"max relative error {worst:.2e} vs {cfg.zeta_rtol:g} over both families")


def crit_hilbert(cfg, data):
    checked = bad = 0
    for G in library(cfg.hilbert_order_bound):
        for mu, lam in covers.commuting_pairs(G):
            d = covers.splitting_data(covers.PeripheralImage(int(mu), int(lam), G))
            checked += 1
            if not (d.e * d.f * d.g == G.order and len(d.I) == d.e
                    and len(d.D) == d.e * d.f and d.I <= d.D):
                bad += 1
    return _status(bad == 0, INVARIANT_FAIL), f"{checked} peripheral pairs, {bad} violations"


def crit_multiplicativity(cfg, data):
    checked = bad = 0
    for G in library(cfg.hilbert_order_bound):
        pairs = covers.commuting_pairs(G)
        for N in fingroup.normal_subgroups(G):
            quotient = fingroup.quotient_group(G, N)
            for mu, lam in pairs:
                checked += 1
                bad += not covers.multiplicativity_check(
                    G, N, covers.PeripheralImage(int(mu), int(lam), G), quotient)
    return _status(bad == 0, INVARIANT_FAIL), f"{checked} towers, {bad} violations"


def crit_rigidity(cfg, data):
    rep = covers.split_rigidity_sweep(cfg.sweep_order_bound)
    return _status(not rep.counterexamples, INVARIANT_FAIL), rep.summary()


def crit_reciprocity(cfg, data):
    bad = runs = 0
    for p in cfg.reciprocity_primes:
        for n in cfg.reciprocity_sizes:
            L = localglobal.synthetic_linking_model(n, 10, cfg.seed + 1000 * p + n)
            r = localglobal.reciprocity_check(L, p, cfg.reciprocity_trials, seed=cfg.seed + n)
            runs += 1
            bad += not r.ok
    ur = [localglobal.unramified_orthogonality(p).ok for p in cfg.unramified_primes]
    ok = bad == 0 and all(ur)
    return (_status(ok, INVARIANT_FAIL),
            f"{runs} configurations x {cfg.reciprocity_trials} pairs, {bad} failing; "
            f"unramified self-orthogonal for p in {list(cfg.unramified_primes)}: {all(ur)}")


def crit_local_global(cfg, data):
    kw = dict(n=cfg.lgp_n, bound=cfg.lgp_bound, p=cfg.lgp_p, s_size=cfg.lgp_s_size,
              trials=cfg.lgp_trials, seed=cfg.seed, threshold=cfg.lgp_threshold)
    exp = localglobal.local_global_experiment(**kw)
    ctl = localglobal.local_global_experiment(control=True, **kw)
    ok = exp.verdict == "PASS" and ctl.verdict == "PASS"
    return (_status(ok, TOLERANCE_FAIL),
            f"surjective {exp.surjective_rate:.3f} (>= {cfg.lgp_threshold}), injective {exp.injective_rate:.3f}; "
            f"unlink control surjective {ctl.surjective_rate:.3f} (must be 0)")


def crit_rademacher(cfg, data):
    checked = bad = 0
    for w in oracles.hyperbolic_letter_words(cfg.rademacher_max_len):
        k = w.index("R")
        rotated = w[k:] + w[:k]
        exps = orbitgen._letters_to_exponents([0 if ch == "R" else 1 for ch in rotated])
        checked += 1
        bad += orbitgen.rademacher(exps) != oracles.rademacher_psi(oracles.letters_matrix(w))
    return _status(bad == 0, INVARIANT_FAIL), f"{checked} words, {bad} mismatches with the Dedekind-sum oracle"


def crit_determinism(cfg, data):
    from .cli import determinism_check
    same, names = determinism_check(seed=cfg.seed)
    return (_status(same, INVARIANT_FAIL),
            f"{len(names)} report files byte-identical across in-process and subprocess runs: {same}")


CRITERIA = {
    1: ("cat fixed-point counts", crit_fixed_points),
    2: ("cat orbit equidistribution", crit_cat_equidistribution),
    3: ("modular totally-split density", crit_modular_split),
    4: ("natural vs Dirichlet density", crit_density_equivalence),
    5: ("zeta partition identity", crit_zeta_partition),
    6: ("Hilbert identities", crit_hilbert),
    7: ("residue-degree multiplicativity", crit_multiplicativity),
    8: ("split-set rigidity sweep", crit_rigidity),
    9: ("reciprocity and unramified duality", crit_reciprocity),
    10: ("local-global injectivity/surjectivity", crit_local_global),
    11: ("Rademacher vs Dedekind sums", crit_rademacher),
    12: ("determinism", crit_determinism),
}


def run_criterion(number: int, cfg: AcceptanceConfig | None = None, data: Datasets | None = None) -> CriterionResult:
    cfg = cfg or AcceptanceConfig()
    data = data or Datasets(cfg)
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        status, detail = fn(cfg, data)
    except LabError as exc:
        if exc.code == "DATASET_EMPTY":
            raise
        return CriterionResult(number, title, CRASH, repr(exc), time.perf_counter() - t0)
    except Exception as exc:  # reported, not propagated: one broken check must not hide the rest
        return CriterionResult(number, title, CRASH, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)
    secs = time.perf_counter() - t0
    limit = cfg.time_limits.get(number)
    if status == PASS and limit is not None and secs > limit:
        status, detail = TOLERANCE_FAIL, f"{detail}; exceeded time budget {limit:g}s"
    return CriterionResult(number, title, status, detail, secs)


def verify_all(cfg: AcceptanceConfig | None = None, only=None, echo=print) -> list[CriterionResult]:
    """Run the suite, printing one verdict line per criterion."""
    cfg = cfg or AcceptanceConfig()
    cfg.validate()
    data = Datasets(cfg)
    out = []
    for n in sorted(only or CRITERIA):
        r = run_criterion(n, cfg, data)
        if echo is not None:
            echo(r.line())
        out.append(r)
    return out


def with_tolerance(cfg: AcceptanceConfig, tol: float) -> AcceptanceConfig:
    return replace(cfg, density_tolerance=tol)

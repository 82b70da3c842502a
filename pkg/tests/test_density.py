import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from chebolab import oracles
from chebolab.density import (counting_functions, density_equivalence_report, density_report,
                              dirichlet_density, equivalence_from_report, log_derivative, mellin_psi,
                              natural_density, running_series_csv, zeta_partial, zeta_relative)
from chebolab.errors import LabError
from chebolab.fingroup import psl2_quotient
from chebolab.orbitgen import (LengthAssignment, LengthScheme, assign_lengths, first_primes,
                               frobenius_class_indices, modular_geodesics)


def _primes(n):
    return assign_lengths([None] * n, LengthScheme.PRIME_NUMBER)


@pytest.fixture(scope="module")
def modular_mod2():
    G, q = psl2_quotient(2)
    geos = modular_geodesics(18)
    return G, frobenius_class_indices(geos, q), assign_lengths(geos)


# --------------------------------------------------------------------------
# natural density


def test_running_frequency_example():
    f = natural_density(np.array([0, 1, 0, 0]), 0)
    assert f.tolist() == [1.0, 0.5, 2 / 3, 0.75]


def test_accepts_class_sequences(s3):
    c = s3.classes
    stream = [c[0], c[1], c[1], c[2]]
    assert natural_density(stream, c[1]).tolist() == [0.0, 0.5, 2 / 3, 0.5]
    assert natural_density(list(enumerate(stream)), c[1]).tolist() == [0.0, 0.5, 2 / 3, 0.5]


def test_skip_first():
    f = natural_density(np.array([0, 0, 1, 0]), 0, skip_first=2)
    assert f.tolist() == [0.0, 0.0, 0.0, 0.25]


@pytest.mark.parametrize("args, code", [
    ((np.zeros(0, dtype=np.int64), 0), "EMPTY_STREAM"),
    ((np.array([0, 1]), 0, -1), "BAD_SKIP"),
])
def test_natural_density_errors(args, code):
    with pytest.raises(LabError) as exc:
        natural_density(*args)
    assert exc.value.code == code


def test_tag_array_rejects_class_object(s3):
    with pytest.raises(LabError) as exc:
        natural_density(np.array([0, 1]), s3.classes[0])
    assert exc.value.code == "MISMATCHED_CLASSES"


@given(st.lists(st.integers(0, 3), min_size=1, max_size=200))
def test_running_frequencies_partition_unity(tags):
    t = np.array(tags)
    total = sum(natural_density(t, c) for c in range(4))
    assert np.allclose(total, 1.0)


def test_modular_identity_frequency(modular_mod2):
    G, tags, _ = modular_mod2
    ident = G.class_index[G.identity]
    assert natural_density(tags, ident)[-1] == pytest.approx(6719 / 31040, abs=1e-15)
    sizes = [int((tags == i).sum()) for i in range(len(G.classes))]
    assert sorted(sizes) == [6719, 10790, 13531]


# --------------------------------------------------------------------------
# counting functions


def test_prime_counting_functions():
    cf = counting_functions(_primes(25))            # primes up to 97
    assert cf.pi(10) == 4 and cf.pi(97) == 25 and cf.pi(1.5) == 0
    assert cf.theta(10) == pytest.approx(math.log(210))
    # psi(10) = log lcm(1..10) = log 2520
    assert cf.psi(10) == pytest.approx(math.log(2520), rel=1e-14)
    assert cf.psi(8) == pytest.approx(math.log(840), rel=1e-14)
    assert cf.psi(0.5) == 0.0


@given(st.integers(2, 97))
def test_psi_is_log_lcm(x):
    cf = counting_functions(_primes(25))
    assert cf.psi(x) == pytest.approx(math.log(math.lcm(*range(1, x + 1))), rel=1e-13)


def test_class_restricted_counts():
    la = _primes(10)
    tags = np.array([0, 1] * 5)
    cf = counting_functions(la, tags)
    assert cf.pi(30, 0) + cf.pi(30, 1) == cf.pi(30)
    assert cf.pi(30, 0) == 5                        # 2, 5, 11, 17, 23
    with pytest.raises(LabError):
        counting_functions(la).pi(10, 0)


# --------------------------------------------------------------------------
# zeta functions


def test_zeta_partial_against_mpmath():
    la = _primes(100)
    got = zeta_partial(la, 2.0)
    assert got == pytest.approx(1.6445152217242938, rel=1e-12)
    assert got == pytest.approx(float(oracles.zeta_product_mp(la.norms, 2.0)), rel=1e-12)


def test_zeta_partial_approaches_zeta_two():
    la = _primes(5000)
    assert zeta_partial(la, 2.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-5)


def test_zeta_relative_fixture(modular_mod2):
    G, tags, la = modular_mod2
    ident = G.class_index[G.identity]
    got = zeta_relative(la, tags, ident, 1.1, truncation=10_000)
    assert got == pytest.approx(1.1683453628664575, rel=1e-12)
    want = oracles.zeta_product_mp(la.norms[:10_000][tags[:10_000] == ident], 1.1)
    assert got == pytest.approx(float(want), rel=1e-12)


def test_relative_products_multiply_to_total(modular_mod2):
    G, tags, la = modular_mod2
    prod = math.prod(zeta_relative(la, tags, i, 1.5) for i in range(len(G.classes)))
    assert prod == pytest.approx(zeta_partial(la, 1.5), rel=1e-12)


def test_skip_first_and_truncation():
    la = _primes(10)
    assert zeta_partial(la, 2.0, truncation=0) == 1.0
    assert zeta_partial(la, 2.0, truncation=1) == pytest.approx(4 / 3)
    assert zeta_partial(la, 2.0, truncation=2, skip_first=1) == pytest.approx(9 / 8)
    with pytest.raises(LabError) as exc:
        zeta_partial(la, 2.0, truncation=11)
    assert exc.value.code == "BAD_TRUNCATION"


@pytest.mark.parametrize("s", [1.0, 0.5, -2.0])
def test_s_out_of_range(s):
    with pytest.raises(LabError) as exc:
        zeta_partial(_primes(5), s)
    assert exc.value.code == "S_OUT_OF_RANGE"


@given(st.floats(1.05, 4.0), st.integers(1, 300))
def test_partial_zeta_monotone_in_truncation(s, n):
    la = _primes(301)
    assert zeta_partial(la, s, n) <= zeta_partial(la, s, n + 1)
    assert zeta_partial(la, s, n) > 1.0


def test_log_derivative_matches_mpmath():
    la = _primes(200)
    s = 1.7
    want = -mpmath.diff(lambda t: mpmath.log(oracles.zeta_product_mp(la.norms, t, dps=30)), s)
    assert log_derivative(la, s) == pytest.approx(float(want), rel=1e-9)


def test_mellin_transform_of_psi_is_log_derivative():
    """For a finite knot set the Mellin identity holds once u_max covers every jump that matters."""
    la = _primes(30)
    s = 2.0
    full = log_derivative(la, s)
    assert mellin_psi(la, s, u_max=400.0) == pytest.approx(full, rel=1e-12)
    assert mellin_psi(la, s, u_max=5.0) < full
    assert mellin_psi(la, s, u_max=0.1) == 0.0


# --------------------------------------------------------------------------
# Dirichlet density


def test_dirichlet_ratios_are_exact_weights():
    la = _primes(4)
    mask = np.array([True, False, False, False])
    est = dirichlet_density(la, mask, (2.0, 1.5))
    assert est.ratios[0] == pytest.approx(0.25 / (1 / 4 + 1 / 9 + 1 / 25 + 1 / 49))
    assert est.s_grid == (2.0, 1.5)


def test_linear_ratios_extrapolate_exactly():
    # norms chosen so the ratio is constant in s: subset gets half the mass at every s
    la = LengthAssignment(LengthScheme.PRIME_NUMBER, np.log([2.0, 2.0]), np.array([2.0, 2.0]))
    est = dirichlet_density(la, np.array([True, False]))
    assert est.extrapolated == pytest.approx(0.5, abs=1e-12)
    assert est.diagnostics["fit_max_residual"] < 1e-12


@pytest.mark.parametrize("grid", [(1.1,), (1.1, 1.2), (1.2, 1.0), (0.9, 0.8)])
def test_bad_grids(grid):
    with pytest.raises(LabError) as exc:
        dirichlet_density(_primes(4), np.ones(4, bool), grid)
    assert exc.value.code == "S_OUT_OF_RANGE"


def test_dirichlet_mask_shape():
    with pytest.raises(LabError) as exc:
        dirichlet_density(_primes(4), np.ones(3, bool))
    assert exc.value.code == "MISMATCHED_CLASSES"


def test_residue_classes_of_primes():
    """Primes mod 4: natural frequencies even out; Dirichlet estimates are additive over a partition."""
    la = _primes(20_000)
    r = la.norms % 4
    assert natural_density((r == 1).astype(np.int64), 1)[-1] == pytest.approx(0.5, abs=0.01)
    parts = [dirichlet_density(la, r == k) for k in (1, 2, 3)]
    assert math.fsum(e.extrapolated for e in parts) == pytest.approx(1.0, abs=1e-12)
    for e in parts:
        assert set(e.diagnostics) == {"fit_max_residual", "half_truncation_estimate",
                                      "truncation_sensitivity", "ratio_at_s1_finite"}


# --------------------------------------------------------------------------
# reports


def test_density_report(modular_mod2):
    G, tags, la = modular_mod2
    rep = density_report(G, tags, la)
    assert rep.total_knots == 31040
    assert sum(st.count for st in rep.per_class.values()) == 31040
    assert math.fsum(rep.expected.values()) == pytest.approx(1.0)
    assert math.fsum(st.natural_freq for st in rep.per_class.values()) == pytest.approx(1.0)
    doc = json.loads(rep.to_json())
    assert len(doc["classes"]) == 3
    rows = rep.to_csv().splitlines()
    assert rows[0].startswith("class_rep,class_size,count,natural,dirichlet_s1.2")
    assert len(rows) == 4
    eq = equivalence_from_report(rep)
    assert set(eq.discrepancy) == set(G.classes)


def test_density_report_skip_first(modular_mod2):
    G, tags, la = modular_mod2
    rep = density_report(G, tags, la, skip_first=100)
    assert rep.total_knots == 31040 - 100 and rep.truncation == 31040


def test_density_report_errors(s3):
    with pytest.raises(LabError) as exc:
        density_report(s3, np.zeros(0, np.int64), _primes(0))
    assert exc.value.code == "EMPTY_STREAM"
    with pytest.raises(LabError) as exc:
        density_report(s3, np.zeros(3, np.int64), _primes(4))
    assert exc.value.code == "MISMATCHED_CLASSES"


def test_running_series(s3):
    text = running_series_csv(np.array([0, 1, 2, 2]), s3, stride=2)
    rows = text.splitlines()
    assert len(rows) == 3 and rows[1].split(",")[0] == "2" and rows[2].split(",")[0] == "4"


def test_equivalence_report():
    rep = density_equivalence_report({"a": 0.5, "b": 0.5}, {"a": 0.4, "b": 0.6})
    assert rep.max_discrepancy == pytest.approx(0.1)
    with pytest.raises(LabError):
        density_equivalence_report({"a": 1.0}, {"b": 1.0})


def test_first_primes_match_sympy():
    import sympy
    assert first_primes(500).tolist() == list(sympy.primerange(2, sympy.prime(500) + 1))

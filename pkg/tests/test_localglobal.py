import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import GF, ZZ
from sympy.polys.matrices import DomainMatrix

from chebolab.errors import LabError
from chebolab.localglobal import (REPORT_SCOPE, LinkingMatrix, LocalPair, injectivity_check,
                                  kernel_mod_p, linking_from_csv, linking_mod_distribution,
                                  linking_to_csv, local_global_experiment, local_pairing, rank_mod_p,
                                  reciprocity_check, restriction_map, surjectivity_check,
                                  synthetic_linking_model, unramified_orthogonality)
from chebolab.orbitgen import modular_geodesics, rademacher

HOPF = LinkingMatrix([[0, 1], [1, 0]])
UNLINK2 = LinkingMatrix(np.zeros((2, 2), dtype=int))


def _sympy_rank(M, p):
    M = np.asarray(M).tolist()
    if not M or not M[0]:
        return 0
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in M], (len(M), len(M[0])), ZZ)
    return dm.convert_to(GF(p)).rank()


matrices = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.integers(-6, 6), min_size=n * n, max_size=n * n).map(
        lambda xs: np.array(xs).reshape(n, n)))


# --------------------------------------------------------------------------
# linear algebra


@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from([2, 3, 5, 7]), st.data())
def test_rank_matches_sympy(rows, cols, p, data):
    M = np.array(data.draw(st.lists(st.integers(-9, 9), min_size=rows * cols, max_size=rows * cols)))
    M = M.reshape(rows, cols)
    assert rank_mod_p(M, p) == _sympy_rank(M, p)


@given(matrices, st.sampled_from([2, 3, 5]))
def test_kernel_basis(M, p):
    K = kernel_mod_p(M, p)
    assert K.shape[0] == M.shape[1] - rank_mod_p(M, p)
    assert not ((M @ K.T) % p).any()
    if K.shape[0]:
        assert rank_mod_p(K, p) == K.shape[0]


@pytest.mark.parametrize("p", [0, 1, 4, 9, -3])
def test_not_prime(p):
    with pytest.raises(LabError) as exc:
        rank_mod_p(np.eye(2, dtype=int), p)
    assert exc.value.code == "NOT_PRIME"


def test_linking_matrix_validation():
    with pytest.raises(LabError) as exc:
        LinkingMatrix([[0, 1], [2, 0]])
    assert exc.value.code == "BAD_LINKING"
    with pytest.raises(LabError) as exc:
        LinkingMatrix([[1, 0], [0, 0]])
    assert exc.value.code == "BAD_LINKING"
    with pytest.raises(LabError):
        LinkingMatrix([[0, 1, 0]])


# --------------------------------------------------------------------------
# restriction, injectivity, surjectivity


def test_hopf_restriction():
    R = restriction_map(HOPF, 2, [0])
    assert R.tolist() == [[1, 0], [0, 1]]
    assert rank_mod_p(R, 2) == 2


def test_unlink_restriction():
    R = restriction_map(UNLINK2, 2, [0])
    assert R.tolist() == [[1, 0], [0, 0]]
    assert rank_mod_p(R, 2) == 1


def test_single_knot_restriction():
    assert restriction_map(LinkingMatrix([[0]]), 3, [0]).tolist() == [[1], [0]]


def test_index_out_of_range():
    with pytest.raises(LabError) as exc:
        restriction_map(HOPF, 2, [2])
    assert exc.value.code == "INDEX_OUT_OF_RANGE"


def test_injectivity_examples():
    assert injectivity_check(HOPF, 2, excluded=[1]) == 0
    assert injectivity_check(LinkingMatrix(np.zeros((3, 3), dtype=int)), 2, excluded=[1, 2]) == 2
    for L in (HOPF, UNLINK2, synthetic_linking_model(6, 3, 1)):
        assert injectivity_check(L, 5) == 0


def test_surjectivity_examples():
    assert surjectivity_check(HOPF, 2, [0]) == (True, 2)
    assert surjectivity_check(UNLINK2, 2, [0]) == (False, 1)
    assert surjectivity_check(UNLINK2, 2, []) == (True, 0)


@given(st.integers(2, 9), st.integers(0, 10_000), st.sampled_from([2, 3, 5]), st.data())
def test_surjectivity_is_monotone_in_s(n, seed, p, data):
    """Shrinking S can only keep a surjective restriction surjective."""
    L = synthetic_linking_model(n, 4, seed)
    S = data.draw(st.sets(st.integers(0, n - 1)))
    T = data.draw(st.sets(st.sampled_from(sorted(S)))) if S else set()
    if surjectivity_check(L, p, S)[0]:
        assert surjectivity_check(L, p, T)[0]


@given(st.integers(1, 9), st.integers(0, 10_000), st.sampled_from([2, 3, 5]), st.data())
def test_kernel_shrinks_as_exclusions_shrink(n, seed, p, data):
    L = synthetic_linking_model(n, 4, seed)
    ex = data.draw(st.sets(st.integers(0, n - 1)))
    sub = data.draw(st.sets(st.sampled_from(sorted(ex)))) if ex else set()
    assert injectivity_check(L, p, sub) <= injectivity_check(L, p, ex)
    # rank oracle
    keep = [i for i in range(n) if i not in ex]
    assert injectivity_check(L, p, ex) == n - _sympy_rank(restriction_map(L, p, keep), p)


@given(st.integers(2, 9), st.sampled_from([2, 3, 5]), st.data())
def test_unlink_is_never_surjective(n, p, data):
    L = LinkingMatrix(np.zeros((n, n), dtype=int))
    S = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    ok, rank = surjectivity_check(L, p, S)
    assert not ok and rank == len(S)


# --------------------------------------------------------------------------
# reciprocity and local duality


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 7, 40])
def test_reciprocity_on_symmetric_matrices(p, n):
    rep = reciprocity_check(synthetic_linking_model(n, 10, n), p, trials=100, seed=p)
    assert rep.ok and rep.violations == 0 and rep.route_disagreements == 0


def test_reciprocity_detects_asymmetry():
    broken = LinkingMatrix([[0, 1], [0, 0]], unchecked=True)
    rep = reciprocity_check(broken, 3, trials=50, seed=0)
    assert rep.violations > 0
    assert rep.route_disagreements == 0     # both routes see the same nonzero sum


def test_reciprocity_rejects_zero_trials():
    with pytest.raises(LabError):
        reciprocity_check(HOPF, 2, trials=0)


def test_local_pairing_is_alternating():
    for a, b in [(0, 1), (2, 3), (4, 4)]:
        x = LocalPair(a, b)
        assert local_pairing(x, x, 5) == 0
    assert local_pairing(LocalPair(1, 0), LocalPair(0, 1), 5) == 1
    assert local_pairing(LocalPair(0, 1), LocalPair(1, 0), 5) == 4


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_unramified_line_is_its_own_complement(p):
    rep = unramified_orthogonality(p)
    assert rep.ok
    assert (rep.h1_size, rep.unramified_size, rep.complement_size) == (p * p, p, p)


# --------------------------------------------------------------------------
# linking statistics and I/O


def test_constant_residues():
    assert linking_mod_distribution([3] * 10, 4).tolist() == [0, 0, 0, 1.0]


def test_uniform_residues():
    rng = np.random.default_rng(0)
    freq = linking_mod_distribution(rng.integers(0, 10**6, 100_000), 5)
    assert np.all(np.abs(freq - 0.2) < 0.02)


def test_rademacher_residues_mod_2():
    vals = [rademacher(g) for g in modular_geodesics(14)]
    freq = linking_mod_distribution(vals, 2)
    assert freq.sum() == pytest.approx(1.0)
    # Rademacher value of a word of length n has the parity of n
    parity = [len(g.word_string()) % 2 for g in modular_geodesics(14)]
    assert freq.tolist() == linking_mod_distribution(parity, 2).tolist()


def test_distribution_errors():
    with pytest.raises(LabError):
        linking_mod_distribution([], 3)
    with pytest.raises(LabError):
        linking_mod_distribution([1], 0)


def test_synthetic_model():
    a = synthetic_linking_model(8, 5, 42)
    assert np.array_equal(a.entries, synthetic_linking_model(8, 5, 42).entries)
    assert np.abs(a.entries).max() <= 5
    assert synthetic_linking_model(1, 5, 0).entries.tolist() == [[0]]


def test_linking_csv_round_trip():
    L = synthetic_linking_model(5, 7, 3)
    assert np.array_equal(linking_from_csv(linking_to_csv(L)).entries, L.entries)


# --------------------------------------------------------------------------
# seeded experiment


def test_experiment_passes_on_random_links():
    ex = local_global_experiment(n=30, bound=10, p=3, s_size=3, trials=60, seed=1)
    assert ex.verdict == "PASS"
    assert ex.injective_rate == 1.0 and ex.surjective_rate >= 0.9


def test_unlink_control_fails_surjectivity():
    ex = local_global_experiment(n=10, p=3, trials=20, seed=0, control=True)
    assert ex.surjective_rate == 0.0
    assert ex.verdict == "PASS"     # control passes when it fails everywhere


def test_experiment_is_reproducible():
    a = local_global_experiment(n=12, trials=10, seed=5)
    b = local_global_experiment(n=12, trials=10, seed=5)
    assert a.to_json() == b.to_json()
    doc = json.loads(a.to_json())
    assert doc["scope"] == REPORT_SCOPE and len(doc["rank"]) == 10


def test_experiment_rejects_large_s():
    with pytest.raises(LabError):
        local_global_experiment(n=2, s_size=3)

"""The oracles are only useful if they are right; pin them to textbook values."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chebolab import oracles


@pytest.mark.parametrize("h, k, value", [
    (1, 1, Fraction(0)), (1, 2, Fraction(0)), (1, 3, Fraction(1, 18)),
    (1, 5, Fraction(1, 5)), (2, 5, Fraction(0)), (1, 7, Fraction(5, 14)),
])
def test_dedekind_known_values(h, k, value):
    assert oracles.dedekind_sum(h, k) == value


@given(st.integers(1, 60), st.integers(1, 60))
def test_dedekind_reciprocity(h, k):
    if math.gcd(h, k) != 1:
        return
    lhs = oracles.dedekind_sum(h, k) + oracles.dedekind_sum(k, h)
    assert lhs == Fraction(-1, 4) + Fraction(h * h + k * k + 1, 12 * h * k)


@given(st.integers(1, 60), st.integers(1, 60))
def test_dedekind_one_over_k(h, k):
    if math.gcd(h, k) == 1:
        assert oracles.dedekind_sum(1, k) == Fraction((k - 1) * (k - 2), 12 * k)
        assert oracles.dedekind_sum(-h, k) == -oracles.dedekind_sum(h, k)


def test_mobius():
    assert [oracles.mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_det_counts_are_lucas_minus_two():
    # |det(A^nu - I)| = L_{2 nu} - 2 for the cat map
    lucas = [2, 1]
    while len(lucas) < 30:
        lucas.append(lucas[-1] + lucas[-2])
    for nu in range(1, 14):
        assert oracles.det_count(((2, 1), (1, 1)), nu) == lucas[2 * nu] - 2


def test_grid_and_closure_agree():
    A = ((2, 1), (1, 1))
    for nu in range(1, 7):
        assert oracles.grid_fixed_points(A, nu) == oracles.closure_fixed_points(A, nu)


def test_class_oracle_on_s3(s3):
    sizes = sorted(len(c) for c in oracles.conjugation_classes(s3.table))
    assert sizes == [1, 2, 3]
    assert len(oracles.normal_subgroups_by_search(s3.table)) == 3


def test_rademacher_phi_generators():
    assert oracles.rademacher_phi(((1, 1), (0, 1))) == 1
    assert oracles.rademacher_phi(((1, 0), (1, 1))) == 2
    assert oracles.rademacher_psi(((1, 0), (1, 1))) == -1


def test_letter_words():
    words = list(oracles.hyperbolic_letter_words(3))
    assert words == ["RL", "LR", "RRL", "RLR", "RLL", "LRR", "LRL", "LLR"]


def test_zeta_product_mp():
    assert float(oracles.zeta_product_mp([2], 1.0)) == pytest.approx(2.0)

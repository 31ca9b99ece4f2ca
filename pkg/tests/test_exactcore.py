import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import planted_instance
from sympsmith.errors import InvalidArgumentError, InvalidDimensionError, NotInMpError
from sympsmith.exactcore import (
    as_int_matrix,
    as_rat_matrix,
    block_parts,
    content,
    determinant,
    exact_inverse,
    first_defect_entry,
    identity,
    is_integral,
    is_primitive,
    is_symplectic,
    matrix_equal,
    mp_scale,
    require_mp_scale,
    satisfies_block_criterion,
    standard_form_matrix,
    symplectic_defect,
    symplectic_inverse,
)
from sympsmith.sympgen import random_sp


def test_standard_form_n1():
    assert matrix_equal(standard_form_matrix(1), [[0, 1], [-1, 0]])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_standard_form_squares_to_minus_one(n):
    J = standard_form_matrix(n)
    assert matrix_equal(J @ J, -identity(2 * n))
    assert is_symplectic(J)


def test_standard_form_rejects_zero():
    with pytest.raises(InvalidDimensionError):
        standard_form_matrix(0)


def test_rat_matrix_normalises_fractions():
    g = as_rat_matrix([["2/4", "-3/6"], [Fraction(6, -4), 3]])
    assert g[0, 0] == Fraction(1, 2)
    assert g[0, 1] == Fraction(-1, 2)
    assert g[1, 0].denominator == 2 and g[1, 0].numerator == -3


@pytest.mark.parametrize("bad", [0.5, True, "1/0", "abc"])
def test_rat_matrix_rejects_inexact_entries(bad):
    with pytest.raises(InvalidArgumentError):
        as_rat_matrix([[1, bad], [0, 1]])


def test_int_matrix_rejects_fraction():
    with pytest.raises(InvalidArgumentError):
        as_int_matrix([[1, Fraction(1, 2)], [0, 1]])


def test_int_matrix_rejects_ragged_rows():
    with pytest.raises((InvalidDimensionError, ValueError)):
        as_int_matrix([[1, 2], [3]])


@pytest.mark.parametrize(
    "g, expected",
    [
        ([[1, 0], [0, 1]], True),
        ([[2, 0], [0, Fraction(1, 2)]], True),
        ([[1, 1], [0, 1]], True),
        ([[2, 0], [0, 1]], False),
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], False),
    ],
)
def test_is_symplectic(g, expected):
    assert is_symplectic(g) is expected


def test_first_defect_entry_points_at_the_form():
    assert first_defect_entry([[1, 1], [0, 2]]) == (0, 1)
    assert first_defect_entry(identity(4)) is None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mp_scale_of_multiples(n):
    g = 3 * random_sp(n, 10, seed=n).matrix
    assert mp_scale(g) == 9
    assert mp_scale(identity(2 * n)) == 1


def test_mp_scale_need_not_be_a_square():
    assert mp_scale([[2, 0], [0, 1]]) == 2


def test_mp_scale_rejects_non_members():
    assert mp_scale([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]) is None
    with pytest.raises(NotInMpError) as err:
        require_mp_scale([[0, 0], [0, 0]])
    assert "not positive" in err.value.reason
    with pytest.raises(NotInMpError):
        require_mp_scale([[0, 1], [1, 0]])


def test_content_and_primitive():
    assert content([[4, 6], [2, 8]]) == 2
    assert content([[0, 0], [0, 0]]) == 0
    assert is_primitive([6, 10, 15])
    assert not is_primitive([0, 0])
    assert not is_primitive([4, 6])


@pytest.mark.parametrize("seed", range(10))
def test_block_criterion_agrees_with_symplecticity(seed):
    g = random_sp(2, 8, seed).matrix
    assert satisfies_block_criterion(g)
    broken = np.array(g, dtype=object)
    broken[0, 0] += 1
    assert satisfies_block_criterion(broken) == is_symplectic(broken)


def test_block_criterion_rejects_bad_shape():
    assert not satisfies_block_criterion([[1, 2, 3], [4, 5, 6], [7, 8, 9]])


@pytest.mark.parametrize("seed", range(5))
def test_symplectic_inverse_is_exact(seed):
    g = random_sp(3, 12, seed).matrix
    assert matrix_equal(g @ symplectic_inverse(g), identity(6))
    assert is_integral(symplectic_inverse(g))


def test_determinant_and_inverse():
    assert determinant([[4, 6], [2, 8]]) == 20
    assert determinant([[Fraction(1, 2), 0], [0, 4]]) == 2
    inv = exact_inverse([[2, 0], [0, Fraction(1, 3)]])
    assert matrix_equal(inv, [[Fraction(1, 2), 0], [0, 3]])


def test_inverse_of_singular_matrix():
    with pytest.raises(InvalidArgumentError):
        exact_inverse([[1, 2], [2, 4]])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=4, max_size=4))
def test_inverse_round_trip(entries):
    g = as_int_matrix([entries[:2], entries[2:]])
    if determinant(g) == 0:
        return
    assert matrix_equal(g @ exact_inverse(g), identity(2))


def test_defect_of_a_scaled_form():
    assert matrix_equal(symplectic_defect([[2, 0], [0, 1]]), standard_form_matrix(1))
    assert matrix_equal(symplectic_defect(standard_form_matrix(2)), np.zeros((4, 4), dtype=object))


def test_block_parts_of_j():
    parts = block_parts(standard_form_matrix(1))
    assert (parts.alpha[0, 0], parts.beta[0, 0], parts.gamma[0, 0], parts.delta[0, 0]) == (0, 1, -1, 0)
    g = random_sp(2, 10, seed=3).matrix
    assert matrix_equal(block_parts(g).assemble(), g)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=16), st.integers(-1000, 1000))
def test_content_scales_with_the_matrix(entries, c):
    g = as_int_matrix([entries])
    assert content(c * g) == abs(c) * content(g)


rational_squares = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.fractions(-5, 5, max_denominator=6), min_size=4 * n * n, max_size=4 * n * n)
)


@settings(max_examples=100, deadline=None)
@given(rational_squares)
def test_block_criterion_on_random_rationals(entries):
    size = math.isqrt(len(entries))
    g = as_rat_matrix(np.array(entries, dtype=object).reshape(size, size))
    assert satisfies_block_criterion(g) == is_symplectic(g)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_block_criterion_on_rational_symplectic(n, seed):
    g, _ = planted_instance(n, seed)
    assert satisfies_block_criterion(g) and is_symplectic(g)
    broken = np.array(g, dtype=object)
    broken[n - 1, 0] += Fraction(1, 2)
    assert satisfies_block_criterion(broken) == is_symplectic(broken)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_symplectic_closed_under_products_and_inverses(n, seed):
    g, _ = planted_instance(n, seed)
    h, _ = planted_instance(n, seed + 100)
    assert is_symplectic(g @ h)
    inv = exact_inverse(g)
    assert is_symplectic(inv)
    assert matrix_equal(inv, symplectic_inverse(g))

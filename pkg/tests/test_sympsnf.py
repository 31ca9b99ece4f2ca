import time
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from conftest import planted_instance
from sympsmith.errors import InvalidDimensionError, NotInMpError, NotSymplecticError, PreconditionViolation
from sympsmith.exactcore import (
    as_int_matrix,
    diagonal,
    identity,
    is_primitive,
    is_symplectic,
    matrix_equal,
    mp_scale,
    standard_form_matrix,
)
from sympsmith.sympgen import random_sp
from sympsmith.sympsnf import (
    DenominatorScale,
    double_coset_equal,
    double_coset_invariant,
    elementary_divisor_oracle,
    find_good_primitive,
    integral_chain_ok,
    inverse_of,
    step1_fix_e1,
    step2_clear_alpha_row,
    step3_fix_f1,
    symp_smith,
    symp_smith_integral,
    symplectic_size_reduce,
    verify_decomposition,
    verify_integral_decomposition,
)


def mp_instance(n, seed, scale_diag):
    """sigma . diag(a) . sigma' for a diagonal a with constant a_j a_{n+j}."""
    left = random_sp(n, 10, [seed, 11]).matrix
    right = random_sp(n, 10, [seed, 12]).matrix
    return left @ diagonal(scale_diag) @ right


def content_one_mp(n, seed):
    return mp_instance(n, seed, [1] * n + [4] * n)


def test_denominator_scale():
    assert DenominatorScale.of(identity(2)).m == 1
    g = diagonal([Fraction(2), Fraction(6), Fraction(1, 2), Fraction(1, 6)])
    scale = DenominatorScale.of(g)
    assert scale.m == 6
    assert matrix_equal(scale.scale(g), diagonal([12, 36, 3, 1]))


@pytest.mark.parametrize(
    "g",
    [identity(2), as_int_matrix([[1, 0], [0, 4]]), as_int_matrix([[2, 1], [3, 2]])],
)
def test_find_good_primitive(g):
    v = find_good_primitive(g)
    assert is_primitive(v)
    assert is_primitive(g @ v)


def test_find_good_primitive_prefers_short_candidates():
    g = as_int_matrix([[2, 1], [3, 2]])
    assert list(find_good_primitive(g)) == [0, 1]
    # no column is primitive; e_1 - e_2 has the shortest image (5, -1)
    h = as_int_matrix([[3, -2], [3, 4]])
    assert list(find_good_primitive(h)) == [1, -1]


def test_find_good_primitive_needs_content_one():
    with pytest.raises(PreconditionViolation):
        find_good_primitive(3 * identity(2))
    with pytest.raises(NotInMpError):
        find_good_primitive([[1, 0], [0, -4]])


def test_step1_on_j():
    sigma, sigma_prime, g1 = step1_fix_e1(standard_form_matrix(1))
    assert list(g1[:, 0]) == [1, 0]
    assert matrix_equal(sigma.matrix @ standard_form_matrix(1) @ sigma_prime.matrix, g1)


def test_step1_keeps_a_fixed_matrix():
    g = as_int_matrix([[1, 0], [0, 4]])
    sigma, sigma_prime, g1 = step1_fix_e1(g)
    assert len(sigma) == 0 and len(sigma_prime) == 0
    assert matrix_equal(g1, g)


def test_step2_is_trivial_for_n1():
    sigma_prime, g2 = step2_clear_alpha_row(as_int_matrix([[1, 5], [0, 4]]))
    assert len(sigma_prime) == 0
    with pytest.raises(PreconditionViolation):
        step2_clear_alpha_row(standard_form_matrix(1))


def test_step3_examples():
    g = as_int_matrix([[1, 0], [0, 4]])
    sigma_prime, g3 = step3_fix_f1(g)
    assert len(sigma_prime) == 0 and matrix_equal(g3, g)
    sigma_prime, g3 = step3_fix_f1(as_int_matrix([[1, 7], [0, 4]]))
    assert matrix_equal(sigma_prime.matrix, [[1, -7], [0, 1]])
    assert matrix_equal(g3, [[1, 0], [0, 4]])


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_step_postconditions(n, seed):
    g = content_one_mp(n, seed)
    _, _, g1 = step1_fix_e1(g)
    assert list(g1[:, 0]) == [1] + [0] * (2 * n - 1)
    _, g2 = step2_clear_alpha_row(g1)
    assert all(g2[0, j] == 0 for j in range(1, n))
    _, g3 = step3_fix_f1(g2)
    assert list(g3[:, n]) == [0] * n + [4] + [0] * (n - 1)


@pytest.mark.parametrize(
    "g, a, lambda_sq",
    [
        (3 * identity(4), (3, 3, 3, 3), 9),
        (as_int_matrix([[1, 0], [0, 4]]), (1, 4), 4),
        (as_int_matrix([[2, 0], [3, 3]]), (1, 6), 6),
        (random_sp(3, 15, seed=5).matrix, (1,) * 6, 1),
    ],
)
def test_integral_examples(g, a, lambda_sq):
    dec = symp_smith_integral(g)
    assert dec.a == a
    assert dec.lambda_sq == lambda_sq
    assert verify_integral_decomposition(g, dec).ok


def test_integral_rejects_non_members():
    with pytest.raises(NotInMpError):
        symp_smith_integral([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_integral_chain_and_constant_product(n, seed):
    head = [1, 2, 6][:n]
    g = mp_instance(n, seed, head + [36 // x for x in head])
    dec = symp_smith_integral(g)
    assert integral_chain_ok(dec.a)
    assert all(dec.a[j] * dec.a[n + j] == mp_scale(g) for j in range(n))
    assert dec.sigma.consistent() and dec.sigma_prime.consistent()
    assert is_symplectic(dec.sigma.matrix) and is_symplectic(dec.sigma_prime.matrix)


@pytest.mark.parametrize(
    "g, d",
    [
        (identity(4), (1, 1)),
        (diagonal([Fraction(6), Fraction(1, 6)]), (6,)),
        (diagonal([Fraction(1, 2), Fraction(2)]), (2,)),
        (diagonal([Fraction(2), Fraction(6), Fraction(1, 2), Fraction(1, 6)]), (2, 6)),
        (diagonal([Fraction(6), Fraction(2), Fraction(1, 6), Fraction(1, 2)]), (2, 6)),
    ],
)
def test_rational_examples(g, d):
    dec = symp_smith(g)
    assert dec.d == d
    assert matrix_equal(dec.reconstruct(), g)
    assert verify_decomposition(g, dec).ok
    assert elementary_divisor_oracle(g, dec)[0]


def test_rational_rejects_non_symplectic():
    with pytest.raises(NotSymplecticError) as err:
        symp_smith([[1, 1], [0, 2]])
    assert err.value.location == (0, 1)
    with pytest.raises(InvalidDimensionError):
        symp_smith([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_verification_flags_tampering():
    g = diagonal([Fraction(2), Fraction(6), Fraction(1, 2), Fraction(1, 6)])
    dec = symp_smith(g)
    swapped = replace(dec, d=(6, 2))
    report = verify_decomposition(g, swapped)
    assert not report.ok
    assert "d divisibility chain" in [c.name for c in report.failed()]
    sigma = np.array(dec.sigma, dtype=object)
    sigma[0, 0] += 1
    report = verify_decomposition(g, replace(dec, sigma=sigma))
    assert not report.ok
    assert "reconstruction" in [c.name for c in report.failed()]
    assert any(line.startswith("FAIL reconstruction") for line in report.lines())


@pytest.mark.parametrize("seed", range(30))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_round_trip_and_planted_recovery(n, seed):
    g, d = planted_instance(n, seed)
    dec = symp_smith(g)
    assert dec.d == d
    assert verify_decomposition(g, dec).ok
    assert dec.sigma_word.consistent() and dec.sigma_prime_word.consistent()
    agrees, expected, divisors = elementary_divisor_oracle(g, dec)
    assert agrees, (expected, divisors)


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_double_coset_canonicality(n, seed):
    g, d = planted_instance(n, seed)
    left = random_sp(n, 12, [seed, 21]).matrix
    right = random_sp(n, 12, [seed, 22]).matrix
    assert double_coset_invariant(left @ g @ right) == d
    assert double_coset_invariant(inverse_of(g)) == d
    assert double_coset_equal(g, left @ g @ right)


def test_double_coset_equal_examples():
    g = diagonal([Fraction(2), Fraction(1, 2)])
    assert double_coset_equal(g, g)
    assert not double_coset_equal(identity(2), g)
    assert double_coset_invariant(random_sp(2, 10, seed=0).matrix) == (1, 1)


def test_invariant_reuses_a_decomposition():
    g = diagonal([Fraction(6), Fraction(1, 6)])
    dec = symp_smith(g)
    assert double_coset_invariant(g, dec) is dec.d


def squared_size(g):
    return sum(int(x) ** 2 for x in np.asarray(g, dtype=object).flat)


def max_digits(g):
    return max(len(str(abs(int(x)))) for x in np.asarray(g, dtype=object).flat)


@pytest.mark.parametrize("a", [[1, 4], [1, 2, 4, 2], [1, 1, 3, 6, 6, 2]])
def test_size_reduction_fixes_diagonals(a):
    left, h, right = symplectic_size_reduce(diagonal(a))
    assert len(left) == 0 and len(right) == 0
    assert matrix_equal(h, diagonal(a))


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_size_reduction_stays_in_the_double_coset(n, seed):
    g, _ = planted_instance(n, seed)
    scaled = DenominatorScale.of(g).scale(g)
    left, h, right = symplectic_size_reduce(scaled)
    assert matrix_equal(left.matrix @ h @ right.matrix, scaled)
    assert left.consistent() and right.consistent()
    assert squared_size(h) <= squared_size(scaled)
    assert symp_smith_integral(h).a == symp_smith_integral(scaled).a


def test_size_reduction_undoes_a_shear():
    g = as_int_matrix([[1, 45], [0, 9]])
    left, h, right = symplectic_size_reduce(g)
    assert matrix_equal(h, diagonal([1, 9]))
    assert matrix_equal(left.matrix, [[1, 5], [0, 1]])
    assert len(right) == 0


@pytest.mark.parametrize("seed", range(5))
def test_witness_entries_stay_small(seed):
    g, d = planted_instance(4, seed)
    dec = symp_smith(g)
    assert dec.d == d
    # the inputs have entries of a few dozen digits
    assert max_digits(dec.sigma) < 500
    assert max_digits(dec.sigma_prime) < 500


def test_long_words_and_large_divisors_finish_quickly():
    start = time.perf_counter()
    for seed in range(3):
        g, d = planted_instance(3, 1000 + seed, length=40, dmax=10**4)
        dec = symp_smith(g)
        assert dec.d == d
        assert verify_decomposition(g, dec).ok
    assert time.perf_counter() - start < 60


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_acceptance_round_trip(n, seed):
    g, d = planted_instance(n, 1000 + seed, length=40, dmax=10**4)
    dec = symp_smith(g)
    assert dec.d == d
    assert verify_decomposition(g, dec).ok
    assert elementary_divisor_oracle(g, dec)[0]
    scaled = DenominatorScale.of(g).scale(g)
    assert verify_integral_decomposition(scaled, symp_smith_integral(scaled)).ok


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_acceptance_canonicality(n, seed):
    g, d = planted_instance(n, 5000 + seed)
    left = random_sp(n, 20, [seed, 31]).matrix
    right = random_sp(n, 20, [seed, 32]).matrix
    assert double_coset_invariant(left @ g @ right) == d
    assert double_coset_invariant(inverse_of(g)) == d

"""Symplectic Smith normal form.

Integral form (matrices in Mp(n, Z), i.e. tg J g = L J with L > 0):

    g = sigma . diag(a_1, ..., a_2n) . sigma',   sigma, sigma' in Sp(n, Z),
    a_1 | ... | a_n,  a_n | a_2n,  a_j a_{n+j} = L for every j.

Rational form (g in Sp(n, Q)):

    g = sigma . diag(d_1, ..., d_n, 1/d_1, ..., 1/d_n) . sigma',
    d_1 | ... | d_n positive integers, unique for the double coset
    Sp(n, Z) g Sp(n, Z).

The integral form is computed by an induction on n. With c the content of
g, g_1 is g / c after a greedy symplectic size reduction on both sides
(symplectic_size_reduce), which keeps the entries near the size of the
divisors at every level:

1. pick v primitive with g_1 v primitive (a short candidate e_i or
   e_i +- e_j, else from the ordinary Smith form, whose first divisor is 1)
   and move both to e_1, so that g_1 e_1 = e_1;
2. right-multiply by transvection_row to clear the first row of alpha;
3. right-multiply by transvection_col to clear the first row of beta,
   after which g_1 f_1 = L_1 f_1 with L_1 = L / c^2;
4. g_1 now preserves the span of e_2..e_n, f_2..f_n; recurse on that block
   and re-embed the witnesses on planes 2..n.

Denominator scale. For g in Sp(n, Q) let m be the lcm of the entry
denominators, the least positive integer with m g integral. Then
content(m g) = 1: if a prime p divided every entry of m g, then
t(mg) J (mg) = m^2 J gives p^2 | m^2, so p | m and (m/p) g would be
integral, contradicting minimality. Hence step 1 applies to m g, and its
integral form has a_1 = 1, a_{n+1} = m^2 and a_j | m, which yields
d_i = m / a_{n+1-i}.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InternalError, NotSymplecticError, PreconditionViolation
from .exactcore import (
    as_exact_matrix,
    as_int_matrix,
    as_int_vector,
    content,
    diagonal,
    first_defect_entry,
    half_dimension,
    identity,
    is_integral,
    is_primitive,
    is_symplectic,
    matrix_equal,
    require_mp_scale,
    symplectic_inverse,
)
from .snf import elementary_divisor_chain_ok, smith_normal_form
from .sympgen import (
    SpElement,
    SpWord,
    gl_block_generator,
    gl_elementary_generator,
    plane_shear_generator,
    reduce_primitive,
    transvection_col_generator,
    transvection_row_generator,
    weyl_generator,
)


@dataclass(frozen=True)
class IntegralSympSmith:
    """g = sigma . diag(a) . sigma' for g in Mp(n, Z), with lambda_sq = L."""

    sigma: SpWord
    a: tuple
    sigma_prime: SpWord
    lambda_sq: int

    @property
    def n(self):
        return len(self.a) // 2

    def diagonal(self):
        return diagonal(self.a)

    def reconstruct(self):
        return self.sigma.matrix @ self.diagonal() @ self.sigma_prime.matrix


@dataclass(frozen=True)
class SympSmithDecomposition:
    """g = sigma . diag(d, d^-1) . sigma'.

    sigma and sigma_prime are plain matrices so that decompositions read
    back from files (and possibly tampered with) can still be checked by
    verify_decomposition. Decompositions computed here also carry the
    generator words that produced the witnesses.
    """

    sigma: np.ndarray
    d: tuple
    sigma_prime: np.ndarray
    m: int = 1
    sigma_word: SpWord = field(default=None, compare=False)
    sigma_prime_word: SpWord = field(default=None, compare=False)

    @property
    def n(self):
        return len(self.d)

    def normal_form(self):
        return symplectic_diagonal(self.d)

    def reconstruct(self):
        return self.sigma @ self.normal_form() @ self.sigma_prime


@dataclass(frozen=True)
class DenominatorScale:
    """Least positive m with m g integral."""

    m: int

    @classmethod
    def of(cls, g):
        g = as_exact_matrix(g)
        return cls(math.lcm(*(Fraction(x).denominator for x in g.flat)))

    def scale(self, g):
        return as_int_matrix(self.m * as_exact_matrix(g))


def symplectic_diagonal(d):
    """diag(d_1, ..., d_n, 1/d_1, ..., 1/d_n) as an exact rational matrix."""
    return diagonal([Fraction(x) for x in d] + [Fraction(1, x) for x in d])


def plant(sigma, d, sigma_prime):
    """Return sigma . diag(d, d^-1) . sigma'."""
    return as_exact_matrix(sigma) @ symplectic_diagonal(d) @ as_exact_matrix(sigma_prime)


def _unit_vector(size, i):
    e = np.empty(size, dtype=object)
    e.fill(0)
    e[i] = 1
    return e


def _fixes_e1(g):
    return all(x == y for x, y in zip(g[:, 0], _unit_vector(g.shape[0], 0)))


def _content_one_mp(g):
    g = as_int_matrix(g)
    n = half_dimension(g)
    scale = require_mp_scale(g)
    if content(g) != 1:
        raise PreconditionViolation(f"content of g is {content(g)}, expected 1")
    return g, n, scale


def _sq(x):
    return int(np.dot(x, x))


def find_good_primitive(g):
    """Return a primitive v such that g v is primitive.

    The basis vectors e_i are tried first, then the e_i +- e_j; among the
    first family that has a hit, the v with the shortest g v wins. If none
    qualifies, v comes from the ordinary Smith form g = u . a . v_w:
    a_1 = 1 because the content is 1, so v = v_w^-1 e_1 gives g v = u e_1.

    Raises:
        NotInMpError: if g is not in Mp(n, Z)
        PreconditionViolation: if content(g) != 1
    """
    g, n, _ = _content_one_mp(g)
    size = 2 * n
    units = [_unit_vector(size, i) for i in range(size)]
    pairs = [units[i] + s * units[j] for i, j in itertools.combinations(range(size), 2) for s in (1, -1)]
    for candidates in (units, pairs):
        good = [v for v in candidates if is_primitive(g @ v)]
        if good:
            return min(good, key=lambda v: _sq(g @ v))
    snf = smith_normal_form(g)
    if snf.divisors[0] != 1:
        raise InternalError(f"first elementary divisor is {snf.divisors[0]} for a content-1 matrix")
    return as_int_vector(snf.v_inv[:, 0])


def step1_fix_e1(g):
    """Return (sigma, sigma', g') with g' = sigma g sigma' and g' e_1 = e_1."""
    g, n, _ = _content_one_mp(g)
    if _fixes_e1(g):
        return SpWord.identity(n), SpWord.identity(n), g
    v = find_good_primitive(g)
    sigma = reduce_primitive(g @ v)
    sigma_prime = reduce_primitive(v).inverse()
    g1 = sigma.matrix @ g @ sigma_prime.matrix
    if not _fixes_e1(g1):
        raise InternalError("step 1 did not fix e_1")
    return sigma, sigma_prime, g1


def step2_clear_alpha_row(g):
    """Return (sigma', g sigma') whose alpha block has first row (1, 0, ..., 0).

    Raises:
        PreconditionViolation: if g e_1 != e_1
    """
    g = as_int_matrix(g)
    n = half_dimension(g)
    if not _fixes_e1(g):
        raise PreconditionViolation("step 2 needs g e_1 = e_1")
    coeffs = [g[0, j] for j in range(1, n)]
    if not any(coeffs):
        return SpWord.identity(n), g
    sigma_prime = SpWord.of(transvection_row_generator(n, coeffs))
    g2 = g @ sigma_prime.matrix
    # omega(g' e_j, f_1) is the e_1 coordinate of g' e_j
    if any(g2[0, j] for j in range(1, n)):
        raise InternalError("step 2 did not clear the first row of alpha")
    return sigma_prime, g2


def step3_fix_f1(g):
    """Return (sigma', g sigma') with g' f_1 = lambda^2 f_1.

    Raises:
        NotInMpError: if g is not in Mp(n, Z)
        PreconditionViolation: if g e_1 != e_1 or the first row of alpha
            is not (1, 0, ..., 0)
    """
    g = as_int_matrix(g)
    n = half_dimension(g)
    scale = require_mp_scale(g)
    if not _fixes_e1(g) or any(g[0, j] for j in range(1, n)):
        raise PreconditionViolation("step 3 needs g e_1 = e_1 and a cleared first row of alpha")
    coeffs = [g[0, n + j] for j in range(n)]
    sigma_prime = SpWord.identity(n)
    if any(coeffs):
        sigma_prime = SpWord.of(transvection_col_generator(n, coeffs))
    g3 = g @ sigma_prime.matrix
    relations_hold = (
        all(g3[0, j] == 0 for j in range(1, n))
        and g3[0, 0] == 1
        and all(g3[0, n + j] == 0 for j in range(n))
    )
    if not relations_hold:
        raise InternalError("step 3 left a nonzero entry in the first row")
    expected = _unit_vector(2 * n, n) * scale
    if not all(x == y for x, y in zip(g3[:, n], expected)):
        raise InternalError("step 3 did not reach g' f_1 = lambda^2 f_1")
    return sigma_prime, g3


def _is_split(h, n):
    """h fixes e_1, scales f_1 and preserves the span of the other basis vectors."""
    for i in range(2 * n):
        if i not in (0, n) and (h[i, 0] or h[i, n] or h[0, i] or h[n, i]):
            return False
    return h[0, 0] == 1 and h[0, n] == 0 and h[n, 0] == 0


# Cap on full sweeps of the size reduction. Every accepted move lowers the
# sum of squared entries, so the loop ends on its own; the cap bounds time.
MAX_REDUCTION_SWEEPS = 500


def _best_shift(pairs):
    """Integer q minimising sum |x + s q y|^2 over (x, y, s), or 0 if no q lowers it."""
    num = sum(s * int(np.dot(x, y)) for x, y, s in pairs)
    den = sum(_sq(y) for _, y, _ in pairs)
    if den == 0 or num == 0:
        return 0
    q = round(Fraction(-num, den))
    return q if 2 * q * num + q * q * den < 0 else 0


class _SizeReducer:
    """Greedy two-sided reduction g -> X g Y by elementary symplectic moves.

    The moves are elementary GL blocks 1 + q E_ij and plane shears, applied
    to rows (left) or columns (right) with the rounded optimal q. The
    inverses are collected so that input == left . g . right at all times.
    """

    def __init__(self, g):
        self.g = np.array(g, dtype=object, copy=True)
        self.n = half_dimension(self.g)
        self.left = []
        self.right = []  # reversed

    # rows: g <- X g, left <- left X^-1

    def _gl_rows(self, i, j):
        g, n = self.g, self.n
        q = _best_shift([(g[i], g[j], 1), (g[n + j], g[n + i], -1)])
        if not q:
            return False
        g[i] += q * g[j]
        g[n + j] -= q * g[n + i]
        self.left.append(gl_elementary_generator(n, i, j, -q))
        return True

    def _shear_rows(self, i, lower):
        g, n = self.g, self.n
        target, source = (n + i, i) if lower else (i, n + i)
        q = _best_shift([(g[target], g[source], 1)])
        if not q:
            return False
        g[target] += q * g[source]
        self.left.append(plane_shear_generator(n, i + 1, -q, lower))
        return True

    # columns: g <- g Y, right <- Y^-1 right

    def _gl_cols(self, i, j):
        g, n = self.g, self.n
        q = _best_shift([(g[:, j], g[:, i], 1), (g[:, n + i], g[:, n + j], -1)])
        if not q:
            return False
        g[:, j] += q * g[:, i]
        g[:, n + i] -= q * g[:, n + j]
        self.right.append(gl_elementary_generator(n, i, j, -q))
        return True

    def _shear_cols(self, i, lower):
        g, n = self.g, self.n
        target, source = (i, n + i) if lower else (n + i, i)
        q = _best_shift([(g[:, target], g[:, source], 1)])
        if not q:
            return False
        g[:, target] += q * g[:, source]
        self.right.append(plane_shear_generator(n, i + 1, -q, lower))
        return True

    def _sweep(self):
        moved = False
        for i in range(self.n):
            for lower in (False, True):
                moved |= self._shear_rows(i, lower)
                moved |= self._shear_cols(i, lower)
            for j in range(self.n):
                if i != j:
                    moved |= self._gl_rows(i, j)
                    moved |= self._gl_cols(i, j)
        return moved

    def run(self):
        for _ in range(MAX_REDUCTION_SWEEPS):
            if not self._sweep():
                return

    def words(self):
        return _word_of(self.n, self.left), _word_of(self.n, self.right[::-1])


def _word_of(n, factors):
    product = identity(2 * n)
    for f in factors:
        product = product @ f.element.matrix
    return SpWord(n, tuple(factors), SpElement(n, product))


def symplectic_size_reduce(g):
    """Shrink the entries of g by elementary symplectic row and column moves.

    Returns:
        tuple: (left, h, right) with left, right SpWords and
        g = left . h . right exactly; the sum of squared entries of h is at
        most that of g, and h lies in the double coset of g

    Raises:
        InvalidDimensionError: if g is not 2n x 2n
    """
    g = as_int_matrix(g)
    reducer = _SizeReducer(g)
    reducer.run()
    left, right = reducer.words()
    if not matrix_equal(left.matrix @ reducer.g @ right.matrix, g):
        raise InternalError("size reduction does not reconstruct its input")
    return left, reducer.g, right


def _reduce(g, n):
    c = content(g)
    # every level works on a size-reduced representative
    left0, g1, right0 = symplectic_size_reduce(g // c)
    s1, t1, h = step1_fix_e1(g1)
    t2, h = step2_clear_alpha_row(h)
    t3, h = step3_fix_f1(h)
    if not _is_split(h, n):
        raise InternalError("normalised matrix does not split off the first plane")
    scale = h[n, n]
    if n == 1:
        left, right, a = SpWord.identity(1), SpWord.identity(1), [1, scale]
    else:
        rest = [i for i in range(1, n)] + [n + i for i in range(1, n)]
        sub_left, sub_a, sub_right = _reduce(h[np.ix_(rest, rest)], n - 1)
        left, right = sub_left.embed(n, 1), sub_right.embed(n, 1)
        a = [1] + sub_a[: n - 1] + [scale] + sub_a[n - 1:]
    # g / c = left0 g1 right0 and h = s1 g1 t1 t2 t3 = left diag(a) right
    sigma = left0 @ s1.inverse() @ left
    sigma_prime = right @ (t1 @ t2 @ t3).inverse() @ right0
    return sigma, [c * x for x in a], sigma_prime


def integral_chain_ok(a):
    """a_1 | ... | a_n, a_n | a_2n and constant a_j a_{n+j}, all a_j > 0."""
    n = len(a) // 2
    if len(a) != 2 * n or any(x <= 0 for x in a):
        return False
    head = list(a[:n])
    return (
        elementary_divisor_chain_ok(head)
        and a[2 * n - 1] % a[n - 1] == 0
        and len({a[j] * a[n + j] for j in range(n)}) == 1
    )


def symp_smith_integral(g):
    """Symplectic Smith form of an integral matrix g in Mp(n, Z).

    Raises:
        NotInMpError: if g is not in Mp(n, Z)
        InternalError: if an assembled invariant fails (a bug)
    """
    g = as_int_matrix(g)
    n = half_dimension(g)
    scale = require_mp_scale(g)
    sigma, a, sigma_prime = _reduce(g, n)
    dec = IntegralSympSmith(sigma, tuple(int(x) for x in a), sigma_prime, int(scale))
    if not integral_chain_ok(dec.a) or dec.a[0] * dec.a[n] != scale:
        raise InternalError(f"divisor chain {dec.a} violates the integral normal form")
    if not matrix_equal(dec.reconstruct(), g):
        raise InternalError("integral decomposition does not reconstruct g")
    return dec


def _require_symplectic(g):
    g = as_exact_matrix(g)
    location = first_defect_entry(g)
    if location is not None:
        raise NotSymplecticError(
            f"matrix is not symplectic: defect entry ({location[0] + 1}, {location[1] + 1}) is nonzero",
            location,
        )
    return g


def symp_smith(g):
    """Symplectic Smith normal form g = sigma . diag(d, d^-1) . sigma' of g in Sp(n, Q).

    Raises:
        InvalidDimensionError: if g is not 2n x 2n
        NotSymplecticError: if g is not symplectic
    """
    g = _require_symplectic(g)
    n = half_dimension(g)
    scale = DenominatorScale.of(g)
    m = scale.m
    integral = symp_smith_integral(scale.scale(g))
    if any(m % integral.a[j] for j in range(n)):
        raise InternalError(f"divisors {integral.a[:n]} do not all divide m={m}")
    d = tuple(m // integral.a[n - 1 - i] for i in range(n))
    # diag(a) / m = diag(1/e, e) with e = reversed d: a Weyl swap on every
    # plane exchanges the halves and a block permutation reverses the order
    turn = SpWord.of(weyl_generator(n, range(1, n + 1)))
    if n > 1:
        reversal = identity(n)[::-1]
        turn = turn @ SpWord.of(gl_block_generator(reversal))
    sigma = integral.sigma @ turn
    sigma_prime = turn.inverse() @ integral.sigma_prime
    dec = SympSmithDecomposition(
        sigma=sigma.matrix,
        d=d,
        sigma_prime=sigma_prime.matrix,
        m=m,
        sigma_word=sigma,
        sigma_prime_word=sigma_prime,
    )
    if not elementary_divisor_chain_ok(d) or not matrix_equal(dec.reconstruct(), g):
        raise InternalError("rational decomposition failed its reconstruction check")
    return dec


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def lines(self):
        out = []
        for c in self.checks:
            line = f"{'PASS' if c.passed else 'FAIL'} {c.name}"
            if c.detail:
                line += f": {c.detail}"
            out.append(line)
        return out

    def to_dict(self):
        return {c.name: {"passed": c.passed, "detail": c.detail} for c in self.checks}


def _witness_checks(name, w, size):
    if w.shape != (size, size):
        return [Check(f"{name} shape", False, f"expected {size}x{size}, got {w.shape[0]}x{w.shape[1]}")]
    integral = is_integral(w)
    symplectic = is_symplectic(w)
    return [
        Check(f"{name} integral", integral),
        Check(f"{name} symplectic", symplectic),
    ]


def verify_decomposition(g, dec):
    """Check every invariant of a rational decomposition and report each one.

    Never raises on a failed invariant; failures are report entries.
    """
    g = as_exact_matrix(g)
    n = len(dec.d)
    size = 2 * n
    checks = []
    shape_ok = g.shape == (size, size) and n > 0
    checks.append(Check("input shape", shape_ok, "" if shape_ok else f"g is {g.shape[0]}x{g.shape[1]}, d has {n} entries"))
    sigma = as_exact_matrix(dec.sigma)
    sigma_prime = as_exact_matrix(dec.sigma_prime)
    checks += _witness_checks("sigma", sigma, size)
    checks += _witness_checks("sigma_prime", sigma_prime, size)
    positive = n > 0 and all(isinstance(x, int) and x >= 1 for x in dec.d)
    checks.append(Check("d positive integers", positive, "" if positive else f"d = {list(dec.d)}"))
    chain = positive and elementary_divisor_chain_ok(tuple(dec.d))
    checks.append(Check("d divisibility chain", chain, "" if chain else f"d = {list(dec.d)}"))
    shapes_fit = shape_ok and sigma.shape == (size, size) and sigma_prime.shape == (size, size)
    if shapes_fit and positive:
        rebuilt = matrix_equal(sigma @ symplectic_diagonal(dec.d) @ sigma_prime, g)
        checks.append(Check("reconstruction", rebuilt, "" if rebuilt else "sigma . diag(d, 1/d) . sigma' != g"))
    else:
        checks.append(Check("reconstruction", False, "skipped: shapes or d invalid"))
    return VerificationReport(tuple(checks))


def verify_integral_decomposition(g, dec):
    """Report on an IntegralSympSmith: chains, lambda^2-constancy, witnesses, reconstruction."""
    g = as_int_matrix(g)
    n = dec.n
    a = dec.a
    checks = [
        Check("a positive", all(x > 0 for x in a)),
        Check("a_1 | ... | a_n", elementary_divisor_chain_ok(tuple(a[:n]))),
        Check("a_n | a_2n", a[2 * n - 1] % a[n - 1] == 0),
        Check(
            "a_j a_{n+j} = lambda^2",
            all(a[j] * a[n + j] == dec.lambda_sq for j in range(n)),
            f"lambda^2 = {dec.lambda_sq}",
        ),
        Check("sigma word consistent", dec.sigma.consistent()),
        Check("sigma_prime word consistent", dec.sigma_prime.consistent()),
        Check("reconstruction", matrix_equal(dec.reconstruct(), g)),
    ]
    return VerificationReport(tuple(checks))


def double_coset_invariant(g, decomposition=None):
    """Return the unique d with g in Sp(n, Z) diag(d, d^-1) Sp(n, Z).

    Raises:
        NotSymplecticError: if g is not symplectic
    """
    if decomposition is None:
        decomposition = symp_smith(g)
    return decomposition.d


def double_coset_equal(g, h):
    """True iff g and h lie in the same double coset Sp(n, Z) g Sp(n, Z)."""
    return double_coset_invariant(g) == double_coset_invariant(h)


def elementary_divisor_oracle(g, dec=None):
    """Compare {m d_i} + {m / d_i} with the ordinary Smith divisors of m g.

    Returns:
        tuple: (agrees, expected multiset, Smith divisors), both sorted
    """
    g = as_exact_matrix(g)
    if dec is None:
        dec = symp_smith(g)
    m = DenominatorScale.of(g).m
    expected = sorted([m * x for x in dec.d] + [m // x for x in dec.d])
    divisors = sorted(smith_normal_form(DenominatorScale(m).scale(g)).divisors)
    return expected == divisors, expected, divisors


def inverse_of(g):
    """Exact inverse of a symplectic matrix."""
    return symplectic_inverse(_require_symplectic(g))

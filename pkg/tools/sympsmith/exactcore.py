"""Exact scalars, dense matrices and the standard symplectic form.

Matrices are numpy arrays with ``dtype=object`` whose entries are Python
``int`` (integer matrices) or ``fractions.Fraction`` (rational matrices), so
every product taken with ``@`` is exact and never overflows.

The basis of Z^2n is ordered e_1, ..., e_n, f_1, ..., f_n and the form is
omega = e_1* ^ f_1* + ... + e_n* ^ f_n*, i.e. omega(x, y) = tx J y with
J = (0, 1_n; -1_n, 0). Documentation counts basis vectors from 1, arrays
count from 0: e_j lives at index j - 1 and f_j at index n + j - 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from .errors import InvalidArgumentError, InvalidDimensionError, NotInMpError


def zeros(rows, cols):
    """Return a rows x cols object matrix filled with the integer 0."""
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n):
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def diagonal(entries):
    """Return the square diagonal matrix with the given exact entries."""
    entries = list(entries)
    out = zeros(len(entries), len(entries))
    for i, x in enumerate(entries):
        out[i, i] = x
    return out


def frozen(a):
    """Return a read-only copy of the array a."""
    out = np.array(a, dtype=object, copy=True)
    out.flags.writeable = False
    return out


def _to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise InvalidArgumentError(f"boolean entry {x!r} is not a number")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        raise InvalidArgumentError(f"floating-point entry {x!r} is not exact")
    try:
        return Fraction(x)
    except ZeroDivisionError:
        raise InvalidArgumentError(f"entry {x!r} has a zero denominator") from None
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"entry {x!r} is not a rational number") from None


def _to_int(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, (bool, np.bool_)):
        return int(x)
    q = _to_fraction(x)
    if q.denominator != 1:
        raise InvalidArgumentError(f"entry {q} is not an integer")
    return q.numerator


def _as_2d(rows):
    arr = np.array(rows, dtype=object)
    if arr.ndim != 2:
        raise InvalidDimensionError(f"expected a 2-dimensional matrix, got {arr.ndim} dimensions")
    return arr


def as_int_matrix(rows):
    """Convert nested sequences (or an array) to an exact integer matrix.

    Raises:
        InvalidDimensionError: if the input is not rectangular
        InvalidArgumentError: if an entry is not an integer
    """
    arr = _as_2d(rows)
    out = zeros(*arr.shape)
    for idx, x in np.ndenumerate(arr):
        out[idx] = _to_int(x)
    return out


def as_rat_matrix(rows):
    """Convert nested sequences (or an array) to an exact rational matrix.

    Entries may be ints, Fractions, other ``numbers.Rational`` values or
    strings such as ``"-3/4"``. Fractions are always reduced with a
    positive denominator.
    """
    arr = _as_2d(rows)
    out = zeros(*arr.shape)
    for idx, x in np.ndenumerate(arr):
        out[idx] = _to_fraction(x)
    return out


def as_int_vector(entries):
    arr = np.array(entries, dtype=object)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InvalidDimensionError("expected a nonempty 1-dimensional vector")
    out = np.empty(arr.shape[0], dtype=object)
    for i, x in enumerate(arr):
        out[i] = _to_int(x)
    return out


def as_exact_matrix(g):
    """Return g unchanged if it is already an object matrix, else as_rat_matrix(g)."""
    if isinstance(g, np.ndarray) and g.dtype == object:
        if g.ndim != 2:
            raise InvalidDimensionError(f"expected a 2-dimensional matrix, got {g.ndim} dimensions")
        return g
    return as_rat_matrix(g)


def is_integral(g):
    return all(Fraction(x).denominator == 1 for x in as_exact_matrix(g).flat)


def to_int_matrix(g):
    """Return the rational matrix g as an integer matrix (entries must be integral)."""
    return as_int_matrix(g)


def matrix_equal(a, b):
    """Structural equality of two exact matrices."""
    a, b = np.asarray(a, dtype=object), np.asarray(b, dtype=object)
    if a.shape != b.shape:
        return False
    return all(x == y for x, y in zip(a.flat, b.flat))


def is_zero(a):
    return all(x == 0 for x in np.asarray(a, dtype=object).flat)


def half_dimension(g):
    """Return n for a 2n x 2n matrix.

    Raises:
        InvalidDimensionError: if g is not square of positive even size
    """
    rows, cols = g.shape
    if rows != cols or rows == 0 or rows % 2:
        raise InvalidDimensionError(f"expected a 2n x 2n matrix, got {rows}x{cols}")
    return rows // 2


def standard_form_matrix(n):
    """Return J = (0, 1_n; -1_n, 0) of size 2n x 2n."""
    if n < 1:
        raise InvalidDimensionError(f"dimension n must be at least 1, got {n}")
    out = zeros(2 * n, 2 * n)
    for i in range(n):
        out[i, n + i] = 1
        out[n + i, i] = -1
    return out


def symplectic_defect(g):
    """Return tg J g - J, the zero matrix exactly when g is symplectic.

    Raises:
        InvalidDimensionError: if g is not 2n x 2n
    """
    g = as_exact_matrix(g)
    J = standard_form_matrix(half_dimension(g))
    return g.T @ J @ g - J


def first_defect_entry(g):
    """Return the (row, col) of the first nonzero defect entry, or None."""
    defect = symplectic_defect(g)
    for idx, x in np.ndenumerate(defect):
        if x != 0:
            return idx
    return None


def is_symplectic(g):
    try:
        return is_zero(symplectic_defect(g))
    except (InvalidDimensionError, InvalidArgumentError):
        return False


def _mp_scale_with_reason(g):
    g = as_int_matrix(g)
    n = half_dimension(g)
    J = standard_form_matrix(n)
    form = g.T @ J @ g
    c = form[0, n]
    if not matrix_equal(form, c * J):
        return None, "tg J g is not proportional to J"
    if c <= 0:
        return None, f"proportionality constant {c} is not positive"
    return c, None


def mp_scale(g):
    """Return lambda^2 with tg J g = lambda^2 J, or None if g is not in Mp(n, Z).

    The scale is any positive integer; it need not be a perfect square.
    """
    scale, _ = _mp_scale_with_reason(g)
    return scale


def require_mp_scale(g):
    """Like mp_scale but raise NotInMpError with the reason instead of returning None."""
    scale, reason = _mp_scale_with_reason(g)
    if scale is None:
        raise NotInMpError(reason)
    return scale


def content(g):
    """Return the gcd of all entries (0 for the zero matrix)."""
    return math.gcd(*(int(x) for x in np.asarray(g, dtype=object).flat))


@dataclass(frozen=True)
class BlockParts:
    """The n x n blocks of a 2n x 2n matrix g = (alpha, beta; gamma, delta)."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray

    @property
    def n(self):
        return self.alpha.shape[0]

    def assemble(self):
        return np.block([[self.alpha, self.beta], [self.gamma, self.delta]])


def block_parts(g):
    g = as_exact_matrix(g)
    n = half_dimension(g)
    return BlockParts(
        alpha=g[:n, :n].copy(),
        beta=g[:n, n:].copy(),
        gamma=g[n:, :n].copy(),
        delta=g[n:, n:].copy(),
    )


def satisfies_block_criterion(g):
    """Check the block description of Sp(n): ta.c = tc.a, tb.d = td.b, ta.d - tc.b = 1."""
    try:
        parts = block_parts(g)
    except (InvalidDimensionError, InvalidArgumentError):
        return False
    a, b, c, d = parts.alpha, parts.beta, parts.gamma, parts.delta
    return (
        matrix_equal(a.T @ c, c.T @ a)
        and matrix_equal(b.T @ d, d.T @ b)
        and matrix_equal(a.T @ d - c.T @ b, identity(parts.n))
    )


def is_primitive(v):
    """True iff v is nonzero with entries of gcd 1."""
    return math.gcd(*(int(x) for x in v)) == 1


def symplectic_inverse(g):
    """Return g^-1 = -J tg J; exact for symplectic g and integral when g is."""
    g = as_exact_matrix(g)
    J = standard_form_matrix(half_dimension(g))
    return -(J @ g.T @ J)


def _to_domain_matrix(g):
    g = as_exact_matrix(g)
    rows, cols = g.shape
    if is_integral(g):
        entries = [[ZZ(int(Fraction(x))) for x in row] for row in g]
        return DomainMatrix(entries, (rows, cols), ZZ)
    entries = [[QQ(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in g]
    return DomainMatrix(entries, (rows, cols), QQ)


def _from_domain_element(x):
    if hasattr(x, "denominator") and not isinstance(x, int):
        num, den = x.numerator, x.denominator
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        q = Fraction(int(num), int(den))
        return q.numerator if q.denominator == 1 else q
    return int(x)


def determinant(g):
    """Exact determinant of a square integer or rational matrix."""
    g = as_exact_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise InvalidDimensionError(f"determinant needs a square matrix, got {g.shape[0]}x{g.shape[1]}")
    if g.shape[0] == 0:
        return 1
    return _from_domain_element(_to_domain_matrix(g).det())


def exact_inverse(g):
    """Exact inverse of a square matrix as a rational matrix.

    Raises:
        InvalidArgumentError: if g is singular
    """
    g = as_exact_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise InvalidDimensionError(f"inverse needs a square matrix, got {g.shape[0]}x{g.shape[1]}")
    dm = _to_domain_matrix(g).convert_to(QQ)
    try:
        inv = dm.inv()
    except DMNonInvertibleMatrixError:
        raise InvalidArgumentError("matrix is singular") from None
    rows = [[Fraction(int(x.p), int(x.q)) for x in row] for row in inv.to_Matrix().tolist()]
    return as_rat_matrix(rows)

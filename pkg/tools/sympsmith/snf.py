"""Smith normal form over Z with unimodular witnesses.

smith_normal_form(g) returns u, v with |det| = 1 and a divisor chain
a_1 | a_2 | ... | a_r (r = min(rows, cols), all a_i >= 0) such that
g = u . diag(a) . v, the diagonal being padded with zero rows or columns
for rectangular g. The elimination keeps u^-1 and v^-1 alongside, so the
inverses of the witnesses are exact and free.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from .errors import InternalError, InvalidArgumentError, PreconditionViolation
from .exactcore import (
    as_int_matrix,
    as_int_vector,
    determinant,
    frozen,
    identity,
    is_primitive,
    matrix_equal,
    zeros,
)


@dataclass(frozen=True)
class SnfDecomposition:
    """g = u . diag(divisors) . v with u, v unimodular."""

    u: np.ndarray
    divisors: tuple
    v: np.ndarray
    u_inv: np.ndarray
    v_inv: np.ndarray
    det_u: int
    det_v: int

    @property
    def shape(self):
        return self.u.shape[0], self.v.shape[0]

    def diagonal(self):
        out = zeros(*self.shape)
        for i, a in enumerate(self.divisors):
            out[i, i] = a
        return out

    def reconstruct(self):
        return self.u @ self.diagonal() @ self.v


def elementary_divisor_chain_ok(divisors):
    """True iff every entry is >= 0 and each one divides the next (0 divides only 0)."""
    if any(a < 0 for a in divisors):
        return False
    for a, b in zip(divisors, divisors[1:]):
        if a == 0:
            if b != 0:
                return False
        elif b % a:
            return False
    return True


class _SmithReducer:
    """Row/column elimination keeping g = u . a . v at every step."""

    def __init__(self, g):
        self.a = np.array(g, dtype=object, copy=True)
        self.rows, self.cols = self.a.shape
        self.u = identity(self.rows)
        self.u_inv = identity(self.rows)
        self.v = identity(self.cols)
        self.v_inv = identity(self.cols)
        self.det_u = 1
        self.det_v = 1

    # elementary operations; each one updates a witness and its inverse

    def swap_rows(self, i, j):
        self.a[[i, j]] = self.a[[j, i]]
        self.u[:, [i, j]] = self.u[:, [j, i]]
        self.u_inv[[i, j]] = self.u_inv[[j, i]]
        self.det_u = -self.det_u

    def swap_cols(self, i, j):
        self.a[:, [i, j]] = self.a[:, [j, i]]
        self.v[[i, j]] = self.v[[j, i]]
        self.v_inv[:, [i, j]] = self.v_inv[:, [j, i]]
        self.det_v = -self.det_v

    def add_row(self, i, j, k):
        """row_i += k * row_j"""
        self.a[i] += k * self.a[j]
        self.u[:, j] -= k * self.u[:, i]
        self.u_inv[i] += k * self.u_inv[j]

    def add_col(self, i, j, k):
        """col_i += k * col_j"""
        self.a[:, i] += k * self.a[:, j]
        self.v[j] -= k * self.v[i]
        self.v_inv[:, i] += k * self.v_inv[:, j]

    def negate_row(self, i):
        self.a[i] = -self.a[i]
        self.u[:, i] = -self.u[:, i]
        self.u_inv[i] = -self.u_inv[i]
        self.det_u = -self.det_u

    def _smallest_entry(self, t):
        best = None
        for i in range(t, self.rows):
            for j in range(t, self.cols):
                x = self.a[i, j]
                if x and (best is None or abs(x) < abs(self.a[best])):
                    best = (i, j)
        return best

    def _non_multiple_row(self, t):
        p = self.a[t, t]
        for i in range(t + 1, self.rows):
            for j in range(t + 1, self.cols):
                if self.a[i, j] % p:
                    return i
        return None

    def _settle_pivot(self, t):
        """Bring a divisor of the remaining block to (t, t) and clear its row and column.

        Returns False when the remaining block is zero.
        """
        while True:
            pivot = self._smallest_entry(t)
            if pivot is None:
                return False
            i, j = pivot
            if i != t:
                self.swap_rows(t, i)
            if j != t:
                self.swap_cols(t, j)
            p = self.a[t, t]
            dirty = False
            for i in range(t + 1, self.rows):
                q = self.a[i, t] // p
                if q:
                    self.add_row(i, t, -q)
                dirty = dirty or self.a[i, t] != 0
            for j in range(t + 1, self.cols):
                q = self.a[t, j] // p
                if q:
                    self.add_col(j, t, -q)
                dirty = dirty or self.a[t, j] != 0
            if dirty:
                continue
            # divisibility repair: a pivot that does not divide the rest of the
            # block is replaced by a remainder on the next pass
            bad = self._non_multiple_row(t)
            if bad is None:
                return True
            self.add_row(t, bad, 1)

    def run(self):
        for t in range(min(self.rows, self.cols)):
            if not self._settle_pivot(t):
                break
            if self.a[t, t] < 0:
                self.negate_row(t)

    def normalize_det_v(self):
        """Move a sign from v into u so that det v = +1; the divisors are untouched."""
        if self.det_v == 1 or self.cols == 0:
            return
        self.v[0] = -self.v[0]
        self.v_inv[:, 0] = -self.v_inv[:, 0]
        self.det_v = 1
        if self.rows and self.cols:
            self.u[:, 0] = -self.u[:, 0]
            self.u_inv[0] = -self.u_inv[0]
            self.det_u = -self.det_u


def smith_normal_form(g, sl_normalized=False):
    """Compute the Smith normal form of an integer matrix.

    Args:
        g: any rectangular integer matrix (array or nested sequences)
        sl_normalized (bool): if True, det v is made +1 by moving a sign
            into u

    Returns:
        SnfDecomposition: with g = u . diag(divisors) . v exactly

    Raises:
        InternalError: if the reconstruction check fails
    """
    g = as_int_matrix(g)
    reducer = _SmithReducer(g)
    reducer.run()
    if sl_normalized:
        reducer.normalize_det_v()
    r = min(reducer.rows, reducer.cols)
    dec = SnfDecomposition(
        u=frozen(reducer.u),
        divisors=tuple(int(reducer.a[i, i]) for i in range(r)),
        v=frozen(reducer.v),
        u_inv=frozen(reducer.u_inv),
        v_inv=frozen(reducer.v_inv),
        det_u=reducer.det_u,
        det_v=reducer.det_v,
    )
    if not matrix_equal(dec.reconstruct(), g) or not elementary_divisor_chain_ok(dec.divisors):
        raise InternalError("Smith normal form failed its reconstruction check")
    return dec


def minor_gcd_divisors(g, k):
    """Return the gcd of all k x k minors of g (the k-th determinantal divisor).

    Against smith_normal_form this equals a_1 * ... * a_k.

    Raises:
        InvalidArgumentError: if k is not in 1..min(rows, cols)
    """
    g = as_int_matrix(g)
    rows, cols = g.shape
    if not 1 <= k <= min(rows, cols):
        raise InvalidArgumentError(f"minor size k={k} outside 1..{min(rows, cols)}")
    acc = 0
    for row_idx in itertools.combinations(range(rows), k):
        for col_idx in itertools.combinations(range(cols), k):
            acc = math.gcd(acc, determinant(g[np.ix_(row_idx, col_idx)]))
            if acc == 1:
                return 1
    return acc


def bezout_matrix(a, b):
    """Return the det-1 matrix sending (a, b) to (gcd(a, b), 0).

    With s a + t b = g = gcd(a, b) >= 0 the matrix is (s, t; -b/g, a/g).
    (a, 0) with a > 0 gives the identity, (a, 0) with a < 0 gives -1_2,
    and (0, 0) gives the identity.
    """
    s, t, g = (int(x) for x in igcdex(int(a), int(b)))
    if g == 0:
        return identity(2)
    return as_int_matrix([[s, t], [-int(b) // g, int(a) // g]])


def complete_primitive_to_unimodular(v):
    """Return sigma_0 in SL(n, Z) (det exactly +1) with sigma_0 . v = e_1.

    Raises:
        PreconditionViolation: if v is not primitive, or v = (-1) with n = 1
            (SL(1, Z) is trivial)
    """
    x = np.array(as_int_vector(v), dtype=object)
    if not is_primitive(x):
        raise PreconditionViolation(f"vector {list(x)} is not primitive")
    n = x.shape[0]
    sigma0 = identity(n)
    for i in range(n - 1, 0, -1):
        if x[i] == 0:
            continue
        m = bezout_matrix(x[0], x[i])
        sigma0[[0, i]] = m @ sigma0[[0, i]]
        x[[0, i]] = m @ x[[0, i]]
    if x[0] == -1:
        if n == 1:
            raise PreconditionViolation("SL(1, Z) cannot send -1 to 1")
        sigma0[[0, 1]] = -sigma0[[0, 1]]
        x[[0, 1]] = -x[[0, 1]]
    if x[0] != 1 or any(x[1:]):
        raise InternalError(f"primitive completion ended at {list(x)}")
    return sigma0

"""Integral symplectic generators, labelled words and the primitive-vector reduction.

Every constructor checks its output: an SpElement cannot be built from a
matrix that is not integral symplectic of the announced size.

Plane j (1-based) is the pair of coordinates (e_j, f_j), i.e. array
indices (j - 1, n + j - 1).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InternalError, InvalidArgumentError, InvalidGeneratorError, PreconditionViolation
from .exactcore import (
    as_int_matrix,
    as_int_vector,
    determinant,
    exact_inverse,
    frozen,
    identity,
    is_primitive,
    is_symplectic,
    symplectic_inverse,
    to_int_matrix,
    zeros,
)
from .snf import bezout_matrix, complete_primitive_to_unimodular

# Bound on the parameters of randomly drawn generators.
GENERATOR_COEFF_BOUND = 5
# Defaults for generated instances.
DEFAULT_WORD_LENGTH = 12
DEFAULT_DMAX = 30


@dataclass(frozen=True)
class SpElement:
    """An element of Sp(n, Z) stored as a read-only 2n x 2n integer matrix."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_int_matrix(self.matrix)
        if m.shape != (2 * self.n, 2 * self.n):
            raise InvalidGeneratorError(f"expected a {2 * self.n}x{2 * self.n} matrix, got {m.shape[0]}x{m.shape[1]}")
        if not is_symplectic(m):
            raise InvalidGeneratorError("matrix is not symplectic")
        object.__setattr__(self, "matrix", frozen(m))

    @classmethod
    def identity(cls, n):
        return cls(n, identity(2 * n))

    def __matmul__(self, other):
        return SpElement(self.n, self.matrix @ other.matrix)

    def inverse(self):
        return SpElement(self.n, symplectic_inverse(self.matrix))

    def apply(self, v):
        return self.matrix @ np.array(v, dtype=object)


def embed_matrix(m, n, offset):
    """Place a 2k x 2k matrix on planes offset+1..offset+k of Z^2n, identity elsewhere."""
    k = m.shape[0] // 2
    if offset < 0 or offset + k > n:
        raise InvalidArgumentError(f"planes {offset + 1}..{offset + k} do not fit in n={n}")
    idx = [offset + i for i in range(k)] + [n + offset + i for i in range(k)]
    out = identity(2 * n)
    out[np.ix_(idx, idx)] = m
    return out


@dataclass(frozen=True)
class Generator:
    """A labelled factor of a word: which family, with which parameters."""

    kind: str
    params: dict
    element: SpElement
    inverted: bool = False
    offset: int = 0

    def inverse(self):
        return Generator(self.kind, self.params, self.element.inverse(), not self.inverted, self.offset)

    def embed(self, n, offset):
        element = SpElement(n, embed_matrix(self.element.matrix, n, offset))
        return Generator(self.kind, self.params, element, self.inverted, self.offset + offset)

    def to_dict(self):
        return {
            "kind": self.kind,
            "params": self.params,
            "inverted": self.inverted,
            "offset": self.offset,
        }

    def label(self):
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        label = f"{self.kind}({args})"
        if self.offset:
            label += f"@+{self.offset}"
        return label + "^-1" if self.inverted else label


@dataclass(frozen=True)
class SpWord:
    """An ordered product of generators with its cached value.

    product == factors[0] @ factors[1] @ ... @ factors[-1]; the cached
    product is the authoritative value.
    """

    n: int
    factors: tuple = ()
    product: SpElement = field(default=None)

    def __post_init__(self):
        if self.product is None:
            object.__setattr__(self, "product", SpElement.identity(self.n))

    @classmethod
    def identity(cls, n):
        return cls(n)

    @classmethod
    def of(cls, generator):
        return cls(generator.element.n, (generator,), generator.element)

    @property
    def matrix(self):
        return self.product.matrix

    def __len__(self):
        return len(self.factors)

    def __matmul__(self, other):
        if self.n != other.n:
            raise InvalidArgumentError(f"cannot compose words on n={self.n} and n={other.n}")
        return SpWord(self.n, self.factors + other.factors, self.product @ other.product)

    def inverse(self):
        factors = tuple(f.inverse() for f in reversed(self.factors))
        return SpWord(self.n, factors, self.product.inverse())

    def embed(self, n, offset):
        factors = tuple(f.embed(n, offset) for f in self.factors)
        product = SpElement(n, embed_matrix(self.product.matrix, n, offset))
        return SpWord(n, factors, product)

    def consistent(self):
        """Recompute the product from the factors and compare it to the cache."""
        acc = identity(2 * self.n)
        for f in self.factors:
            acc = acc @ f.element.matrix
        return all(x == y for x, y in zip(acc.flat, self.product.matrix.flat))


def embed_sl2_plane(n, j, m):
    """Act by the 2x2 matrix m (det 1) on plane j, identity elsewhere.

    Raises:
        InvalidArgumentError: if j is not in 1..n
        InvalidGeneratorError: if det m != 1
    """
    if not 1 <= j <= n:
        raise InvalidArgumentError(f"plane index j={j} outside 1..{n}")
    m = as_int_matrix(m)
    if m.shape != (2, 2) or determinant(m) != 1:
        raise InvalidGeneratorError("plane generator must be a 2x2 integer matrix of determinant 1")
    return SpElement(n, embed_matrix(m, n, j - 1))


def embed_gl_block(s0):
    """Return diag(s0, ts0^-1) for a unimodular n x n integer matrix s0.

    Raises:
        InvalidGeneratorError: if |det s0| != 1
    """
    s0 = as_int_matrix(s0)
    n = s0.shape[0]
    if s0.shape != (n, n) or n == 0 or abs(determinant(s0)) != 1:
        raise InvalidGeneratorError("GL block must be a square integer matrix of determinant +-1")
    out = zeros(2 * n, 2 * n)
    out[:n, :n] = s0
    out[n:, n:] = to_int_matrix(exact_inverse(s0)).T
    return SpElement(n, out)


def transvection_row(n, coeffs):
    """1 + sum_{1<j<=n} c_j (f_j (x) f_1* - e_1 (x) e_j*), coeffs = (c_2, ..., c_n).

    Right-multiplying a matrix whose alpha block has first column e_1 by
    this element subtracts c_j times column e_1 from column e_j.
    """
    coeffs = [int(c) for c in coeffs]
    if n < 1 or len(coeffs) != n - 1:
        raise InvalidArgumentError(f"transvection_row on n={n} needs {n - 1} coefficients, got {len(coeffs)}")
    m = identity(2 * n)
    for jj, c in enumerate(coeffs, start=1):
        m[n + jj, n] += c
        m[0, jj] -= c
    return SpElement(n, m)


def transvection_col(n, coeffs):
    """1 - b_1 e_1 (x) f_1* - sum_{1<j<=n} b_j (e_j (x) f_1* + e_1 (x) f_j*), coeffs = (b_1, ..., b_n)."""
    coeffs = [int(c) for c in coeffs]
    if n < 1 or len(coeffs) != n:
        raise InvalidArgumentError(f"transvection_col on n={n} needs {n} coefficients, got {len(coeffs)}")
    m = identity(2 * n)
    m[0, n] -= coeffs[0]
    for jj, c in enumerate(coeffs[1:], start=1):
        m[jj, n] -= c
        m[0, n + jj] -= c
    return SpElement(n, m)


def weyl_swap(n, indices):
    """Act as (0, 1; -1, 0) on each selected plane; weyl_swap(n, 1..n) == J."""
    m = identity(2 * n)
    for j in sorted(set(indices)):
        if not 1 <= j <= n:
            raise InvalidArgumentError(f"plane index j={j} outside 1..{n}")
        e, f = j - 1, n + j - 1
        m[e, e] = 0
        m[f, f] = 0
        m[e, f] = 1
        m[f, e] = -1
    return SpElement(n, m)


def sl2_generator(n, j, m):
    m = as_int_matrix(m)
    return Generator("sl2_plane", {"j": int(j), "m": m.tolist()}, embed_sl2_plane(n, j, m))


def gl_block_generator(s0):
    s0 = as_int_matrix(s0)
    return Generator("gl_block", {"s0": s0.tolist()}, embed_gl_block(s0))


def transvection_row_generator(n, coeffs):
    coeffs = [int(c) for c in coeffs]
    return Generator("transvection_row", {"coeffs": coeffs}, transvection_row(n, coeffs))


def transvection_col_generator(n, coeffs):
    coeffs = [int(c) for c in coeffs]
    return Generator("transvection_col", {"coeffs": coeffs}, transvection_col(n, coeffs))


def weyl_generator(n, indices):
    planes = sorted({int(j) for j in indices})
    return Generator("weyl_swap", {"planes": planes}, weyl_swap(n, planes))


def gl_elementary_generator(n, i, j, q):
    """gl_block generator for s0 = 1 + q E_ij (0-based, i != j).

    Builds diag(s0, 1 - q E_ji) directly instead of inverting s0.
    """
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InvalidArgumentError(f"elementary GL move needs distinct indices in 0..{n - 1}, got {i}, {j}")
    q = int(q)
    s0 = identity(n)
    s0[i, j] = q
    m = identity(2 * n)
    m[i, j] = q
    m[n + j, n + i] = -q
    return Generator("gl_block", {"s0": s0.tolist()}, SpElement(n, m))


def plane_shear_generator(n, j, q, lower=False):
    """sl2_plane generator (1, q; 0, 1) on plane j, or (1, 0; q, 1) when lower."""
    q = int(q)
    m = [[1, 0], [q, 1]] if lower else [[1, q], [0, 1]]
    return sl2_generator(n, j, m)


def clear_f_coordinates(v):
    """Per-plane phase of the primitive reduction.

    Applies one SL_2 generator per plane j = 1..n, sending
    (x_j, x_{n+j}) to (gcd, 0). Planes that are already (x, 0) with x >= 0
    are skipped.

    Returns:
        tuple: (SpWord sigma, reduced vector sigma . v) where the f
        coordinates of the reduced vector are all zero
    """
    x = as_int_vector(v)
    if x.shape[0] % 2:
        raise InvalidArgumentError(f"vector length {x.shape[0]} is odd")
    if not is_primitive(x):
        raise PreconditionViolation(f"vector {list(x)} is not primitive")
    n = x.shape[0] // 2
    word = SpWord.identity(n)
    for j in range(1, n + 1):
        a, b = x[j - 1], x[n + j - 1]
        if b == 0 and a >= 0:
            continue
        gen = sl2_generator(n, j, bezout_matrix(a, b))
        x = gen.element.apply(x)
        word = SpWord.of(gen) @ word
    return word, x


def reduce_primitive(v):
    """Return a word sigma in Sp(n, Z) with sigma . v = e_1 for primitive v in Z^2n.

    Raises:
        PreconditionViolation: if v is not primitive
    """
    word, x = clear_f_coordinates(v)
    n = word.n
    head = x[:n]
    if head[0] != 1 or any(head[1:]):
        gen = gl_block_generator(complete_primitive_to_unimodular(head))
        x = gen.element.apply(x)
        word = SpWord.of(gen) @ word
    if x[0] != 1 or any(x[1:]):
        raise InternalError(f"primitive reduction ended at {list(x)}")
    return word


def _draw(rng, low, high, size=None):
    if size is None:
        return int(rng.integers(low, high + 1))
    return [int(c) for c in rng.integers(low, high + 1, size=size)]


def random_sl2(rng, bound=GENERATOR_COEFF_BOUND):
    """(1, k; 0, 1)(1, 0; l, 1) with k, l drawn from [-bound, bound]."""
    k, l = _draw(rng, -bound, bound), _draw(rng, -bound, bound)
    return as_int_matrix([[1 + k * l, k], [l, 1]])


def random_unimodular(n, rng, bound=GENERATOR_COEFF_BOUND):
    """A unimodular n x n matrix built from n + 1 row additions and a random sign."""
    m = identity(n)
    if n > 1:
        for _ in range(n + 1):
            i, j = rng.choice(n, size=2, replace=False)
            m[int(i)] += _draw(rng, -bound, bound) * m[int(j)]
    if _draw(rng, 0, 1):
        m[0] = -m[0]
    return m


def _random_sl2_factor(n, rng):
    return sl2_generator(n, _draw(rng, 1, n), random_sl2(rng))


def _random_gl_block_factor(n, rng):
    return gl_block_generator(random_unimodular(n, rng))


def _random_transvection_row_factor(n, rng):
    return transvection_row_generator(n, _draw(rng, -GENERATOR_COEFF_BOUND, GENERATOR_COEFF_BOUND, n - 1))


def _random_transvection_col_factor(n, rng):
    return transvection_col_generator(n, _draw(rng, -GENERATOR_COEFF_BOUND, GENERATOR_COEFF_BOUND, n))


def _random_weyl_factor(n, rng):
    return weyl_generator(n, [j for j in range(1, n + 1) if _draw(rng, 0, 1)])


# Generator families random_sp draws from, keyed by the Generator.kind they produce
GENERATOR_FAMILIES = {
    "sl2_plane": _random_sl2_factor,
    "gl_block": _random_gl_block_factor,
    "transvection_row": _random_transvection_row_factor,
    "transvection_col": _random_transvection_col_factor,
    "weyl_swap": _random_weyl_factor,
}


def get_family(name):
    """Return the random factor builder for a generator family.

    Raises:
        KeyError: if no family has this name
    """
    if name in GENERATOR_FAMILIES:
        return GENERATOR_FAMILIES[name]
    raise KeyError(f"No generator family named: {name}")


def random_sp(n, word_length, seed, families=None):
    """Seeded random word of word_length factors in Sp(n, Z).

    Factors are drawn uniformly from the generator families (all of them by
    default). The same (n, word_length, seed, families) always yields the
    same word.
    """
    if n < 1:
        raise InvalidArgumentError(f"dimension n must be at least 1, got {n}")
    names = list(families) if families else list(GENERATOR_FAMILIES)
    builders = [get_family(name) for name in names]
    rng = np.random.default_rng(seed)
    word = SpWord.identity(n)
    for _ in range(word_length):
        builder = builders[_draw(rng, 0, len(builders) - 1)]
        word = word @ SpWord.of(builder(n, rng))
    return word


def random_divisor_chain(n, dmax, rng):
    """Random d_1 | d_2 | ... | d_n with every entry in 1..dmax.

    d_1 is uniform in 1..dmax; each later entry multiplies the previous one
    by a factor in 1..6 that keeps it within dmax.
    """
    if n < 1 or dmax < 1:
        raise InvalidArgumentError(f"need n >= 1 and dmax >= 1, got n={n}, dmax={dmax}")
    d = [_draw(rng, 1, dmax)]
    for _ in range(n - 1):
        d.append(d[-1] * _draw(rng, 1, min(6, dmax // d[-1])))
    return tuple(d)

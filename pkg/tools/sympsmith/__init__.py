"""
Symplectic Smith normal form package.

Exact decompositions g = sigma . diag(d, 1/d) . sigma' of rational
symplectic matrices with integral symplectic witnesses, the ordinary Smith
normal form they are built on, seeded generators and per-prime exponents.
"""

from .errors import (
    InternalError,
    InvalidArgumentError,
    InvalidDimensionError,
    InvalidGeneratorError,
    MatrixFileError,
    NotInMpError,
    NotSymplecticError,
    PreconditionViolation,
    SympSmithError,
)
from .exactcore import is_symplectic, mp_scale, standard_form_matrix
from .localdata import LocalCartanExponents, local_cartan_exponents, reconstruct_global
from .snf import SnfDecomposition, minor_gcd_divisors, smith_normal_form
from .sympgen import SpWord, random_sp, reduce_primitive
from .sympsnf import (
    IntegralSympSmith,
    SympSmithDecomposition,
    double_coset_equal,
    double_coset_invariant,
    symp_smith,
    symp_smith_integral,
    verify_decomposition,
)

__version__ = "0.1.0"

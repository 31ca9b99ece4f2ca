"""Per-prime Cartan exponents derived from the global invariant d.

Over Q_p the group Sp(n, Z) sits inside Sp(n, Z_p) and p-adic units are
absorbed by that maximal compact subgroup, so the local normal form of g at
p is diag(p^k_1, ..., p^k_n, p^-k_1, ..., p^-k_n) with k_i the p-adic
valuations of the global d. The exponents are listed nonincreasing,
k_1 >= ... >= k_n >= 0, which is d's chain read backwards:

    exps[i] = v_p(d_{n-i})        (0-based i)
"""

from dataclasses import dataclass

from sympy import isprime, multiplicity, primefactors

from .errors import InvalidArgumentError
from .sympsnf import double_coset_invariant


@dataclass(frozen=True)
class LocalCartanExponents:
    p: int
    exps: tuple

    def __post_init__(self):
        if not isprime(self.p):
            raise InvalidArgumentError(f"{self.p} is not prime")
        exps = tuple(int(k) for k in self.exps)
        if any(k < 0 for k in exps) or any(a < b for a, b in zip(exps, exps[1:])):
            raise InvalidArgumentError(f"exponents {list(exps)} are not nonincreasing and nonnegative")
        object.__setattr__(self, "exps", exps)

    def line(self):
        """The report line "p: k_1 k_2 ... k_n"."""
        return f"{self.p}: " + " ".join(str(k) for k in self.exps)

    def to_dict(self):
        return {"p": self.p, "exps": list(self.exps)}


def require_prime(p):
    p = int(p)
    if not isprime(p):
        raise InvalidArgumentError(f"{p} is not prime")
    return p


def local_exponents_from_invariant(d, p):
    """Cartan exponents at p of the double coset with invariant d."""
    p = require_prime(p)
    return LocalCartanExponents(p, tuple(multiplicity(p, x) for x in reversed(d)))


def local_cartan_exponents(g, p):
    """Cartan exponents of the symplectic matrix g at the prime p.

    Raises:
        InvalidArgumentError: if p is not prime
        NotSymplecticError: if g is not symplectic
    """
    p = require_prime(p)
    return local_exponents_from_invariant(double_coset_invariant(g), p)


def support_primes_of_invariant(d):
    return [int(p) for p in primefactors(d[-1])] if d else []


def support_primes(g):
    """Primes dividing d_n, i.e. the primes with a nonzero exponent."""
    return support_primes_of_invariant(double_coset_invariant(g))


def local_report(d, primes=None):
    """Local exponents of d at the given primes (its support primes by default)."""
    if primes is None:
        primes = support_primes_of_invariant(d)
    return [local_exponents_from_invariant(d, p) for p in primes]


def reconstruct_global(local_data, n):
    """Rebuild d from per-prime exponents; primes absent from the list contribute 1.

    Raises:
        InvalidArgumentError: on duplicate primes or exponent lists of the
            wrong length
    """
    seen = set()
    d = [1] * n
    for local in local_data:
        if local.p in seen:
            raise InvalidArgumentError(f"prime {local.p} appears more than once")
        seen.add(local.p)
        if len(local.exps) != n:
            raise InvalidArgumentError(f"prime {local.p} has {len(local.exps)} exponents, expected {n}")
        for i in range(n):
            d[i] *= local.p ** local.exps[n - 1 - i]
    return tuple(d)

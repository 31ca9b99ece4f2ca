from pathlib import Path

import numpy as np
import pytest

from sympsmith.sympgen import random_divisor_chain, random_sp
from sympsmith.sympsnf import plant

MATRICES = Path(__file__).resolve().parent.parent / "data" / "input" / "matrices"


@pytest.fixture
def matrices():
    return MATRICES


def planted_instance(n, seed, length=12, dmax=30):
    """Seeded (g, d) with g = sigma . diag(d, 1/d) . sigma'."""
    sigma = random_sp(n, length, [seed, 1]).matrix
    sigma_prime = random_sp(n, length, [seed, 2]).matrix
    d = random_divisor_chain(n, dmax, np.random.default_rng([seed, 3]))
    return plant(sigma, d, sigma_prime), d

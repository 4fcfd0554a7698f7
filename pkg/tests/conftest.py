import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_hermitian(rng, n, scale=1.0):
    m = random_matrix(rng, n, scale)
    return 0.5 * (m + m.conj().T)


def random_density(rng, n):
    m = random_matrix(rng, n)
    rho = m @ m.conj().T
    return rho / np.trace(rho)

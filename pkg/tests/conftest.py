import numpy as np
import pytest

from unsharp.linalg import random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_effect(dim, rng):
    u = random_unitary(dim, rng)
    return (u * rng.uniform(0, 1, dim)) @ u.conj().T


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)

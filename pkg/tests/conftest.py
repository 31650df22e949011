import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def partial_trace_oracle(rho, dim_a, dim_b):
    """Bob's marginal by explicit double sum over Alice's index."""
    out = np.zeros((dim_b, dim_b), dtype=complex)
    for i in range(dim_b):
        for j in range(dim_b):
            s = 0j
            for a in range(dim_a):
                s += rho[a * dim_b + i, a * dim_b + j]
            out[i, j] = s
    return out


def random_alice_family(rng, dim_a):
    """Complete orthogonal projectors: random unitary basis, random grouping."""
    g = rng.normal(size=(dim_a, dim_a)) + 1j * rng.normal(size=(dim_a, dim_a))
    q, _ = np.linalg.qr(g)
    groups = rng.integers(0, dim_a, size=dim_a)
    projs = []
    for gid in np.unique(groups):
        cols = q[:, groups == gid]
        projs.append(cols @ cols.conj().T)
    return projs

"""Shared fixtures and an independent numpy.linalg oracle.

The package computes everything through hand-rolled compiled Jacobi
kernels; every test that checks numerics compares against the plain
numpy implementations below, built directly from the defining formulas.
"""

import numpy as np
import pytest

SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]

KRON9 = np.array([np.kron(SIGMA[n], SIGMA[m]) for n in range(3) for m in range(3)])

SYY = np.kron(SIGMA[1], SIGMA[1])

QMAGIC = np.zeros((4, 4), dtype=complex)
QMAGIC[:, 0] = np.array([1, 0, 0, 1]) / np.sqrt(2)
QMAGIC[:, 1] = np.array([1j, 0, 0, -1j]) / np.sqrt(2)
QMAGIC[:, 2] = np.array([0, 1j, 1j, 0]) / np.sqrt(2)
QMAGIC[:, 3] = np.array([0, 1, -1, 0]) / np.sqrt(2)


def oracle_spin_flip(rho):
    return SYY @ np.conj(rho) @ SYY


def _psd_root(h):
    w, v = np.linalg.eigh(h)
    w = np.where(np.abs(w) < 1e-14, 0.0, np.clip(w, 0.0, None))
    return (v * np.sqrt(w)) @ v.conj().T


def oracle_wootters_lambdas(rho):
    """Singular values of sqrt(rho) sqrt(rho~), descending."""
    b = _psd_root(rho) @ _psd_root(oracle_spin_flip(rho))
    return np.linalg.svd(b, compute_uv=False)


def oracle_concurrence(rho):
    lam = oracle_wootters_lambdas(rho)
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def oracle_corr_t(rho):
    return np.array(
        [[np.trace(rho @ KRON9[3 * n + m]).real for m in range(3)] for n in range(3)]
    )


def oracle_chsh_m(rho):
    t = oracle_corr_t(rho)
    u = np.linalg.eigvalsh(t.T @ t)
    return u[1] + u[2]


def oracle_linear_entropy(rho):
    return (4.0 / 3.0) * (1.0 - np.trace(rho @ rho).real)


def oracle_fidelity(rho):
    m = QMAGIC.conj().T @ rho @ QMAGIC
    return float(np.linalg.eigvalsh(m.real)[-1])


def oracle_triple(rho):
    return (oracle_linear_entropy(rho), oracle_concurrence(rho), oracle_chsh_m(rho))


def random_density_batch(rng, n):
    """Hilbert-Schmidt draws, independent of the package's samplers."""
    g = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    rho = g @ np.conj(np.swapaxes(g, 1, 2))
    return rho / np.trace(rho, axis1=1, axis2=2).real[:, None, None]


def random_local_unitary(rng):
    """Haar 2x2 (x) 2x2 unitary."""
    us = []
    for _ in range(2):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(g)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        us.append(q)
    return np.kron(us[0], us[1])


def phi_plus():
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    return np.outer(v, v.conj())


def psi_minus():
    v = np.zeros(4, dtype=complex)
    v[1] = 1 / np.sqrt(2)
    v[2] = -1 / np.sqrt(2)
    return np.outer(v, v.conj())


def ket00():
    v = np.zeros(4, dtype=complex)
    v[0] = 1.0
    return np.outer(v, v.conj())


def max_mixed():
    return np.eye(4, dtype=complex) / 4.0


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile every jitted kernel once so timed sections measure math."""
    import bellplane as bp

    batch = random_density_batch(np.random.default_rng(0), 4)
    bp.batch_triples(batch)
    bp.batch_fidelity(batch)
    st = bp.validate(max_mixed())
    bp.state_triple(st)
    bp.fidelity(st)
    bp.optimal_settings(st)
    bp.concurrence(st)
    next(iter(bp.sample_blocks(bp.SamplerConfig(seed=0, generator="boundary", count=1))))
    return True

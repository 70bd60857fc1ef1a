"""The four scalar functionals of a two-qubit state and optimal CHSH settings.

concurrence C, linear entropy S_L, the CHSH criterion m (sum of the two
largest eigenvalues of U = T^t T, violation iff m > 1), and the fully
entangled fraction F. Single-state functions operate on DensityMatrix;
batch_triples and batch_fidelity run the same compiled kernels over
(n, 4, 4) arrays in parallel and are what the Monte Carlo scans use.
"""

from dataclasses import dataclass

import numba
import numpy as np

# The TBB probe is noisy on older system TBB builds and OpenMP is not
# fork-safe; workqueue is always available and plenty for block-parallel
# loops over independent states.
numba.config.THREADING_LAYER = "workqueue"

from numba import njit, prange

from . import kernel
from .qstate import MAGIC_BASIS, DensityMatrix, QuantityTriple

__all__ = [
    "BellSettings",
    "CorrelationData",
    "ConcurrenceDecomposition",
    "NonUnitVector",
    "correlation_matrix",
    "chsh_m",
    "bell_value",
    "optimal_settings",
    "concurrence",
    "fidelity",
    "state_triple",
    "batch_triples",
    "batch_fidelity",
]

UNIT_TOL = 1e-9

# Pauli tensor products sigma_n (x) sigma_m, flattened so entry (n, m)
# of the correlation matrix reads KRON[3n + m].
_KRON = np.zeros((9, 4, 4), dtype=np.complex128)
for _n, _sn in enumerate((kernel.SIGMA_1, kernel.SIGMA_2, kernel.SIGMA_3)):
    for _m, _sm in enumerate((kernel.SIGMA_1, kernel.SIGMA_2, kernel.SIGMA_3)):
        _KRON[3 * _n + _m] = np.kron(_sn, _sm)
_KRON.setflags(write=False)

_FLIP_SIGN = np.array([-1.0, 1.0, 1.0, -1.0])
_FLIP_SIGN.setflags(write=False)

_QMAGIC = MAGIC_BASIS

# Relative threshold below which an eigenvalue of rho is treated as an
# exact zero inside the concurrence square roots. This preserves the
# structural rank deficiency of family states; without it, sqrt()
# amplifies O(1e-16) eigenvalue noise to O(1e-8) in the Wootters values.
_EIG_STRUCTURAL_CLIP = 1e-14


class NonUnitVector(ValueError):
    """A Bell setting vector deviates from unit norm beyond 1e-9."""


@dataclass(frozen=True, eq=False)
class BellSettings:
    """Four real 3-vectors (a, a', b, b') defining a CHSH operator.

    Each is expected to have unit Euclidean norm; consumers verify to
    1e-9 and raise NonUnitVector.
    """

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            v = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a real 3-vector, got shape {v.shape}")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be finite")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def vectors(self):
        return self.a, self.a_prime, self.b, self.b_prime


@dataclass(frozen=True, eq=False)
class CorrelationData:
    """Correlation matrix t_nm = tr(rho sigma_n (x) sigma_m) and the
    ascending eigenvalues u of U = t^t t."""

    t: np.ndarray
    u: np.ndarray


@dataclass(frozen=True, eq=False)
class ConcurrenceDecomposition:
    """Wootters values lambda_1 >= ... >= lambda_4 and the concurrence
    c = max(0, lambda_1 - lambda_2 - lambda_3 - lambda_4)."""

    lambdas: np.ndarray
    c: float


@njit(cache=True)
def _corr_t(rho):
    T = np.empty((3, 3), dtype=np.float64)
    for n in range(3):
        for m in range(3):
            acc = 0.0 + 0.0j
            K = _KRON[3 * n + m]
            for i in range(4):
                for j in range(4):
                    acc += rho[i, j] * K[j, i]
            T[n, m] = acc.real
    return T


@njit(cache=True)
def _u_of_t(T):
    U = np.empty((3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            acc = 0.0
            for k in range(3):
                acc += T[k, i] * T[k, j]
            U[i, j] = acc
    w, V, ok = kernel._jacobi_eigh(U)
    return w, V, ok


@njit(cache=True)
def _conc_lambdas(rho):
    """Wootters values, descending: singular values of sqrt(rho) sqrt(rho~).

    Identical to the usual sqrt(eig(sqrt(rho) rho~ sqrt(rho))) since that
    matrix is B B^dagger for B = sqrt(rho) sqrt(rho~), but the singular
    value route avoids halving the working precision on rank-deficient
    states. The spin flip commutes with the matrix square root, so
    sqrt(rho~) is just the flip of sqrt(rho).
    """
    w, V, ok = kernel._jacobi_eigh(rho)
    wmax = abs(w[3])
    thr = _EIG_STRUCTURAL_CLIP * (wmax if wmax > 1.0 else 1.0)
    for i in range(4):
        if abs(w[i]) <= thr:
            w[i] = 0.0
    sq = np.empty((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            acc = 0.0 + 0.0j
            for k in range(4):
                if w[k] > 0.0:
                    acc += V[i, k] * np.sqrt(w[k]) * np.conj(V[j, k])
            sq[i, j] = acc
    sqt = np.empty((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            sqt[i, j] = _FLIP_SIGN[i] * _FLIP_SIGN[j] * np.conj(sq[3 - i, 3 - j])
    B = np.empty((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            acc = 0.0 + 0.0j
            for k in range(4):
                acc += sq[i, k] * sqt[k, j]
            B[i, j] = acc
    lam, ok2 = kernel._jacobi_sv(B)
    return lam


@njit(cache=True)
def _fidelity_one(rho):
    """Largest eigenvalue of Re(Q^dagger rho Q): the fully entangled fraction."""
    M = np.empty((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            acc = 0.0 + 0.0j
            for k in range(4):
                for l in range(4):
                    acc += np.conj(_QMAGIC[k, i]) * rho[k, l] * _QMAGIC[l, j]
            M[i, j] = acc
    R = np.empty((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            R[i, j] = complex(0.5 * (M[i, j].real + M[j, i].real), 0.0)
    w, V, ok = kernel._jacobi_eigh(R)
    return w[3]


@njit(cache=True)
def _triple_one(rho):
    pur = 0.0
    for i in range(4):
        for j in range(4):
            pur += rho[i, j].real ** 2 + rho[i, j].imag ** 2
    s = (4.0 / 3.0) * (1.0 - pur)
    T = _corr_t(rho)
    u, _, _ = _u_of_t(T)
    m = u[1] + u[2]
    lam = _conc_lambdas(rho)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    if c < 0.0:
        c = 0.0
    return s, c, m


@njit(cache=True, parallel=True)
def _triples_batch(rhos, out):
    for i in prange(rhos.shape[0]):
        s, c, m = _triple_one(rhos[i])
        out[i, 0] = s
        out[i, 1] = c
        out[i, 2] = m


@njit(cache=True, parallel=True)
def _fidelity_batch(rhos, out):
    for i in prange(rhos.shape[0]):
        out[i] = _fidelity_one(rhos[i])


def correlation_matrix(state: DensityMatrix) -> CorrelationData:
    """Pauli correlation matrix t and ascending eigenvalues u of t^t t."""
    t = _corr_t(state.mat)
    u, _, ok = _u_of_t(t)
    if not ok:
        raise kernel.NoConvergence("eigenvalue iteration did not converge")
    t.setflags(write=False)
    u.setflags(write=False)
    return CorrelationData(t, u)


def chsh_m(state: DensityMatrix) -> float:
    """Sum of the two largest eigenvalues of U; CHSH is violated iff m > 1."""
    u = correlation_matrix(state).u
    return float(u[1] + u[2])


def _check_unit(settings: BellSettings):
    for name, v in zip(("a", "a_prime", "b", "b_prime"), settings.vectors()):
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > UNIT_TOL:
            raise NonUnitVector(f"{name} has norm {norm:.12g}, off unit by more than {UNIT_TOL:g}")


def bell_value(state: DensityMatrix, settings: BellSettings) -> float:
    """tr(rho B_CHSH) = a . T(b + b') + a' . T(b - b') for unit settings."""
    _check_unit(settings)
    t = _corr_t(state.mat)
    a, ap, b, bp = settings.vectors()
    return float(a @ t @ (b + bp) + ap @ t @ (b - bp))


def _unit_orthogonal_to(*vs):
    """A unit 3-vector orthogonal to every vector in vs (len(vs) <= 2)."""
    basis = np.eye(3)
    for cand in basis:
        v = cand.copy()
        for u in vs:
            v -= (v @ u) * u
        n = np.linalg.norm(v)
        if n > 0.5:
            return v / n
    raise AssertionError("no orthogonal unit vector found")


def optimal_settings(state: DensityMatrix) -> tuple[BellSettings, float]:
    """Settings achieving the CHSH maximum tr(rho B) = 2 sqrt(m(rho)).

    With z_1, z_2 unit eigenvectors of U for the two largest eigenvalues
    u_1 >= u_2 and phi = atan2(sqrt(u_2), sqrt(u_1)): a = T z_1/||T z_1||,
    a' = T z_2/||T z_2||, b = cos(phi) z_1 + sin(phi) z_2, and b' the
    mirror image, giving 2(||T z_1|| cos phi + ||T z_2|| sin phi). When a
    ||T z_i|| vanishes its coefficient is zero, so any unit vector
    orthogonal to the settings already chosen is substituted; with T = 0
    entirely the canonical axes (x, y, x, y) are returned with value 0.
    """
    t = _corr_t(state.mat)
    u, vecs, ok = _u_of_t(t)
    if not ok:
        raise kernel.NoConvergence("eigenvalue iteration did not converge")
    xhat = np.array([1.0, 0.0, 0.0])
    yhat = np.array([0.0, 1.0, 0.0])
    if np.linalg.norm(t) <= 1e-12:
        settings = BellSettings(xhat, yhat, xhat, yhat)
        return settings, bell_value(state, settings)
    # U is real symmetric, so the Jacobi vectors are real up to roundoff.
    z1 = vecs[:, 2].real
    z2 = vecs[:, 1].real
    z1 = z1 / np.linalg.norm(z1)
    z2 = z2 - (z2 @ z1) * z1
    z2 = z2 / np.linalg.norm(z2)
    u1 = max(u[2], 0.0)
    u2 = max(u[1], 0.0)
    tz1 = t @ z1
    tz2 = t @ z2
    n1 = np.linalg.norm(tz1)
    n2 = np.linalg.norm(tz2)
    a = tz1 / n1 if n1 > 1e-12 else _unit_orthogonal_to()
    ap = tz2 / n2 if n2 > 1e-12 else _unit_orthogonal_to(a)
    phi = np.arctan2(np.sqrt(u2), np.sqrt(u1))
    b = np.cos(phi) * z1 + np.sin(phi) * z2
    bp = np.cos(phi) * z1 - np.sin(phi) * z2
    settings = BellSettings(a, ap, b, bp)
    return settings, bell_value(state, settings)


def concurrence(state: DensityMatrix) -> ConcurrenceDecomposition:
    """Wootters concurrence with its four lambda values (descending)."""
    lam = _conc_lambdas(state.mat)
    c = max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
    lam.setflags(write=False)
    return ConcurrenceDecomposition(lam, c)


def fidelity(state: DensityMatrix) -> float:
    """Fully entangled fraction: max overlap with a maximally entangled state.

    Equals the largest eigenvalue of the real part of rho in the magic
    basis, and satisfies F <= (1 + C)/2.
    """
    return float(_fidelity_one(state.mat))


def state_triple(state: DensityMatrix) -> QuantityTriple:
    """(S_L, C, m) of one state via the same kernels the batch drivers use."""
    s, c, m = _triple_one(state.mat)
    return QuantityTriple(float(s), float(c), float(m))


def batch_triples(rhos: np.ndarray) -> np.ndarray:
    """(n, 3) array of (S_L, C, m) rows for an (n, 4, 4) complex batch."""
    r = np.ascontiguousarray(rhos, dtype=np.complex128)
    if r.ndim != 3 or r.shape[1:] != (4, 4):
        raise ValueError(f"expected an (n, 4, 4) batch, got shape {r.shape}")
    out = np.empty((r.shape[0], 3), dtype=np.float64)
    _triples_batch(r, out)
    return out


def batch_fidelity(rhos: np.ndarray) -> np.ndarray:
    """(n,) array of fully entangled fractions for an (n, 4, 4) batch."""
    r = np.ascontiguousarray(rhos, dtype=np.complex128)
    if r.ndim != 3 or r.shape[1:] != (4, 4):
        raise ValueError(f"expected an (n, 4, 4) batch, got shape {r.shape}")
    out = np.empty(r.shape[0], dtype=np.float64)
    _fidelity_batch(r, out)
    return out

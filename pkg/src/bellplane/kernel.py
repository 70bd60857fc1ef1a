"""Dense complex linear algebra for hermitian matrices up to 4x4.

Everything downstream reduces to eigendecompositions and singular values
of tiny matrices (4x4 states, 3x3 correlation matrices). The solvers here
are cyclic Jacobi sweeps compiled with numba: at this size they are as
accurate as LAPACK, callable from inside compiled parallel loops without
object-mode overhead, and give bit-identical results regardless of how a
batch is partitioned across threads. numpy.linalg serves as the
independent cross-check in the test suite.
"""

from typing import NamedTuple

import numpy as np
from numba import njit

__all__ = [
    "SIGMA_1",
    "SIGMA_2",
    "SIGMA_3",
    "EigenSystem",
    "NotHermitian",
    "NotPSD",
    "NoConvergence",
    "hermitian_eigensystem",
    "psd_sqrt",
]

SIGMA_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
for _m in (SIGMA_1, SIGMA_2, SIGMA_3):
    _m.setflags(write=False)

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10

# Jacobi iteration controls. Convergence is declared when the off-diagonal
# Frobenius norm falls below OFF_TOL relative to the matrix norm; for
# dimension <= 4 this takes 5 to 7 sweeps, so the cap only guards against
# pathological (non-hermitian garbage) input.
OFF_TOL = 1e-14
MAX_SWEEPS = 100


class NotHermitian(ValueError):
    """Input matrix is not hermitian within tolerance."""


class NotPSD(ValueError):
    """Hermitian input has an eigenvalue below the PSD tolerance."""


class NoConvergence(RuntimeError):
    """Jacobi iteration failed to converge within the sweep cap."""


class EigenSystem(NamedTuple):
    """Eigenvalues (real, ascending) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


@njit(cache=True)
def _jacobi_eigh(A):
    """Cyclic Jacobi eigendecomposition of complex hermitian A (n <= 4).

    Returns (values ascending, vector columns, converged flag). Each
    rotation annihilates one off-diagonal pair using the phase of the
    pivot entry, so hermiticity is preserved exactly in floating point.
    """
    n = A.shape[0]
    H = A.copy()
    V = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += H[i, j].real ** 2 + H[i, j].imag ** 2
    fro = np.sqrt(fro)
    thr = OFF_TOL * fro
    converged = False
    for _ in range(MAX_SWEEPS):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * (H[i, j].real ** 2 + H[i, j].imag ** 2)
        off = np.sqrt(off)
        if off <= thr:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = H[p, q]
                r = abs(h)
                if r == 0.0:
                    continue
                phase = h / r
                alpha = H[p, p].real
                beta = H[q, q].real
                tau = (beta - alpha) / (2.0 * r)
                if tau >= 0.0:
                    t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    hkp = H[k, p]
                    hkq = H[k, q]
                    H[k, p] = c * hkp + s * np.conj(phase) * hkq
                    H[k, q] = -s * hkp + c * np.conj(phase) * hkq
                for k in range(n):
                    hpk = H[p, k]
                    hqk = H[q, k]
                    H[p, k] = c * hpk + s * phase * hqk
                    H[q, k] = -s * hpk + c * phase * hqk
                H[p, q] = 0.0
                H[q, p] = 0.0
                H[p, p] = complex(H[p, p].real, 0.0)
                H[q, q] = complex(H[q, q].real, 0.0)
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp + s * np.conj(phase) * vkq
                    V[k, q] = -s * vkp + c * np.conj(phase) * vkq
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = H[i, i].real
    order = np.argsort(w)
    w2 = np.empty(n, dtype=np.float64)
    V2 = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        w2[i] = w[order[i]]
        for k in range(n):
            V2[k, i] = V[k, order[i]]
    return w2, V2, converged


@njit(cache=True)
def _jacobi_sv(B):
    """Singular values of complex B (n <= 4), descending, via one-sided
    Jacobi column orthogonalization. Returns (values, converged flag)."""
    n = B.shape[0]
    A = B.copy()
    converged = False
    for _ in range(MAX_SWEEPS):
        offmax = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = 0.0
                aqq = 0.0
                apq = 0.0 + 0.0j
                for k in range(n):
                    app += A[k, p].real ** 2 + A[k, p].imag ** 2
                    aqq += A[k, q].real ** 2 + A[k, q].imag ** 2
                    apq += np.conj(A[k, p]) * A[k, q]
                r = abs(apq)
                denom = np.sqrt(app * aqq)
                if denom > 0.0 and r / denom > offmax:
                    offmax = r / denom
                if r == 0.0 or denom == 0.0 or r <= 1e-15 * denom:
                    continue
                phase = apq / r
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp + s * np.conj(phase) * akq
                    A[k, q] = -s * akp + c * np.conj(phase) * akq
        if offmax <= 1e-14:
            converged = True
            break
    sv = np.empty(n, dtype=np.float64)
    for p in range(n):
        acc = 0.0
        for k in range(n):
            acc += A[k, p].real ** 2 + A[k, p].imag ** 2
        sv[p] = np.sqrt(acc)
    sv = np.sort(sv)[::-1].copy()
    return sv, converged


def _as_square_complex(mat):
    a = np.ascontiguousarray(mat, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in (2, 3, 4):
        raise ValueError(f"supported dimensions are 2, 3, 4; got {a.shape[0]}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def hermiticity_defect(mat) -> float:
    """Frobenius norm of the skew-hermitian part, ||H - H^dagger||_F."""
    a = _as_square_complex(mat)
    return float(np.linalg.norm(a - a.conj().T))


def hermitian_eigensystem(mat) -> EigenSystem:
    """Eigendecomposition of a hermitian matrix of dimension 2, 3, or 4.

    Returns eigenvalues ascending with orthonormal eigenvector columns,
    satisfying ||H - V diag(w) V^dagger||_F <= 1e-12 ||H||_F. Raises
    NotHermitian if the skew part exceeds 1e-10 relative to max(1, ||H||_F),
    NoConvergence if the sweep cap is hit (pathological input).
    """
    a = _as_square_complex(mat)
    norm = np.linalg.norm(a)
    defect = float(np.linalg.norm(a - a.conj().T))
    if defect > HERMITICITY_TOL * max(1.0, norm):
        raise NotHermitian(
            f"hermiticity defect {defect:.3e} exceeds "
            f"{HERMITICITY_TOL:g} * max(1, ||H||_F)"
        )
    h = 0.5 * (a + a.conj().T)
    w, v, ok = _jacobi_eigh(h)
    if not ok:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    return EigenSystem(w, v)


def psd_sqrt(mat) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-1e-10, 0) are clipped to zero (finite-precision
    states are PSD by construction but carry that much noise); anything
    more negative raises NotPSD. The result R is hermitian with
    R @ R = H to 1e-10 in Frobenius norm.
    """
    w, v = hermitian_eigensystem(mat)
    if w[0] < -PSD_TOL:
        raise NotPSD(f"eigenvalue {w[0]:.3e} is below -{PSD_TOL:g}")
    wc = np.where(w < 0.0, 0.0, w)
    root = (v * np.sqrt(wc)) @ v.conj().T
    return 0.5 * (root + root.conj().T)

"""Validated two-qubit density matrices and elementary state functionals.

The computational basis is ordered |00>, |01>, |10>, |11> everywhere:
constructors, file I/O, and all formulas written against literal matrix
entries assume it.
"""

from dataclasses import dataclass

import numpy as np

from . import kernel
from .kernel import NotHermitian, NotPSD

__all__ = [
    "DensityMatrix",
    "QuantityTriple",
    "TraceNotOne",
    "MAGIC_BASIS",
    "validate",
    "purity",
    "linear_entropy",
    "spin_flip",
    "to_magic_basis",
]

VALIDATION_TOL = 1e-10
RANGE_SLACK = 1e-9

# Columns are the magic basis states (Wootters phase convention):
# (|00> + |11>)/sqrt2, i(|00> - |11>)/sqrt2, i(|01> + |10>)/sqrt2,
# (|01> - |10>)/sqrt2. Local unitaries act on this basis by real
# orthogonal matrices, so maximally entangled states are exactly the
# real unit vectors up to a global phase.
MAGIC_BASIS = np.array(
    [
        [1.0, 1.0j, 0.0, 0.0],
        [0.0, 0.0, 1.0j, 1.0],
        [0.0, 0.0, 1.0j, -1.0],
        [1.0, -1.0j, 0.0, 0.0],
    ],
    dtype=np.complex128,
) / np.sqrt(2.0)
MAGIC_BASIS.setflags(write=False)

# Spin flip in the computational basis: (sigma_y (x) sigma_y) has entries
# s_i s_j on the antidiagonal with signs (-1, 1, 1, -1), so the flip of
# rho is s_i s_j conj(rho[3-i, 3-j]).
_FLIP_SIGN = np.array([-1.0, 1.0, 1.0, -1.0])
_FLIP_SIGN.setflags(write=False)


class TraceNotOne(ValueError):
    """Matrix trace differs from 1 beyond tolerance."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A 4x4 complex matrix certified hermitian, unit-trace, and PSD.

    Construct through validate(); the stored array is read-only.
    """

    mat: np.ndarray


@dataclass(frozen=True)
class QuantityTriple:
    """Linear entropy s, concurrence c, and CHSH criterion m of one state.

    These are the coordinates every map in this package is drawn in.
    Bounds are enforced with 1e-9 slack for floating-point spill:
    s, c in [0, 1] and m in [0, 2].
    """

    s: float
    c: float
    m: float

    def __post_init__(self):
        for name, val, hi in (("s", self.s, 1.0), ("c", self.c, 1.0), ("m", self.m, 2.0)):
            if not np.isfinite(val) or val < -RANGE_SLACK or val > hi + RANGE_SLACK:
                raise ValueError(f"{name}={val!r} outside [0, {hi}] with {RANGE_SLACK:g} slack")


def validate(mat) -> DensityMatrix:
    """Check the three density-matrix invariants and wrap the matrix.

    Order of checks: hermiticity (||rho - rho^dagger||_F <= 1e-10), trace
    (|tr rho - 1| <= 1e-10), positivity (min eigenvalue >= -1e-10). The
    raised error names the violated bound.
    """
    a = np.array(mat, dtype=np.complex128, order="C")
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    defect = float(np.linalg.norm(a - a.conj().T))
    if defect > VALIDATION_TOL:
        raise NotHermitian(
            f"hermiticity defect {defect:.3e} exceeds {VALIDATION_TOL:g}"
        )
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > VALIDATION_TOL:
        raise TraceNotOne(f"trace {tr.real:.12g} deviates from 1 beyond {VALIDATION_TOL:g}")
    h = 0.5 * (a + a.conj().T)
    w, _, ok = kernel._jacobi_eigh(h)
    if not ok:
        raise kernel.NoConvergence("eigenvalue iteration did not converge")
    if w[0] < -VALIDATION_TOL:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} is below -{VALIDATION_TOL:g}")
    a.setflags(write=False)
    return DensityMatrix(a)


def purity(state: DensityMatrix) -> float:
    """tr rho^2, in [1/4, 1] for a two-qubit state."""
    m = state.mat
    return float(np.sum(m.real**2 + m.imag**2))


def linear_entropy(state: DensityMatrix) -> float:
    """S_L = (4/3)(1 - tr rho^2), normalized so the maximum is 1."""
    return (4.0 / 3.0) * (1.0 - purity(state))


def spin_flip(state: DensityMatrix) -> np.ndarray:
    """The spin-flipped matrix (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y)."""
    m = state.mat
    return np.outer(_FLIP_SIGN, _FLIP_SIGN) * np.conj(m[::-1, ::-1])


def to_magic_basis(state: DensityMatrix) -> np.ndarray:
    """Q^dagger rho Q with Q the magic basis; trace and spectrum preserved."""
    q = MAGIC_BASIS
    return q.conj().T @ state.mat @ q

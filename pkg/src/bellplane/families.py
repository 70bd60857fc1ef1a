"""Extremal two-qubit state families and their closed-form quantities.

Four constructions cover the boundary cases of the entropy-concurrence
plane: the X-shaped one-parameter-block class E0, the general X-state
class E1, Werner states, and the states maximizing CHSH violation at
fixed linear entropy (here "MVB" states, the beta-parametrized family on
the curve s = (2/3)(1 - c^2)). reference_curves tabulates the m(s) and
c(s) lines these families trace out.
"""

from dataclasses import dataclass

import numpy as np

from . import qstate
from .qstate import DensityMatrix, QuantityTriple

__all__ = [
    "ConstraintViolation",
    "OutOfRange",
    "OutOfDomain",
    "E0Params",
    "E1Params",
    "MVBParams",
    "make_e0",
    "make_e1",
    "make_werner",
    "make_mvb",
    "closed_form_e0",
    "closed_form_e1",
    "reference_curves",
    "m_werner",
    "m_mems",
    "m_mvb",
    "c_werner",
    "c_mvb",
    "CURVE_DOMAIN_MAX",
]

CONSTRAINT_SLACK = 1e-12
CURVE_DOMAIN_MAX = 2.0 / 3.0


class ConstraintViolation(ValueError):
    """Family parameters violate a feasibility inequality."""


class OutOfRange(ValueError):
    """A scalar family parameter lies outside its admissible interval."""


class OutOfDomain(ValueError):
    """A curve was evaluated outside the interval where it is defined."""


def _finite(name, value):
    v = float(value)
    if not np.isfinite(v):
        raise ConstraintViolation(f"{name} must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class E0Params:
    """Parameters (a, b, c, theta) of the one-coherence X class.

    The state has diagonal (1-a-b, a, b, 0) and coherence (c/2) e^{i theta}
    between |01> and |10>. Feasibility: a, b >= 0, c in [0, 1],
    a b >= c^2/4, and a + b <= 1.
    """

    a: float
    b: float
    c: float
    theta: float

    def __post_init__(self):
        a = _finite("a", self.a)
        b = _finite("b", self.b)
        c = _finite("c", self.c)
        _finite("theta", self.theta)
        if a < 0.0:
            raise ConstraintViolation(f"requires a >= 0, got a={a!r}")
        if b < 0.0:
            raise ConstraintViolation(f"requires b >= 0, got b={b!r}")
        if c < 0.0 or c > 1.0:
            raise ConstraintViolation(f"requires 0 <= c <= 1, got c={c!r}")
        if a * b < c * c / 4.0 - CONSTRAINT_SLACK:
            raise ConstraintViolation(
                f"requires a*b >= c^2/4: a*b={a * b!r} < {c * c / 4.0!r}"
            )
        if a + b > 1.0 + CONSTRAINT_SLACK:
            raise ConstraintViolation(f"requires a + b <= 1, got a+b={a + b!r}")


@dataclass(frozen=True)
class E1Params:
    """Parameters of the general X class: diagonal (d1, d2, d3, d4)
    summing to 1 plus antidiagonal coherences r14 and r23.

    Positivity of the two 2x2 blocks requires d1 d4 >= |r14|^2 and
    d2 d3 >= |r23|^2.
    """

    d1: float
    d2: float
    d3: float
    d4: float
    r14: complex
    r23: complex

    def __post_init__(self):
        d = [_finite(n, getattr(self, n)) for n in ("d1", "d2", "d3", "d4")]
        for name, val in zip(("d1", "d2", "d3", "d4"), d):
            if val < 0.0:
                raise ConstraintViolation(f"requires {name} >= 0, got {val!r}")
        total = sum(d)
        if abs(total - 1.0) > CONSTRAINT_SLACK:
            raise ConstraintViolation(f"diagonal must sum to 1, got {total!r}")
        r14 = complex(self.r14)
        r23 = complex(self.r23)
        if not (np.isfinite(r14.real) and np.isfinite(r14.imag)):
            raise ConstraintViolation(f"r14 must be finite, got {self.r14!r}")
        if not (np.isfinite(r23.real) and np.isfinite(r23.imag)):
            raise ConstraintViolation(f"r23 must be finite, got {self.r23!r}")
        if d[0] * d[3] < abs(r14) ** 2 - CONSTRAINT_SLACK:
            raise ConstraintViolation(
                f"requires d1*d4 >= |r14|^2: {d[0] * d[3]!r} < {abs(r14) ** 2!r}"
            )
        if d[1] * d[2] < abs(r23) ** 2 - CONSTRAINT_SLACK:
            raise ConstraintViolation(
                f"requires d2*d3 >= |r23|^2: {d[1] * d[2]!r} < {abs(r23) ** 2!r}"
            )
        object.__setattr__(self, "r14", r14)
        object.__setattr__(self, "r23", r23)


@dataclass(frozen=True)
class MVBParams:
    """Parameters (beta, theta) with beta in [1, 2]; the state realizes
    m = beta, c = sqrt(beta - 1), s = (2/3)(2 - beta)."""

    beta: float
    theta: float

    def __post_init__(self):
        beta = _finite("beta", self.beta)
        _finite("theta", self.theta)
        if beta < 1.0 or beta > 2.0:
            raise OutOfRange(f"requires 1 <= beta <= 2, got beta={beta!r}")


def make_e0(params: E0Params) -> DensityMatrix:
    """Build the E0 state for params; its concurrence equals params.c."""
    a, b, c, theta = params.a, params.b, params.c, params.theta
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[0, 0] = max(1.0 - a - b, 0.0)
    mat[1, 1] = a
    mat[2, 2] = b
    coh = 0.5 * c * np.exp(1j * theta)
    mat[1, 2] = coh
    mat[2, 1] = np.conj(coh)
    return qstate.validate(mat)


def closed_form_e0(params: E0Params) -> QuantityTriple:
    """(S_L, C, m) of the E0 state without touching the generic pipeline.

    S_L = (4/3)(1 - a^2 - b^2 - (1-a-b)^2 - c^2/2), C = c, and
    m = max(2c^2, (2(a+b) - 1)^2 + c^2).
    """
    a, b, c = params.a, params.b, params.c
    d0 = 1.0 - a - b
    s = (4.0 / 3.0) * (1.0 - a * a - b * b - d0 * d0 - 0.5 * c * c)
    m = max(2.0 * c * c, (2.0 * (a + b) - 1.0) ** 2 + c * c)
    return QuantityTriple(s=s, c=c, m=m)


def make_e1(params: E1Params) -> DensityMatrix:
    """Build the X-shaped state with the given diagonal and coherences."""
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[0, 0] = params.d1
    mat[1, 1] = params.d2
    mat[2, 2] = params.d3
    mat[3, 3] = params.d4
    mat[0, 3] = params.r14
    mat[3, 0] = np.conj(params.r14)
    mat[1, 2] = params.r23
    mat[2, 1] = np.conj(params.r23)
    return qstate.validate(mat)


def closed_form_e1(params: E1Params) -> QuantityTriple:
    """(S_L, C, m) of an X state from its entries.

    The correlation matrix of an X state is block diagonal, giving
    U eigenvalues 4(x + y)^2, 4(x - y)^2, and (d1 - d2 - d3 + d4)^2 with
    x = |r14|, y = |r23|; m is the largest pairwise sum. The concurrence
    is max(0, 2(x - sqrt(d2 d3)), 2(y - sqrt(d1 d4))).
    """
    d1, d2, d3, d4 = params.d1, params.d2, params.d3, params.d4
    x = abs(params.r14)
    y = abs(params.r23)
    s = (4.0 / 3.0) * (
        1.0 - d1 * d1 - d2 * d2 - d3 * d3 - d4 * d4 - 2.0 * x * x - 2.0 * y * y
    )
    c = max(0.0, 2.0 * (x - np.sqrt(d2 * d3)), 2.0 * (y - np.sqrt(d1 * d4)))
    u1 = 4.0 * (x + y) ** 2
    u2 = 4.0 * (x - y) ** 2
    u3 = (d1 - d2 - d3 + d4) ** 2
    m = max(u1 + u2, u1 + u3, u2 + u3)
    return QuantityTriple(s=s, c=c, m=m)


def make_werner(p: float) -> DensityMatrix:
    """Werner state: (1 - p) I/4 + p |Psi-><Psi-| for p in [0, 1].

    Closed forms: s = 1 - p^2, c = max(0, (3p - 1)/2), m = 2p^2, so
    m = 2 - 2s along the whole family.
    """
    p = _finite("p", p)
    if p < 0.0 or p > 1.0:
        raise OutOfRange(f"requires 0 <= p <= 1, got p={p!r}")
    mat = np.diag(
        np.array([1.0 - p, 1.0 + p, 1.0 + p, 1.0 - p], dtype=np.complex128) / 4.0
    )
    mat[1, 2] = -0.5 * p
    mat[2, 1] = -0.5 * p
    return qstate.validate(mat)


def make_mvb(params: MVBParams) -> DensityMatrix:
    """The maximal-violation state at beta: diagonal (0, 1/2, 1/2, 0) with
    coherence (sqrt(beta - 1)/2) e^{i theta} between |01> and |10>."""
    coh = 0.5 * np.sqrt(params.beta - 1.0) * np.exp(1j * params.theta)
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[1, 1] = 0.5
    mat[2, 2] = 0.5
    mat[1, 2] = coh
    mat[2, 1] = np.conj(coh)
    return qstate.validate(mat)


def _in_curve_domain(s):
    arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if not np.all(np.isfinite(arr)):
        raise OutOfDomain("curve argument must be finite")
    bad = (arr < -CONSTRAINT_SLACK) | (arr > CURVE_DOMAIN_MAX + CONSTRAINT_SLACK)
    if np.any(bad):
        raise OutOfDomain(
            f"s={arr[bad][0]!r} outside [0, 2/3], where the family curves live"
        )
    return np.clip(arr, 0.0, CURVE_DOMAIN_MAX)


def m_werner(s):
    """m along the Werner family: 2 - 2s."""
    vals = 2.0 - 2.0 * np.atleast_1d(np.asarray(s, dtype=np.float64))
    return vals if np.ndim(s) else float(vals[0])


def m_mems(s):
    """m along the maximally entangled mixed states: 1 - (3/4)s + sqrt(1 - (3/2)s)."""
    arr = _in_curve_domain(s)
    vals = 1.0 - 0.75 * arr + np.sqrt(np.maximum(1.0 - 1.5 * arr, 0.0))
    return vals if np.ndim(s) else float(vals[0])


def m_mvb(s):
    """The exact upper envelope of m at fixed linear entropy: 2 - (3/2)s."""
    arr = _in_curve_domain(s)
    vals = 2.0 - 1.5 * arr
    return vals if np.ndim(s) else float(vals[0])


def c_werner(s):
    """Concurrence of the Werner state with linear entropy s, clamped at 0.

    Defined for s in [0, 1] by eliminating p from s = 1 - p^2 and
    c = (3p - 1)/2.
    """
    arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if np.any(~np.isfinite(arr)) or np.any(arr < -CONSTRAINT_SLACK) or np.any(
        arr > 1.0 + CONSTRAINT_SLACK
    ):
        raise OutOfDomain("c_werner is defined for s in [0, 1]")
    vals = np.maximum(0.0, (3.0 * np.sqrt(np.maximum(1.0 - arr, 0.0)) - 1.0) / 2.0)
    return vals if np.ndim(s) else float(vals[0])


def c_mvb(s):
    """Concurrence along the maximal-violation family: sqrt(1 - (3/2)s)."""
    arr = _in_curve_domain(s)
    vals = np.sqrt(np.maximum(1.0 - 1.5 * arr, 0.0))
    return vals if np.ndim(s) else float(vals[0])


def reference_curves(s_grid) -> dict:
    """Tabulate the five reference curves over s values in [0, 2/3].

    Returns a dict of equal-length arrays keyed s, m_werner, m_mems,
    m_mvb, c_werner, c_mvb. Raises OutOfDomain if any grid value leaves
    [0, 2/3], where the MEMS radicand 1 - (3/2)s turns negative.
    """
    arr = _in_curve_domain(s_grid)
    return {
        "s": arr,
        "m_werner": m_werner(arr),
        "m_mems": m_mems(arr),
        "m_mvb": m_mvb(arr),
        "c_werner": c_werner(arr),
        "c_mvb": c_mvb(arr),
    }

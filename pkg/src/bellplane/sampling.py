"""Deterministic, seedable random density-matrix generators.

Five generators: "hs" draws from the Hilbert-Schmidt ensemble
(G G^dagger / tr for a 4x4 complex Ginibre G), "boundary" pushes an hs
draw to the edge of the state set by shrinking its smallest eigenvalue
below epsilon, and "e0" / "e1" / "werner" draw uniformly over each
family's feasible parameter set.

Reproducibility contract: sample i of a stream is a pure function of
(seed, i). Streams are built from fixed-size blocks of 8192 samples,
each block drawn from its own Philox substream keyed
(seed, block_index * 8 + generator_id) with a fixed number of variates
per sample, so output is byte-identical no matter how many threads
consume the blocks and independent of the requested count. The block
size and key layout are part of the stream definition; changing them
changes every stream.
"""

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from . import kernel, qstate
from .qstate import DensityMatrix

__all__ = [
    "GENERATORS",
    "BLOCK_SIZE",
    "SamplerConfig",
    "sample_blocks",
    "sample_states",
    "sample_hs",
    "sample_boundary",
    "sample_family",
]

GENERATORS = ("hs", "boundary", "e0", "e1", "werner")
_GEN_ID = {name: i for i, name in enumerate(GENERATORS)}
_FAMILY_GENERATORS = ("e0", "e1", "werner")

BLOCK_SIZE = 8192
EPSILON_DEFAULT = 1e-4
EPSILON_MAX = 1e-2


@dataclass(frozen=True)
class SamplerConfig:
    """Which generator to run, how many samples, and under which seed.

    epsilon is the boundary generator's distance scale (the smallest
    eigenvalue is uniform in [0, epsilon]); it must lie in (0, 1e-2].
    """

    seed: int
    generator: str
    count: int
    epsilon: float = EPSILON_DEFAULT

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        if self.generator not in GENERATORS:
            raise ValueError(
                f"unknown generator {self.generator!r}; choose from {GENERATORS}"
            )
        if not isinstance(self.count, (int, np.integer)) or isinstance(self.count, bool):
            raise ValueError(f"count must be an integer, got {self.count!r}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        eps = float(self.epsilon)
        if not np.isfinite(eps) or eps <= 0.0 or eps > EPSILON_MAX:
            raise ValueError(
                f"epsilon must lie in (0, {EPSILON_MAX:g}], got {self.epsilon!r}"
            )


def _block_rng(seed: int, block: int, gen_id: int) -> np.random.Generator:
    key = np.array([np.uint64(seed), np.uint64(block * 8 + gen_id)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _hs_matrices(rng: np.random.Generator) -> np.ndarray:
    """One block of Hilbert-Schmidt states: 32 gaussians per sample."""
    re = rng.standard_normal((BLOCK_SIZE, 4, 4))
    im = rng.standard_normal((BLOCK_SIZE, 4, 4))
    g = re + 1j * im
    rho = g @ np.conj(np.swapaxes(g, 1, 2))
    tr = np.trace(rho, axis1=1, axis2=2).real
    return rho / tr[:, None, None]


def _hs_block(seed: int, block: int, epsilon: float) -> np.ndarray:
    return _hs_matrices(_block_rng(seed, block, _GEN_ID["hs"]))


@njit(cache=True)
def _push_to_boundary(rhos, us, eps, out):
    """Set each state's smallest eigenvalue to u * eps, rescaling the rest.

    The remaining three eigenvalues are scaled to sum to 1 - u * eps, so
    the result stays unit-trace and its minimum eigenvalue never exceeds
    eps. Reassembly uses the state's own eigenbasis.
    """
    n = rhos.shape[0]
    for i in range(n):
        w, V, ok = kernel._jacobi_eigh(rhos[i])
        lam0 = us[i] * eps
        rest = w[1] + w[2] + w[3]
        scale = (1.0 - lam0) / rest
        w[0] = lam0
        w[1] *= scale
        w[2] *= scale
        w[3] *= scale
        for r in range(4):
            for c in range(4):
                acc = 0.0 + 0.0j
                for k in range(4):
                    acc += V[r, k] * w[k] * np.conj(V[c, k])
                out[i, r, c] = acc


def _boundary_block(seed: int, block: int, epsilon: float) -> np.ndarray:
    rng = _block_rng(seed, block, _GEN_ID["boundary"])
    rho = np.ascontiguousarray(_hs_matrices(rng))
    us = rng.random(BLOCK_SIZE)
    out = np.empty_like(rho)
    _push_to_boundary(rho, us, float(epsilon), out)
    return out


def _e0_block(seed: int, block: int, epsilon: float) -> np.ndarray:
    """Uniform over the E0 feasible set: (a, b) uniform on the triangle
    a + b <= 1 (by reflection), c uniform on [0, min(1, 2 sqrt(ab))],
    theta uniform on [0, 2 pi). Four variates per sample."""
    rng = _block_rng(seed, block, _GEN_ID["e0"])
    u = rng.random((BLOCK_SIZE, 4))
    a = u[:, 0]
    b = u[:, 1]
    flip = a + b > 1.0
    a = np.where(flip, 1.0 - a, a)
    b = np.where(flip, 1.0 - b, b)
    cmax = np.minimum(1.0, 2.0 * np.sqrt(a * b))
    c = u[:, 2] * cmax
    theta = 2.0 * np.pi * u[:, 3]
    coh = 0.5 * c * np.exp(1j * theta)
    rho = np.zeros((BLOCK_SIZE, 4, 4), dtype=np.complex128)
    rho[:, 0, 0] = 1.0 - a - b
    rho[:, 1, 1] = a
    rho[:, 2, 2] = b
    rho[:, 1, 2] = coh
    rho[:, 2, 1] = np.conj(coh)
    return rho


def _e1_block(seed: int, block: int, epsilon: float) -> np.ndarray:
    """Uniform over the X-state feasible set: diagonal uniform on the
    3-simplex (normalized exponentials), coherence moduli uniform on
    their positivity intervals, phases uniform. Eight variates per sample."""
    rng = _block_rng(seed, block, _GEN_ID["e1"])
    u = rng.random((BLOCK_SIZE, 8))
    e = -np.log1p(-u[:, :4])
    d = e / e.sum(axis=1, keepdims=True)
    x = u[:, 4] * np.sqrt(d[:, 0] * d[:, 3])
    y = u[:, 5] * np.sqrt(d[:, 1] * d[:, 2])
    r14 = x * np.exp(2j * np.pi * u[:, 6])
    r23 = y * np.exp(2j * np.pi * u[:, 7])
    rho = np.zeros((BLOCK_SIZE, 4, 4), dtype=np.complex128)
    for i in range(4):
        rho[:, i, i] = d[:, i]
    rho[:, 0, 3] = r14
    rho[:, 3, 0] = np.conj(r14)
    rho[:, 1, 2] = r23
    rho[:, 2, 1] = np.conj(r23)
    return rho


def _werner_block(seed: int, block: int, epsilon: float) -> np.ndarray:
    """Werner states with p uniform on [0, 1]; one variate per sample."""
    rng = _block_rng(seed, block, _GEN_ID["werner"])
    p = rng.random(BLOCK_SIZE)
    rho = np.zeros((BLOCK_SIZE, 4, 4), dtype=np.complex128)
    rho[:, 0, 0] = (1.0 - p) / 4.0
    rho[:, 1, 1] = (1.0 + p) / 4.0
    rho[:, 2, 2] = (1.0 + p) / 4.0
    rho[:, 3, 3] = (1.0 - p) / 4.0
    rho[:, 1, 2] = -0.5 * p
    rho[:, 2, 1] = -0.5 * p
    return rho


_BLOCK_FN = {
    "hs": _hs_block,
    "boundary": _boundary_block,
    "e0": _e0_block,
    "e1": _e1_block,
    "werner": _werner_block,
}


def sample_blocks(config: SamplerConfig) -> Iterator[np.ndarray]:
    """Yield the stream as (k, 4, 4) complex arrays, k <= BLOCK_SIZE.

    Every block's variates are drawn in full before slicing, so the i-th
    state of a stream does not depend on the requested count.
    """
    fn = _BLOCK_FN[config.generator]
    nblocks = math.ceil(config.count / BLOCK_SIZE)
    for block in range(nblocks):
        take = min(BLOCK_SIZE, config.count - block * BLOCK_SIZE)
        yield np.ascontiguousarray(fn(config.seed, block, config.epsilon)[:take])


def sample_states(config: SamplerConfig) -> Iterator[DensityMatrix]:
    """Yield validated DensityMatrix objects, one per sample."""
    for block in sample_blocks(config):
        for mat in block:
            yield qstate.validate(mat)


def _require_generator(config: SamplerConfig, allowed) -> None:
    if config.generator not in allowed:
        raise ValueError(
            f"config.generator is {config.generator!r}; this sampler serves {allowed}"
        )


def sample_hs(config: SamplerConfig) -> Iterator[DensityMatrix]:
    """Hilbert-Schmidt ensemble stream (generator must be "hs")."""
    _require_generator(config, ("hs",))
    return sample_states(config)


def sample_boundary(config: SamplerConfig) -> Iterator[DensityMatrix]:
    """Near-boundary stream: min eigenvalue <= epsilon on every sample."""
    _require_generator(config, ("boundary",))
    return sample_states(config)


def sample_family(config: SamplerConfig) -> Iterator[DensityMatrix]:
    """Family parameter stream for the e0, e1, or werner generator."""
    _require_generator(config, _FAMILY_GENERATORS)
    return sample_states(config)

"""Binning of (S_L, C, m) triples over the entropy-concurrence plane.

Each grid cell counts how many sampled states landed in it and how many
of those violate CHSH (m > 1, strict). A cell is then classified V (all
violate), NV (none do), MIXED (some do), or EMPTY. min_m and max_m per
cell are kept so near-threshold cells can be audited instead of silently
smoothed.
"""

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numba
import numpy as np

from . import measures, sampling
from .qstate import QuantityTriple
from .sampling import SamplerConfig

__all__ = [
    "CellClass",
    "GridSpec",
    "CellRecord",
    "AtlasGrid",
    "export_grid",
    "scan",
]

CLAMP_SLACK = 1e-9


class CellClass(enum.Enum):
    V = "V"
    NV = "NV"
    MIXED = "MIXED"
    EMPTY = "EMPTY"


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry: bins over s in [0, 1] and c in (0, 1].

    Bins are half-open [lo, hi) with the last bin closed; triples with
    c <= 0 are not part of the plane and are discarded before binning.
    """

    s_bins: int = 100
    c_bins: int = 100
    s_range: tuple = (0.0, 1.0)
    c_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        for name, bins in (("s_bins", self.s_bins), ("c_bins", self.c_bins)):
            if not isinstance(bins, (int, np.integer)) or bins < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {bins!r}")
        for name, rng in (("s_range", self.s_range), ("c_range", self.c_range)):
            lo, hi = float(rng[0]), float(rng[1])
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be an ordered finite pair, got {rng!r}")

    def s_centers(self) -> np.ndarray:
        lo, hi = self.s_range
        w = (hi - lo) / self.s_bins
        return lo + w * (np.arange(self.s_bins) + 0.5)

    def c_centers(self) -> np.ndarray:
        lo, hi = self.c_range
        w = (hi - lo) / self.c_bins
        return lo + w * (np.arange(self.c_bins) + 0.5)


@dataclass(frozen=True)
class CellRecord:
    """One cell's accumulated statistics and classification."""

    s_center: float
    c_center: float
    cell_class: CellClass
    n: int
    n_violating: int
    min_m: Optional[float]
    max_m: Optional[float]


class AtlasGrid:
    """Mutable accumulator of triples over a GridSpec.

    Cell (i, j) covers the i-th s bin and j-th c bin. Merging two grids
    built over disjoint parts of a stream gives the same result as one
    grid over the whole stream, which is what makes the scan parallel.
    """

    def __init__(self, spec: GridSpec):
        self.spec = spec
        shape = (spec.s_bins, spec.c_bins)
        self.n = np.zeros(shape, dtype=np.int64)
        self.n_violating = np.zeros(shape, dtype=np.int64)
        self.min_m = np.full(shape, np.inf)
        self.max_m = np.full(shape, -np.inf)

    def _indices(self, s, c):
        s_lo, s_hi = self.spec.s_range
        c_lo, c_hi = self.spec.c_range
        s = np.clip(s, s_lo, s_hi)
        c = np.clip(c, c_lo, c_hi)
        i = np.minimum((s - s_lo) / (s_hi - s_lo) * self.spec.s_bins, self.spec.s_bins - 1)
        j = np.minimum((c - c_lo) / (c_hi - c_lo) * self.spec.c_bins, self.spec.c_bins - 1)
        return i.astype(np.int64), j.astype(np.int64)

    def accumulate(self, triple: QuantityTriple) -> None:
        """Add one triple; triples with c <= 0 lie outside the plane."""
        self.accumulate_batch(
            np.array([triple.s]), np.array([triple.c]), np.array([triple.m])
        )

    def accumulate_batch(self, s, c, m) -> None:
        """Vectorized accumulate over equal-length coordinate arrays."""
        s = np.asarray(s, dtype=np.float64)
        c = np.asarray(c, dtype=np.float64)
        m = np.asarray(m, dtype=np.float64)
        keep = c > 0.0
        if not np.any(keep):
            return
        s, c, m = s[keep], c[keep], m[keep]
        i, j = self._indices(s, c)
        np.add.at(self.n, (i, j), 1)
        np.add.at(self.n_violating, (i, j), (m > 1.0).astype(np.int64))
        np.minimum.at(self.min_m, (i, j), m)
        np.maximum.at(self.max_m, (i, j), m)

    def merge(self, other: "AtlasGrid") -> None:
        """Fold another grid over the same spec into this one, cell-wise."""
        if other.spec != self.spec:
            raise ValueError("grids must share the same GridSpec to merge")
        self.n += other.n
        self.n_violating += other.n_violating
        np.minimum(self.min_m, other.min_m, out=self.min_m)
        np.maximum(self.max_m, other.max_m, out=self.max_m)

    def class_codes(self) -> np.ndarray:
        """(s_bins, c_bins) array of CellClass values."""
        out = np.full(self.n.shape, CellClass.EMPTY, dtype=object)
        occupied = self.n > 0
        all_v = occupied & (self.n_violating == self.n)
        none_v = occupied & (self.n_violating == 0)
        out[occupied] = CellClass.MIXED
        out[all_v] = CellClass.V
        out[none_v] = CellClass.NV
        return out

    def summary(self) -> dict:
        """Cell counts per class, keyed by CellClass."""
        codes = self.class_codes()
        return {cls: int(np.sum(codes == cls)) for cls in CellClass}

    def cell(self, i: int, j: int) -> CellRecord:
        n = int(self.n[i, j])
        nv = int(self.n_violating[i, j])
        if n == 0:
            cls, mn, mx = CellClass.EMPTY, None, None
        else:
            cls = (
                CellClass.V
                if nv == n
                else CellClass.NV
                if nv == 0
                else CellClass.MIXED
            )
            mn, mx = float(self.min_m[i, j]), float(self.max_m[i, j])
        return CellRecord(
            s_center=float(self.spec.s_centers()[i]),
            c_center=float(self.spec.c_centers()[j]),
            cell_class=cls,
            n=n,
            n_violating=nv,
            min_m=mn,
            max_m=mx,
        )


def export_grid(grid: AtlasGrid) -> Iterator[CellRecord]:
    """All cells in row-major (s outer, c inner) order."""
    for i in range(grid.spec.s_bins):
        for j in range(grid.spec.c_bins):
            yield grid.cell(i, j)


def _clamp_threads(threads: Optional[int]) -> int:
    limit = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        return numba.get_num_threads()
    if not isinstance(threads, (int, np.integer)) or threads < 1:
        raise ValueError(f"threads must be a positive integer, got {threads!r}")
    return min(int(threads), limit)


def scan(
    config: SamplerConfig,
    spec: Optional[GridSpec] = None,
    threads: Optional[int] = None,
) -> AtlasGrid:
    """Sample per config, evaluate (S_L, C, m), and bin into a fresh grid.

    threads caps the compiled batch evaluator's parallelism (clamped to
    the runtime's available threads); the output is identical for every
    value because sampling and accumulation stay sequential and the
    batch rows are independent.
    """
    spec = spec or GridSpec()
    numba.set_num_threads(_clamp_threads(threads))
    grid = AtlasGrid(spec)
    for block in sampling.sample_blocks(config):
        trip = measures.batch_triples(block)
        grid.accumulate_batch(trip[:, 0], trip[:, 1], trip[:, 2])
    return grid

"""Two-qubit entanglement vs CHSH-violation numerics.

Compute concurrence, linear entropy, the Horodecki CHSH criterion m, and
the fully entangled fraction for 4x4 density matrices; construct the
extremal state families that bound the entropy-concurrence plane; sample
random ensembles reproducibly; and map which regions of the plane
violate the CHSH inequality.
"""

from .atlas import AtlasGrid, CellClass, CellRecord, GridSpec, export_grid, scan
from .families import (
    ConstraintViolation,
    E0Params,
    E1Params,
    MVBParams,
    OutOfDomain,
    OutOfRange,
    c_mvb,
    c_werner,
    closed_form_e0,
    closed_form_e1,
    m_mems,
    m_mvb,
    m_werner,
    make_e0,
    make_e1,
    make_mvb,
    make_werner,
    reference_curves,
)
from .kernel import (
    EigenSystem,
    NoConvergence,
    NotHermitian,
    NotPSD,
    hermitian_eigensystem,
    psd_sqrt,
)
from .measures import (
    BellSettings,
    ConcurrenceDecomposition,
    CorrelationData,
    NonUnitVector,
    batch_fidelity,
    batch_triples,
    bell_value,
    chsh_m,
    concurrence,
    correlation_matrix,
    fidelity,
    optimal_settings,
    state_triple,
)
from .qstate import (
    MAGIC_BASIS,
    DensityMatrix,
    QuantityTriple,
    TraceNotOne,
    linear_entropy,
    purity,
    spin_flip,
    to_magic_basis,
    validate,
)
from .sampling import (
    BLOCK_SIZE,
    GENERATORS,
    SamplerConfig,
    sample_blocks,
    sample_boundary,
    sample_family,
    sample_hs,
    sample_states,
)

__version__ = "0.1.0"

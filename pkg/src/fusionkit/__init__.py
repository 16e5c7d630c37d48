"""fusionkit: positivity obstructions for fusion rings, Perron-Frobenius
theory for nonnegative matrices and quantum channels, and Fourier-analytic
inequality checks on finite cyclic groups."""

from __future__ import annotations

__version__ = "0.1.0"

from .linalg import (  # noqa: F401
    FAILS,
    INCONCLUSIVE,
    PASSES,
    CapacityError,
    CriterionVerdict,
    PfResult,
    PsdPolicy,
    hadamard_power,
    is_irreducible,
    kron_power,
    pf_eigen,
    psd_verdict,
    sym_eig,
)
from .rings import (  # noqa: F401
    FusionRing,
    RingProfile,
    Violation,
    character_table,
    cyclic_ring,
    fibonacci_ring,
    fusion_matrix,
    is_valid,
    product_ring,
    profile,
    validate,
)
from .criteria import (  # noqa: F401
    PartialData,
    default_unitaries,
    localized_criterion,
    localized_matrix,
    partial_data_criterion,
    primary_criterion,
    primary_matrix,
    r4k_family,
    reduced_twisted_criterion,
    schur_criterion,
    testing_function_check,
)
from .graphs import (  # noqa: F401
    BipartiteGraph,
    ExclusionResult,
    GraphPf,
    LocalFusionData,
    dimension_bound_exclusion,
    graph_pf_dims,
    local_matrix,
    local_matrix_check,
)
from .channels import (  # noqa: F401
    QuantumChannel,
    channel_irreducible,
    channel_pf,
    choi_matrix,
    commutant_basis,
    cp_check,
    fixed_space_basis,
    pf_space_structure_check,
    transfer_matrix,
)
from .groupmodel import (  # noqa: F401
    SuiteConfig,
    SuiteResult,
    convolve,
    delta,
    entropy,
    inequality_suite,
    inverse_qft,
    lp_norm,
    qft,
    smooth_entropy,
    smooth_support,
    support_size,
)
from .io import (  # noqa: F401
    FormatError,
    RingFile,
    canonical_json,
    load_channel,
    load_graph,
    load_local,
    load_ring,
    save_channel,
    save_graph,
    save_local,
    save_ring,
)
from .pipeline import (  # noqa: F401
    PipelineConfig,
    RingReport,
    derive_seed,
    run_batch,
    run_channel_checks,
    run_graph_checks,
    run_ring_checks,
)

"""Rainbow spanning trees in randomly coloured k-out multigraphs: samplers,
matroid-intersection solver with failure certificates, auxiliary-fact
estimators, and threshold experiments."""

from .model import (
    Seed,
    MultiGraph,
    Colouring,
    BipartiteColourGraph,
    balanced_profile,
    generate_kout,
    assign_balanced_colouring,
    couple_add_colour,
    generate_gamma,
    gamma_to_coloured_kout,
)
from .matroid import DisjointSetForest, kappa, graphic_rank, graphic_independent, partition_rank
from .intersect import (
    CommonIndependentSet,
    Certificate,
    RainbowResult,
    InternalInconsistencyError,
    max_rainbow_forest,
    find_rst,
    extract_certificate,
    check_condition,
    brute_force_max_rainbow_forest,
)
from .lemma_lab import (
    CycleStats,
    LemmaReport,
    count_cycles_2regular_bipartite,
    expected_cycles_exact,
    count_monochromatic_parallel_pairs,
    expected_monochromatic_parallel_pairs,
    estimate_connectivity,
)
from .experiments import TrialTable, TrialRow, ProbeResult, sweep_rst, rpm_exact, rhc_exact

__version__ = "0.1.0"

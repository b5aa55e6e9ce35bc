"""Sublinear-time maximum matching size estimation under query oracles.

Estimators (`estimate_bipartite`, `estimate_general`,
`estimate_multiplicative`, `estimate_matrix`) read the input graph only
through adjacency-list or adjacency-matrix probes, with every probe
counted; exact reference algorithms (`exact_max_matching`, `gmm`,
`maximal_bmatching`, `two_pass_streaming`) provide the ground truth the
test suite checks them against.  The hot kernels run as a compiled
extension when built, with a pure-Python twin selected automatically at
import (`KERNEL_IMPL` says which one is active).
"""

from ._kernel import KERNEL_IMPL, compiled_available
from .estimator import (
    MODE_BIPARTITE,
    MODE_GENERAL,
    MODE_MATRIX,
    MODE_MULTIPLICATIVE,
    EstimateReport,
    EstimateSample,
    EstimatorConfig,
    case1_sample,
    case2_sample,
    estimate,
    estimate_bipartite,
    estimate_general,
    estimate_matrix,
    estimate_multiplicative,
    run_parallel_instances,
)
from .exact import (
    ApproxConstants,
    BMatching,
    Matching,
    NonBipartiteError,
    bipartition,
    brute_force_max_matching,
    check_fractional_bound,
    exact_max_matching,
    gmm,
    k_from_eps,
    kb_ceil,
    maximal_bmatching,
    two_pass_streaming,
)
from .generators import FAMILIES, GeneratorSpec, InfeasibleSpecError, generate
from .graph import (
    Graph,
    GraphParseError,
    GraphValidationError,
    OracleStats,
    ProbeBudgetExceeded,
    degree_via_binary_search,
    dump_graph,
    list_probe,
    load_graph,
    matrix_probe,
)
from .lca import LcaConfig, LcaScope, UnionSubgraphOracle, estimate_mu_union, lca_vertex_matched
from .oracle import OracleAnswer, RgmmScope, matched_edge, vertex_matched, visit_profile
from .rng import RankCollisionError, RankFunction, Stream, derive_seed, mix64
from .sparsify import SparsifierConfig, residual_degree_check, sparsify
from .views import (
    DuplicatedBipartiteView,
    InducedSubgraphView,
    ListOracleView,
    MatrixToListView,
    random_neighbor,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_IMPL", "compiled_available", "__version__",
    # graph core
    "Graph", "OracleStats", "load_graph", "dump_graph", "list_probe",
    "matrix_probe", "degree_via_binary_search", "GraphParseError",
    "GraphValidationError", "ProbeBudgetExceeded",
    "ListOracleView", "InducedSubgraphView", "DuplicatedBipartiteView",
    "MatrixToListView", "random_neighbor",
    # randomness
    "RankFunction", "RankCollisionError", "Stream", "derive_seed", "mix64",
    # exact reference
    "Matching", "BMatching", "ApproxConstants", "NonBipartiteError",
    "exact_max_matching", "brute_force_max_matching", "bipartition", "gmm",
    "maximal_bmatching", "two_pass_streaming", "check_fractional_bound",
    "k_from_eps", "kb_ceil",
    # local oracles
    "OracleAnswer", "RgmmScope", "vertex_matched", "matched_edge",
    "visit_profile",
    # sparsifier
    "SparsifierConfig", "sparsify", "residual_degree_check",
    # estimators
    "EstimatorConfig", "EstimateSample", "EstimateReport", "estimate",
    "estimate_bipartite", "estimate_general", "estimate_multiplicative",
    "estimate_matrix", "case1_sample", "case2_sample",
    "run_parallel_instances", "MODE_BIPARTITE", "MODE_GENERAL",
    "MODE_MULTIPLICATIVE", "MODE_MATRIX",
    # local matching oracle over unions
    "LcaConfig", "LcaScope", "UnionSubgraphOracle", "lca_vertex_matched",
    "estimate_mu_union",
    # generators
    "GeneratorSpec", "generate", "FAMILIES", "InfeasibleSpecError",
]

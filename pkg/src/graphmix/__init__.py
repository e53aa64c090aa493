"""graphmix: degree- and joint-degree-preserving graph ensembles.

Edge-swap Markov chains with an analytic step budget, per-pair
independence diagnostics, multi-chain convergence checks, and the
observables used to compare ensembles.
"""

from ._version import __version__
from .diagnostics import (
    ContingencyTable2,
    ContingencyTable3,
    EdgeSeries,
    PairReport,
    SweepResult,
    TestReport,
    delta_bic,
    g2_and_bic,
    gelman_rubin,
    independence_sweep,
    independence_test,
    load_series,
    markov_order_test,
    mcest,
    normal_quantile,
    record_series,
    required_length,
    save_series,
    thin,
)
from .edge_model import (
    EdgeChainModel,
    dd_alpha_beta,
    dd_model,
    decay_error,
    jdd_alpha_beta,
    jdd_model,
    stationary,
    stopping_steps,
    transition_matrix,
)
from .ensemble import (
    GrResult,
    choose_tracked_pairs,
    generate_ensemble,
    resolve_threads,
    run_gr,
)
from .errors import (
    ConvergenceError,
    DegenerateChainError,
    DegenerateSeriesError,
    GraphmixError,
    InsufficientDataError,
    InvalidInputError,
    InvalidStateError,
    ParseError,
    SamplingExhaustedError,
    UndefinedMetricError,
)
from .graph import (
    DegreeProfile,
    Graph,
    degree_profile,
    load_graph,
    sample_edge_at_degree,
    sample_uniform_edge_endpoint,
    save_graph,
)
from .metrics import DiameterResult, diameter, global_clustering, max_laplacian_eigenvalue
from .rewire import ChainStats, dd_swap_step, jdd_swap_step, run_chain
from .rng import Rng, split_seed

__all__ = [
    "__version__",
    "ChainStats",
    "ContingencyTable2",
    "ContingencyTable3",
    "ConvergenceError",
    "DegenerateChainError",
    "DegenerateSeriesError",
    "DegreeProfile",
    "DiameterResult",
    "EdgeChainModel",
    "EdgeSeries",
    "Graph",
    "GraphmixError",
    "GrResult",
    "InsufficientDataError",
    "InvalidInputError",
    "InvalidStateError",
    "PairReport",
    "ParseError",
    "Rng",
    "SamplingExhaustedError",
    "SweepResult",
    "TestReport",
    "UndefinedMetricError",
    "choose_tracked_pairs",
    "dd_alpha_beta",
    "dd_model",
    "dd_swap_step",
    "decay_error",
    "degree_profile",
    "delta_bic",
    "diameter",
    "g2_and_bic",
    "gelman_rubin",
    "generate_ensemble",
    "global_clustering",
    "independence_sweep",
    "independence_test",
    "jdd_alpha_beta",
    "jdd_model",
    "jdd_swap_step",
    "load_graph",
    "load_series",
    "markov_order_test",
    "max_laplacian_eigenvalue",
    "mcest",
    "normal_quantile",
    "record_series",
    "required_length",
    "resolve_threads",
    "run_chain",
    "run_gr",
    "sample_edge_at_degree",
    "sample_uniform_edge_endpoint",
    "save_graph",
    "save_series",
    "split_seed",
    "stationary",
    "stopping_steps",
    "thin",
    "transition_matrix",
]

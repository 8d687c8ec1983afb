"""Colouring locally sparse graphs with random-priority independent sets."""
from __future__ import annotations

from ._accel import HAS_NUMBA
from .analysis import (
    CodegreeReport,
    NeighbourhoodIndependence,
    QuasirandomReport,
    QuasirandomSlack,
    SparsityReport,
    independent_pairs_and_triples,
    local_sigma,
    max_codegree,
    min_degree_core,
    quasirandom_check,
    sigma_sparsity,
    smallest_last_order,
)
from .constructions import (
    ListAssignment,
    blow_up,
    chvatal_graph,
    colourwise_regularize,
    complete_graph,
    connected_graphs,
    cycle_graph,
    gnp_graph,
    path_graph,
    petersen_graph,
    projective_plane_incidence,
    random_regular_graph,
    regularize,
    sharpness_clique_size,
    sharpness_construction,
    square_line_graph,
    star_graph,
)
from .graph import (
    Graph,
    GraphFormatError,
    VertexRangeError,
    parse_graph,
    read_graph,
    serialize_graph,
    write_graph,
)
from .nibble import (
    ColouringResult,
    NibbleConfig,
    NibbleReport,
    greedy_complete,
    iterative_colour,
    iterative_colour_codegree,
    mu_of,
    one_nibble,
    validate_colouring,
)
from .oracle import (
    ExactSamplerStats,
    OracleSizeError,
    brute_chromatic,
    brute_strong_index,
    exact_sampler_stats,
)
from .sampler import (
    ConfigError,
    SampleOutcome,
    SampleStats,
    SamplerConfig,
    bound_calculator,
    epsilon_col,
    epsilon_vu,
    epsilon_vu_crossover,
    expected_pairs_formula,
    membership_probability_exact,
    membership_probability_regular,
    monte_carlo_stats,
    sample_independent_set,
)
from .strong import (
    StrongColouring,
    strong_edge_colour,
    theorem8_sparsity_constant,
    validate_strong,
)

__version__ = "0.1.0"

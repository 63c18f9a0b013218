"""Stochastic Kronecker graph toolkit.

Exact samplers for the 2x2 product model, graph analytics (BFS, components,
certified exact diameter), the middle-layer constructions, every derived
threshold constant, and seeded Monte Carlo experiments that confront the
connectivity and bounded-diameter claims at desk scale.
"""

from .errors import (DimensionMismatchError, InternalConsistencyError,
                     KronkitError, ParameterError, ResourceLimitError)
from .graphkit import (UNREACHABLE, BfsResult, ComponentLabels, DiameterResult,
                       GraphStore, bfs, connected_components, diameter_exact,
                       edge_disjoint_short_paths, induced_subgraph)
from .harness import ExperimentConfig, ExperimentResult, ResultRecord, run_experiment
from .layers import (GrowthProfile, LayerSubgraph, balanced_edge_filter,
                     edge_split, fact1_binomial_law, filter_balanced_edges,
                     growth_profile, layer_edge_rho, middle_layer,
                     middle_layer_labels, u_i_subset, uniform_thin)
from .model import (MAX_DIMENSION, KroneckerParams, PairOverlap, VertexLabel,
                    complement, edge_probability, hamming, weight)
from .sampler import (LazyNeighborhoods, SampleSeed, SignatureClass,
                      lazy_neighborhood, materialize_lazy, sample_graph,
                      sample_graph_naive, sample_neighbors, signature_classes)
from .theory import (Beta1Bound, ConnectivityVerdict, DriftTarget,
                     TheoryConstants, Verdict, beta1_no_common_neighbor,
                     beta1_path_bound, classify_connectivity, constants_pipeline,
                     constants_report, diameter_upper_bound, drift_step_bound,
                     drift_trajectory, epsilon_star, expected_degree,
                     max_term_bound, solve_eta, weight_drift_target)

__version__ = "0.1.0"

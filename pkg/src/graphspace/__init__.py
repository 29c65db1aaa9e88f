"""graphspace: properties, generators and experiments over the space of
labeled graphs."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DisconnectedGraphError, SamplingError,
                     SizeLimitError)
from .graphs import (Graph, UNREACHABLE, all_pairs_distances, are_isomorphic,
                     build_graph, is_connected, read_edge_list,
                     write_edge_list)
from .numerics import (RegressionFit, dominant_eigenpair, least_squares_fit,
                       pearson, symmetric_eigen)
from .generators import (GeneratorSpec, equal_blocks, gen_ba, gen_er,
                         gen_geometric, gen_nws, gen_sbm, generate,
                         sample_in_density_band, tune_to_density,
                         vertex_pairs)
from .properties import (PROPERTY_NAMES, NormalizationContext, PropertyVector,
                         apl_norm, ascc, assortativity, centralization,
                         compute_property_vector, density, diameter_norm,
                         edge_connectivity_norm, effective_resistance_norm,
                         gcc, normalization_context, spectral_radius_norm)
from .enumeration import (GraphCode, connected_count, connected_probability,
                          enumerate_labeled, exact_correlation_matrix,
                          exact_property_stats, scan_labeled_space)
from .dataset import Dataset, dataset_from_vectors, read_dataset_csv, \
    write_dataset_csv
from .analytics import (CollisionReport, ImportanceMatrix, StabilityResult,
                        classical_mds, collision_search_until_pair,
                        correlation_matrix, expand_nonlinear_features,
                        find_collisions, importance_matrix, stability_test,
                        train_predictors)
from .classifiers import (HoldoutResult, LogisticModel, RandomForestModel,
                          fit_logistic, fit_random_forest,
                          repeated_holdout_accuracy, subset_sweep)
from .rng import derived_stream, graph_rng

"""Structure learning for ordered-block-model Bayesian networks."""

from .dag import (
    Dag,
    Layering,
    IncompatiblePartitionError,
    NotADagError,
    count_compatible_orderings,
    is_acyclic,
    minimal_layering,
    read_adjacency,
    relayer_after_removal,
    write_adjacency,
)
from .likelihood import (
    DataMatrix,
    FamilyCache,
    IllegalEdgeError,
    ch_log_likelihood,
    ch_log_ratio_toggle,
)
from .partition import (
    InfeasiblePartitionError,
    expected_num_cells,
    log_partition_prob,
    sample_partition,
)
from .priors import (
    BetaPolicy,
    PriorParams,
    log_hoppe_beta_conditional,
    log_hoppe_beta_joint,
    log_minimal_hoppe_beta,
    log_uniform_prior,
    sample_hoppe_beta,
    sample_minimal_hoppe_beta,
    sparsity_index,
)
from .inference import ScoreFn, SearchParams, Trajectory, gibbs_run, propose, stochastic_search
from .datagen import CptNetwork, forward_sample, hepar2_structure, random_cpts
from .metrics import aggregate_heatmaps, spc, tpr

__all__ = [
    "Dag", "Layering", "IncompatiblePartitionError", "NotADagError",
    "count_compatible_orderings", "is_acyclic", "minimal_layering",
    "read_adjacency", "relayer_after_removal", "write_adjacency",
    "DataMatrix", "FamilyCache", "IllegalEdgeError",
    "ch_log_likelihood", "ch_log_ratio_toggle",
    "InfeasiblePartitionError", "expected_num_cells",
    "log_partition_prob", "sample_partition",
    "BetaPolicy", "PriorParams", "log_hoppe_beta_conditional",
    "log_hoppe_beta_joint", "log_minimal_hoppe_beta", "log_uniform_prior",
    "sample_hoppe_beta", "sample_minimal_hoppe_beta", "sparsity_index",
    "ScoreFn", "SearchParams", "Trajectory", "gibbs_run", "propose",
    "stochastic_search",
    "CptNetwork", "forward_sample", "hepar2_structure", "random_cpts",
    "aggregate_heatmaps", "spc", "tpr",
]

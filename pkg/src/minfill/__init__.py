"""Exact topology probabilities for minimal fillings of random additive spaces."""
from .determinant import (
    VolumeValue,
    det_closed_form,
    det_closed_form_any_center,
    det_exact,
    simplex_volume,
)
from .embedding import (
    DistanceMatrix,
    WeightDistribution,
    apply_T,
    build_W,
    gram_matrix,
    pair_order,
    path_counts,
)
from .errors import (
    DomainError,
    MinfillError,
    NewickParseError,
    NotAdditiveError,
    NotRealizedError,
)
from .probability import (
    Convention,
    SqrtRational,
    TopologyReport,
    probability_ratio,
    three_mustache_tree,
    topology_probabilities,
)
from .recovery import is_additive, reconstruct_topology, recover_weights
from .topology import (
    Topology,
    TopologyClass,
    automorphism_order,
    emit_newick,
    enumerate_labeled_topologies,
    enumerate_topology_classes,
    is_isomorphic,
    labeled_topology_count,
    parse_newick,
)

__version__ = "0.1.0"

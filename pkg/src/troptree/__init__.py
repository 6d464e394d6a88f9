"""Ultrametric trees as points of the tropical projective torus."""

__version__ = "0.1.0"

from .compat import CompatReport, compatibility_set, decide_membership, necessary_condition
from .newick import NewickError, parse_newick, write_newick
from .segment import (
    TropicalSegment,
    check_equivariance,
    contains_origin,
    point_at,
    rescale_to_height,
    segment_topologies,
    tropical_segment,
)
from .topology import (
    Relation,
    Topology,
    closure,
    compare,
    enumerate_topologies,
    is_bifurcated,
    is_binary,
    is_full_dimensional,
    topology_of,
    ut_membership,
)
from .torus import (
    LeafPermutation,
    PairVector,
    apply_permutation,
    canonical_rep,
    torus_eq,
    trop_distance,
    trop_scalar,
    trop_sum,
)
from .treemetrics import (
    EquidistantTree,
    Kind,
    ValidationReport,
    is_tree_metric,
    is_ultrametric,
    random_coalescent_tree,
    tree_to_vector,
    vector_to_tree,
)

"""Structural tools for loop-free multigraphs: immersions, spiders, tangles,
tree-cut decompositions and hop-width structure certificates."""

from .errors import (
    BUDGET_EXCEEDED,
    BoundViolationError,
    CapExceededError,
    GraphError,
    ImmersionKitError,
    InvalidCertificateError,
    InvalidDecompositionError,
    PreconditionError,
)
from .flows import edge_connectivity, max_edge_disjoint_paths, min_cut_side
from .immersion import ImmersionCertificate, check_immersion, find_immersion
from .multigraph import (
    Multigraph,
    complete_graph,
    consolidate,
    contract,
    delta,
    gen_P,
    gen_random,
    gen_S,
    line_graph,
    neighborhood,
)
from .spiders import find_spider, pack_spiders, spider_obstruction
from .structure import min_hop_width, search_structure_certificate, verify_structure_certificate
from .tangles import induced_tangle, is_free, is_tangle, tangle_minus
from .treecut import TreeCutDecomposition, adhesion, tcw_bounds, torso, width

__version__ = "0.1.0"

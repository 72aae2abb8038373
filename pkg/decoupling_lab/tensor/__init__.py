from .metrics import (
    entropy_of_spectrum,
    fidelity,
    fidelity_pure,
    hs_norm_sq,
    purity,
    swap_operator,
    swap_trick_purity,
    trace_distance,
    trace_norm,
    von_neumann_entropy,
)
from .operations import (
    apply_local,
    fuse,
    marginal,
    partial_trace,
    relabel,
    reorder,
    reorder_op,
    tensor,
    tensor_all,
)
from .spaces import TensorSpace, space
from .states import (
    DensityOperator,
    LinearOp,
    SchmidtDecomposition,
    StateVector,
    maximally_entangled,
    purify,
    schmidt,
)

from .decoupling import (
    DecouplingChain,
    HaarAverage,
    Metric,
    MonteCarloEstimate,
    decoupled_target,
    decoupling_chain,
    decoupling_distance,
    exact_haar_average_hs,
    hs_distance_sq,
    mc_average,
    oneshot_bound,
    psi_u,
    sample_distances,
    twirl_exact_average_hs,
    weyl_average_hs,
)
from .instance import (
    DecouplingInstance,
    coordinate_projector,
    from_channel,
    random_instance,
    random_projector,
    trivial_instance,
)

"""Optimal affine load sharing in stochastic lossy transport networks."""
from ._accel import backend
from .control import (
    ControllableSet,
    OptimalControl,
    PenaltyModel,
    interpretation_weights,
    kkt_oracle,
    optimize,
    optimize_full,
    optimize_penalized,
    optimize_subset,
    projected_gradient_oracle,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    EdgePerturbation,
    LaplacianPair,
    WeightedGraph,
    build_laplacian,
    cycle_graph,
    effective_resistance,
    path_graph,
    perturb_edge,
    random_connected_graph,
    total_effective_resistance,
)
from .loss import (
    ControlVector,
    LossCoefficients,
    LossReport,
    expected_loss,
    loss_coefficients,
    realized_loss,
    realized_losses,
)
from .montecarlo import MCEstimate, compare_controls, estimate_expected_loss
from .placement import (
    PlacementAverage,
    ScalingCurve,
    average_loss_k,
    empirical_random_placement_trace,
    scaling_curve,
)
from .stochastic import (
    CovarianceModel,
    LoadProfile,
    iid_covariance,
    sample_fluctuations,
    validate_covariance,
)

__version__ = "0.1.0"

"""Delivery-time bounds and precoding schemes for transceiver cache-aided
networks: exact rational NDT lower bounds and tradeoff curves, executable
corner schemes (unicast, MISO zero-forcing), the combined zero-forcing /
subspace-alignment scheme for one relay and three users, and a seeded
numerical verification harness.
"""

__version__ = "0.1.0"

from .bounds import (
    CHARACTERIZED,
    AchievablePoint,
    BoundComponentIndex,
    NdtCurve,
    UncharacterizedConfigError,
    achievable_catalog,
    bound_component_indices,
    delta_lb_component,
    lower_bound,
    lower_bound_curve,
    memory_sharing_envelope,
    optimal_ndt,
    optimal_ndt_curve,
)
from .corner import MisoZfPlan, TdmaSchedule, miso_zf_plan, unicast_schedule
from .model import (
    ChannelSet,
    DegenerateChannel,
    DemandVector,
    NetworkConfig,
    Rational,
    as_rational,
    mod_bar,
    worst_case_demand,
)
from .scheme_m1k3 import (
    AlignmentGraph,
    PrecoderPlan,
    SymbolId,
    SymbolLayout,
    ZfMap,
    alignment_graph,
    effective_channel_matrix,
    rn_cache_cancel,
    solve_precoders,
    symbol_layout,
    zf_assignment,
)
from .verify import (
    RateEstimate,
    SubspaceReport,
    VerificationFailure,
    VerificationReport,
    draw_channels,
    finite_snr_rates,
    rank_with_gap,
    verify_corner,
    verify_m1k3,
)

__all__ = [
    "__version__",
    "AchievablePoint",
    "AlignmentGraph",
    "BoundComponentIndex",
    "CHARACTERIZED",
    "ChannelSet",
    "DegenerateChannel",
    "DemandVector",
    "MisoZfPlan",
    "NdtCurve",
    "NetworkConfig",
    "PrecoderPlan",
    "RateEstimate",
    "Rational",
    "SubspaceReport",
    "SymbolId",
    "SymbolLayout",
    "TdmaSchedule",
    "UncharacterizedConfigError",
    "VerificationFailure",
    "VerificationReport",
    "ZfMap",
    "achievable_catalog",
    "alignment_graph",
    "as_rational",
    "bound_component_indices",
    "delta_lb_component",
    "draw_channels",
    "effective_channel_matrix",
    "finite_snr_rates",
    "lower_bound",
    "lower_bound_curve",
    "memory_sharing_envelope",
    "miso_zf_plan",
    "mod_bar",
    "optimal_ndt",
    "optimal_ndt_curve",
    "rank_with_gap",
    "rn_cache_cancel",
    "solve_precoders",
    "symbol_layout",
    "unicast_schedule",
    "verify_corner",
    "verify_m1k3",
    "worst_case_demand",
    "zf_assignment",
]

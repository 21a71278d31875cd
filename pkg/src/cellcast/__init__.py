"""Broadcast vs. unicast cost effectiveness in PPP cellular networks."""

from .analytic import (
    CELL_AREA_SHAPE,
    ModelParams,
    avg_saved,
    avg_wasted,
    cell_size_pdf,
    expected_subscribers,
    subscriber_pmf,
    subscriber_pmf_series,
)
from .economics import (
    Decision,
    EconParams,
    ServiceMode,
    breakeven_alpha,
    cost_reduction,
    decide,
)
from .errors import ConfigError, DegenerateInputError, ParameterError
from .geometry import (
    CellCensus,
    PointPattern,
    Role,
    Window,
    assign_nearest,
    sample_ppp,
    snapshot_export,
    thin,
)
from .montecarlo import (
    EstimateReport,
    SimPlan,
    empirical_pmf_distance,
    run_plan,
    sweep_alpha,
)
from .scheduler import (
    BroadcastSchedule,
    Content,
    VoteTally,
    run_voting,
    schedule_efficiency,
    schedule_equal,
    schedule_weighted,
)
from .streams import substream

__all__ = [
    "CELL_AREA_SHAPE",
    "BroadcastSchedule",
    "CellCensus",
    "ConfigError",
    "Content",
    "Decision",
    "DegenerateInputError",
    "EconParams",
    "EstimateReport",
    "ModelParams",
    "ParameterError",
    "PointPattern",
    "Role",
    "ServiceMode",
    "SimPlan",
    "VoteTally",
    "Window",
    "assign_nearest",
    "avg_saved",
    "avg_wasted",
    "breakeven_alpha",
    "cell_size_pdf",
    "cost_reduction",
    "decide",
    "empirical_pmf_distance",
    "expected_subscribers",
    "run_plan",
    "run_voting",
    "sample_ppp",
    "schedule_efficiency",
    "schedule_equal",
    "schedule_weighted",
    "snapshot_export",
    "subscriber_pmf",
    "subscriber_pmf_series",
    "substream",
    "sweep_alpha",
    "thin",
]

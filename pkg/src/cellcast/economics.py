"""Monetary trade-off between broadcasting and unicasting a stream.

Broadcasting saves the value of the per-cell resources it frees, wastes
the value of idle resources in empty cells, and carries a fixed
implementation cost. Because the void-probability terms of the saved and
wasted averages cancel, the net reduction collapses to
``v_r * (mu' - 1) - c_b`` with ``mu'`` the effective mean audience per
cell; it turns positive once the audience rating clears
``(lambda_b / lambda_u) * (c_b / v_r + 1)``.

Partial adoption (not every subscriber switches to the broadcast
channel) is modeled as one more independent thinning, so an adoption
fraction ``beta`` just rescales the audience rating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .analytic import ModelParams, avg_saved, avg_wasted
from .errors import ParameterError


@dataclass(frozen=True)
class EconParams:
    """Monetary value of one radio resource, broadcast setup cost, and
    the fraction of subscribers that actually adopt the broadcast."""

    v_r: float
    c_b: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.v_r > 0 and math.isfinite(self.v_r)):
            raise ParameterError(f"v_r must be positive, got {self.v_r}")
        if not (self.c_b >= 0 and math.isfinite(self.c_b)):
            raise ParameterError(f"c_b must be non-negative, got {self.c_b}")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must be in [0, 1], got {self.beta}")


class ServiceMode(Enum):
    BROADCAST = "broadcast"
    UNICAST = "unicast"


@dataclass(frozen=True)
class Decision:
    mode: ServiceMode
    cost_reduction: float


def effective_rating(model: ModelParams, econ: EconParams) -> ModelParams:
    """Fold the adoption fraction into the audience rating."""
    return replace(model, alpha=model.alpha * econ.beta)


def cost_reduction(model: ModelParams, econ: EconParams) -> float:
    """Average per-cell monetary gain of broadcast over unicast.

    Computed as value saved minus value wasted minus setup cost; equals
    v_r * (mu' - 1) - c_b up to roundoff.
    """
    eff = effective_rating(model, econ)
    return econ.v_r * (avg_saved(eff) - avg_wasted(eff)) - econ.c_b


def breakeven_alpha(model: ModelParams, econ: EconParams) -> float | None:
    """Smallest audience rating at which broadcast starts to pay.

    The rating on ``model`` is ignored; only the density ratio matters.
    Returns None when no rating in [0, 1] can make broadcast pay (sparse
    audiences, zero adoption, or the threshold exceeding 1).
    """
    if model.lambda_u == 0 or econ.beta == 0:
        return None
    alpha_star = (model.lambda_b / model.lambda_u) * (econ.c_b / econ.v_r + 1.0) / econ.beta
    return alpha_star if alpha_star <= 1.0 else None


def decide(model: ModelParams, econ: EconParams) -> Decision:
    """Broadcast iff the cost reduction is strictly positive.

    An exact break-even resolves to unicast: the setup-cost estimate is
    the least certain input, so the tie goes to the simpler deployment.
    """
    cr = cost_reduction(model, econ)
    mode = ServiceMode.BROADCAST if cr > 0.0 else ServiceMode.UNICAST
    return Decision(mode=mode, cost_reduction=cr)

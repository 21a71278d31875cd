"""Closed-form cell statistics for the PPP broadcast model.

The size of a typical Voronoi cell in a homogeneous PPP of base stations
is well approximated by a gamma density with shape 3.5 (the classical
Ferenc-Neda fit). Mixing a Poisson subscriber count over that cell size
gives a negative-binomial-shaped law for the number of subscribers per
cell, and from it the average radio resources saved (``k - 1`` per cell
with ``k >= 1`` subscribers) and wasted (one idle broadcast resource per
empty cell) when a stream is broadcast instead of unicast.

All gamma arithmetic is done in log space; the probability mass function
is additionally available through a stable multiplicative recurrence for
cumulative work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError

# Shape parameter of the gamma fit to normalized Poisson-Voronoi cell
# areas. Fixed; every formula below assumes exactly this value.
CELL_AREA_SHAPE = 3.5

# Cached gamma-function values for the shape constant.
GAMMA_OF_SHAPE = math.gamma(CELL_AREA_SHAPE)
_LGAMMA_SHAPE = math.lgamma(CELL_AREA_SHAPE)
_LOG_SHAPE = math.log(CELL_AREA_SHAPE)

# Tail-mass threshold and hard cap for adaptive PMF summation.
PMF_TAIL_TOL = 1e-12
PMF_K_CAP = 10**6


@dataclass(frozen=True)
class ModelParams:
    """Densities and audience rating of one streaming scenario.

    ``lambda_b`` and ``lambda_u`` are the base-station and mobile-user
    densities per unit area; ``alpha`` is the probability that a user
    subscribes to the content. The dimensionless ratio
    ``alpha * lambda_u / lambda_b`` (mean subscribers per cell) drives
    every closed form and is exposed as ``mu``.
    """

    lambda_b: float
    lambda_u: float
    alpha: float

    def __post_init__(self) -> None:
        if not (self.lambda_b > 0 and math.isfinite(self.lambda_b)):
            raise ParameterError(f"lambda_b must be positive, got {self.lambda_b}")
        if not (self.lambda_u >= 0 and math.isfinite(self.lambda_u)):
            raise ParameterError(f"lambda_u must be non-negative, got {self.lambda_u}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must be in [0, 1], got {self.alpha}")

    @property
    def mu(self) -> float:
        """Mean number of subscribers in a typical cell."""
        return self.alpha * self.lambda_u / self.lambda_b


def cell_size_pdf(x, lambda_b: float):
    """Density of the typical Voronoi cell area at ``x``.

    Gamma with shape 3.5 and mean ``1 / lambda_b``, evaluated in log
    space. Accepts a scalar or an array; returns the matching shape.
    """
    if not lambda_b > 0:
        raise ParameterError(f"lambda_b must be positive, got {lambda_b}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ParameterError("cell size x must be non-negative")
    c = CELL_AREA_SHAPE
    out = np.zeros_like(arr)
    pos = arr > 0
    with np.errstate(divide="ignore"):
        logpdf = (
            c * _LOG_SHAPE
            - _LGAMMA_SHAPE
            + c * math.log(lambda_b)
            + (c - 1.0) * np.log(arr, where=pos, out=np.zeros_like(arr))
            - c * lambda_b * arr
        )
    out[pos] = np.exp(logpdf[pos])
    return out if isinstance(x, np.ndarray) else float(out)


def subscriber_pmf(k, params: ModelParams):
    """Probability that a typical cell has exactly ``k`` subscribers.

    Poisson counts mixed over the gamma cell-size law collapse to

        P[K = k] = c^c Gamma(k+c) mu^k / (Gamma(c) k! (mu+c)^(k+c)),

    with c = 3.5 and mu = alpha * lambda_u / lambda_b, evaluated via
    log-gamma. ``mu = 0`` is the exact point mass at zero. Accepts a
    scalar or an array of non-negative integers.
    """
    karr = np.asarray(k)
    if not np.issubdtype(karr.dtype, np.integer):
        if np.any(np.floor(karr) != karr):
            raise ParameterError("k must be integer-valued")
        karr = karr.astype(np.int64)
    if np.any(karr < 0):
        raise ParameterError("k must be non-negative")

    mu = params.mu
    scalar = np.isscalar(k) or np.ndim(k) == 0
    if mu == 0.0:
        out = np.where(karr == 0, 1.0, 0.0)
        return float(out) if scalar else out

    c = CELL_AREA_SHAPE
    kf = karr.astype(float)
    logp = (
        c * _LOG_SHAPE
        + gammaln(kf + c)
        - _LGAMMA_SHAPE
        - gammaln(kf + 1.0)
        + kf * math.log(mu)
        - (kf + c) * math.log(mu + c)
    )
    out = np.exp(logp)
    return float(out) if scalar else out


def subscriber_pmf_series(params: ModelParams, k_max: int) -> np.ndarray:
    """P[K = 0..k_max] through the multiplicative recurrence.

    Uses P[k+1] = P[k] * ((k + c) / (k + 1)) * (mu / (mu + c)), which is
    stable and cheap for cumulative sums; agrees with the log-gamma path
    to ~1e-12.
    """
    if k_max < 0:
        raise ParameterError(f"k_max must be non-negative, got {k_max}")
    mu = params.mu
    if mu == 0.0:
        out = np.zeros(k_max + 1)
        out[0] = 1.0
        return out
    c = CELL_AREA_SHAPE
    q = mu / (mu + c)
    p = np.empty(k_max + 1)
    p[0] = math.exp(c * (_LOG_SHAPE - math.log(mu + c)))
    if k_max > 0:
        ks = np.arange(k_max, dtype=float)
        p[1:] = p[0] * np.cumprod((ks + c) / (ks + 1.0) * q)
    return p


def pmf_support(params: ModelParams, tail_tol: float = PMF_TAIL_TOL) -> np.ndarray:
    """PMF values from 0 up to where the remaining tail mass is < tail_tol.

    The ratio P[k+1]/P[k] decreases toward mu/(mu+c) < 1, so once the
    ratio r at the current k is below one, the tail beyond k is bounded
    by the geometric sum P[k] * r / (1 - r). Summation is capped at
    ``PMF_K_CAP`` terms.
    """
    mu = params.mu
    if mu == 0.0:
        return np.array([1.0])
    c = CELL_AREA_SHAPE
    q = mu / (mu + c)
    values = [math.exp(c * (_LOG_SHAPE - math.log(mu + c)))]
    k = 0
    while k < PMF_K_CAP:
        r = (k + c) / (k + 1.0) * q
        if r < 1.0 and values[-1] * r / (1.0 - r) < tail_tol:
            break
        values.append(values[-1] * r)
        k += 1
    return np.asarray(values)


def expected_subscribers(params: ModelParams) -> float:
    """Mean subscribers per typical cell: alpha * lambda_u / lambda_b."""
    return params.mu


def avg_wasted(params: ModelParams) -> float:
    """Average broadcast resources wasted per cell (one per empty cell).

    Equals the void probability (1 + mu/3.5)^(-3.5): ~1 when almost
    nobody subscribes, ~0 when cells are crowded.
    """
    mu = params.mu
    return (1.0 + mu / CELL_AREA_SHAPE) ** (-CELL_AREA_SHAPE)


def avg_saved(params: ModelParams) -> float:
    """Average radio resources saved per cell by broadcasting.

    Each cell with k >= 1 subscribers saves k - 1 unicast resources,
    which averages to mu + P[K=0] - 1. Approaches mu - 1 for crowded
    cells and 0 as the audience vanishes.
    """
    return params.mu + avg_wasted(params) - 1.0

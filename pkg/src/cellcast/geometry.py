"""Spatial sampling on a square torus window.

Base stations and users are drawn as homogeneous Poisson point processes
on a finite square with wraparound distance. The torus removes edge
effects, so every Voronoi cell is statistically equivalent and averaging
over all cells of a realization estimates typical-cell quantities
without bias.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateInputError, ParameterError

logger = logging.getLogger(__name__)

# Below lambda_b * area of ~100 expected cells, per-realization averages
# are too noisy to be meaningful; plans enforce this unless overridden.
MIN_EXPECTED_CELLS = 100.0


class Role(str, Enum):
    BS = "bs"
    MU = "mu"


@dataclass(frozen=True)
class Window:
    """Square observation window; distances wrap around (torus)."""

    side_length: float

    def __post_init__(self) -> None:
        if not (self.side_length > 0 and math.isfinite(self.side_length)):
            raise ParameterError(
                f"window side_length must be positive and finite, got {self.side_length}"
            )

    @property
    def area(self) -> float:
        return self.side_length**2


@dataclass(frozen=True, eq=False)
class PointPattern:
    """A finite set of tagged points inside a window.

    ``points`` is an (n, 2) float array with coordinates in
    [0, side_length).
    """

    points: np.ndarray
    role: Role
    window: Window

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)
        if pts.size and (pts.min() < 0.0 or pts.max() >= self.window.side_length):
            raise ParameterError("all coordinates must lie in [0, side_length)")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class CellCensus:
    """Per-station subscriber counts for one realization.

    ``counts[i]`` is the number of users whose nearest station is i;
    ``assignments[j]`` is the station index serving user j.
    """

    counts: np.ndarray
    assignments: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        assignments = np.asarray(self.assignments, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "assignments", assignments)
        if assignments.size and (
            assignments.min() < 0 or assignments.max() >= counts.shape[0]
        ):
            raise ParameterError("assignments reference stations outside the census")
        if not np.array_equal(np.bincount(assignments, minlength=counts.shape[0]), counts):
            raise ParameterError("census counts must tally the assignments")


def sample_ppp(
    density: float,
    window: Window,
    rng: np.random.Generator,
    role: Role = Role.MU,
) -> PointPattern:
    """Draw a homogeneous PPP realization on the window.

    The point count is Poisson(density * area); coordinates are i.i.d.
    uniform. Same generator state yields an identical pattern.
    """
    if not (density > 0 and math.isfinite(density)):
        raise ParameterError(f"density must be positive, got {density}")
    n = int(rng.poisson(density * window.area))
    pts = rng.uniform(0.0, window.side_length, size=(n, 2))
    # half-open draws can still round up to the boundary; wrap to 0
    pts[pts >= window.side_length] = 0.0
    return PointPattern(points=pts, role=role, window=window)


def thin(pattern: PointPattern, alpha: float, rng: np.random.Generator) -> PointPattern:
    """Keep each point independently with probability ``alpha``.

    Thinning a PPP of density lam yields a PPP of density alpha * lam.
    One uniform is consumed per point regardless of alpha, so retained
    sets are nested across alpha values for a fixed stream.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must be in [0, 1], got {alpha}")
    keep = rng.random(len(pattern)) < alpha
    return PointPattern(points=pattern.points[keep], role=pattern.role, window=pattern.window)


def assign_nearest(users: PointPattern, bss: PointPattern) -> CellCensus:
    """Count users per station under wraparound nearest-station service.

    Distance ties break toward the lowest station index. Raises
    DegenerateInputError when there are no stations (the caller decides
    whether to resample).
    """
    if len(bss) == 0:
        raise DegenerateInputError("cannot assign users: no base stations in pattern")
    if users.window != bss.window:
        raise ParameterError("user and station patterns must share a window")
    assignments = _nearest_station_grid(users.points, bss.points, users.window.side_length)
    counts = np.bincount(assignments, minlength=len(bss))
    return CellCensus(counts=counts, assignments=assignments)


def _torus_sq_dist(pts: np.ndarray, ref: np.ndarray, side: float) -> np.ndarray:
    """Squared wraparound distances between (m,2) and (c,2) arrays -> (m,c)."""
    delta = np.abs(pts[:, None, :] - ref[None, :, :])
    delta = np.minimum(delta, side - delta)
    return delta[..., 0] ** 2 + delta[..., 1] ** 2


def _nearest_station_grid(upts: np.ndarray, bpts: np.ndarray, side: float) -> np.ndarray:
    """Nearest station index per user via bucketed expanding-ring search.

    Stations are hashed into a g x g uniform grid (g ~ sqrt(n) for ~1
    station per bucket). Users are processed grouped by their own bucket:
    candidate stations are gathered ring by ring outward (with wraparound)
    until every user in the group has a best squared distance strictly
    below the ((r-1) * bucket_width)^2 lower bound of the next ring, which
    guarantees the result is identical to a full scan, including the
    lowest-index tie rule.
    """
    n_u = upts.shape[0]
    n_b = bpts.shape[0]
    if n_u == 0:
        return np.empty(0, dtype=np.int64)

    g = max(1, math.isqrt(n_b))
    bucket_w = side / g

    def bucket_ij(pts: np.ndarray) -> np.ndarray:
        ij = np.floor(pts / bucket_w).astype(np.int64)
        # coordinates equal to side - eps can round up at the boundary
        return np.clip(ij, 0, g - 1)

    b_ij = bucket_ij(bpts)
    b_flat = b_ij[:, 0] * g + b_ij[:, 1]
    order = np.argsort(b_flat, kind="stable")
    bs_sorted_pts = bpts[order]
    bs_sorted_idx = order.astype(np.int64)
    bucket_counts = np.bincount(b_flat, minlength=g * g)
    offsets = np.concatenate(([0], np.cumsum(bucket_counts)))

    u_ij = bucket_ij(upts)
    u_flat = u_ij[:, 0] * g + u_ij[:, 1]
    u_order = np.argsort(u_flat, kind="stable")
    sorted_users = upts[u_order]
    group_bounds = np.flatnonzero(np.diff(u_flat[u_order])) + 1
    group_starts = np.concatenate(([0], group_bounds))
    group_ends = np.concatenate((group_bounds, [n_u]))

    result = np.empty(n_u, dtype=np.int64)
    n_buckets = g * g

    for gs, ge in zip(group_starts, group_ends):
        members = sorted_users[gs:ge]
        m = ge - gs
        bi, bj = divmod(int(u_flat[u_order[gs]]), g)

        best_d2 = np.full(m, np.inf)
        best_idx = np.full(m, n_b, dtype=np.int64)
        seen: set[int] = set()
        r = 0
        while True:
            if r > 0:
                # unseen buckets sit at wrapped ring >= r, i.e. at least
                # (r - 1) bucket widths away; strict < keeps exact ties alive
                bound = (r - 1) * bucket_w
                if np.all(best_d2 < bound * bound):
                    break
            ring = _ring_buckets(bi, bj, r, g)
            fresh = [b for b in ring if b not in seen]
            seen.update(fresh)
            if fresh:
                cand_slices = [
                    slice(offsets[b], offsets[b + 1]) for b in fresh if bucket_counts[b]
                ]
                if cand_slices:
                    cand_idx = np.concatenate([bs_sorted_idx[s] for s in cand_slices])
                    cand_pts = np.concatenate([bs_sorted_pts[s] for s in cand_slices])
                    # candidates in index order so argmin ties pick the lowest
                    csort = np.argsort(cand_idx, kind="stable")
                    cand_idx = cand_idx[csort]
                    cand_pts = cand_pts[csort]
                    d2 = _torus_sq_dist(members, cand_pts, side)
                    jmin = np.argmin(d2, axis=1)
                    new_d2 = d2[np.arange(m), jmin]
                    new_idx = cand_idx[jmin]
                    upd = (new_d2 < best_d2) | ((new_d2 == best_d2) & (new_idx < best_idx))
                    best_d2[upd] = new_d2[upd]
                    best_idx[upd] = new_idx[upd]
            if len(seen) == n_buckets:
                break
            r += 1
        result[u_order[gs:ge]] = best_idx
    return result


def _ring_buckets(bi: int, bj: int, r: int, g: int) -> list[int]:
    """Flat ids of grid buckets at Chebyshev ring r around (bi, bj), wrapped."""
    if r == 0:
        return [bi * g + bj]
    ids = []
    for di in range(-r, r + 1):
        for dj in range(-r, r + 1):
            if max(abs(di), abs(dj)) != r:
                continue
            ids.append(((bi + di) % g) * g + ((bj + dj) % g))
    # wrapping can map distinct offsets onto the same bucket
    return sorted(set(ids))


def snapshot_export(bss: PointPattern, users: PointPattern, census: CellCensus) -> str:
    """Render one realization as delimited text for external plotting.

    Header ``role,x,y,cell``; station rows leave the cell column empty,
    user rows carry the index of their serving station.
    """
    if len(census.counts) != len(bss) or len(census.assignments) != len(users):
        raise ParameterError("census does not match the given patterns")
    lines = ["role,x,y,cell"]
    for x, y in bss.points:
        lines.append(f"{Role.BS.value},{x:.10g},{y:.10g},")
    for (x, y), cell in zip(users.points, census.assignments):
        lines.append(f"{Role.MU.value},{x:.10g},{y:.10g},{cell}")
    return "\n".join(lines) + "\n"

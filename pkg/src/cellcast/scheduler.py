"""Periodic broadcast scheduling for buffered contents.

Two ways to fill a broadcast period with slots: scheduled play rotates
the top-n most popular contents (with equal or popularity-proportional
slot shares), and real-time voting plays, each period, whatever won the
previous period's vote. A slot sequence can then be valued by summing
the per-slot broadcast cost reduction under a caller-supplied demand
model (content id -> concurrent audience rating).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace

import numpy as np

from .analytic import ModelParams
from .economics import EconParams, cost_reduction
from .errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Content:
    id: int
    popularity: float

    def __post_init__(self) -> None:
        if self.popularity < 0:
            raise ParameterError(f"popularity must be >= 0, got {self.popularity}")


@dataclass(frozen=True, eq=False)
class BroadcastSchedule:
    """An ordered assignment of content ids to the slots of one period."""

    period_slots: int
    slots: list[int]

    def __post_init__(self) -> None:
        if self.period_slots < 1:
            raise ParameterError(f"period_slots must be >= 1, got {self.period_slots}")
        if len(self.slots) != self.period_slots:
            raise ParameterError("every slot of the period must be filled")


@dataclass(frozen=True)
class VoteTally:
    """Votes per content id for one voting period."""

    counts: dict[int, int]

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.counts.values()):
            raise ParameterError("vote counts must be non-negative")


def plurality_winner(tally: VoteTally) -> int:
    """Content with the most votes; ties break toward the lower id."""
    if not tally.counts:
        raise ParameterError("cannot pick a winner from an empty tally")
    top = max(tally.counts.values())
    return min(cid for cid, v in tally.counts.items() if v == top)


def _top_by_popularity(catalog: Sequence[Content], n: int) -> list[Content]:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if n > len(catalog):
        raise ParameterError(f"n={n} exceeds catalog size {len(catalog)}")
    ids = [c.id for c in catalog]
    if len(set(ids)) != len(ids):
        raise ParameterError("catalog ids must be unique")
    return sorted(catalog, key=lambda c: (-c.popularity, c.id))[:n]


def schedule_equal(
    catalog: Sequence[Content], n: int, period_slots: int
) -> BroadcastSchedule:
    """Rotate the top-n contents round-robin over the period.

    Appearance counts differ by at most one, with the extra slots going
    to the more popular contents.
    """
    top = _top_by_popularity(catalog, n)
    if period_slots < n:
        raise ParameterError(f"period_slots={period_slots} must be >= n={n}")
    slots = [top[i % n].id for i in range(period_slots)]
    return BroadcastSchedule(period_slots=period_slots, slots=slots)


def apportion_slots(weights: Sequence[float], total: int) -> list[int]:
    """Largest-remainder split of ``total`` slots, at least one each.

    Remainder ties go to the earlier entry. If plain largest remainder
    starves an entry, slots are moved from the currently largest share
    (ties toward the later entry) until everyone holds at least one;
    callers guarantee total >= len(weights).
    """
    n = len(weights)
    if total < n:
        raise ParameterError(f"cannot give {n} entries at least one of {total} slots")
    if any(w < 0 for w in weights):
        raise ParameterError("weights must be non-negative")
    w_sum = float(sum(weights))
    if w_sum == 0:
        raise ParameterError("weights must not all be zero")

    quotas = [total * w / w_sum for w in weights]
    counts = [math.floor(q) for q in quotas]
    spare = total - sum(counts)
    by_remainder = sorted(range(n), key=lambda i: (counts[i] - quotas[i], i))
    for i in by_remainder[:spare]:
        counts[i] += 1

    while 0 in counts:
        starved = counts.index(0)
        donor = max(range(n), key=lambda i: (counts[i], i))
        counts[donor] -= 1
        counts[starved] += 1
    return counts


def _interleave(ids: Sequence[int], counts: Sequence[int]) -> list[int]:
    # spread the i-th content's k-th repeat near slot (k + 1/2) / counts[i]
    ideal = [
        ((k + 0.5) / c, pos)
        for pos, c in enumerate(counts)
        if c > 0
        for k in range(c)
    ]
    ideal.sort()
    return [ids[pos] for _, pos in ideal]


def schedule_weighted(
    catalog: Sequence[Content], n: int, period_slots: int
) -> BroadcastSchedule:
    """Give the top-n contents slot shares proportional to popularity.

    Shares come from largest-remainder apportionment (never starving a
    selected content); repeats are spaced as evenly as the counts allow.
    Falls back to the equal rotation when the top-n weights are all zero.
    """
    top = _top_by_popularity(catalog, n)
    if period_slots < n:
        raise ParameterError(f"period_slots={period_slots} must be >= n={n}")
    weights = [c.popularity for c in top]
    if sum(weights) == 0:
        logger.warning("all top-%d weights are zero; falling back to equal rotation", n)
        return schedule_equal(catalog, n, period_slots)
    counts = apportion_slots(weights, period_slots)
    slots = _interleave([c.id for c in top], counts)
    return BroadcastSchedule(period_slots=period_slots, slots=slots)


def zipf_rank_weights(n_items: int, exponent: float) -> np.ndarray:
    """Normalized rank^(-exponent) probabilities for ranks 1..n_items."""
    if exponent < 0:
        raise ParameterError(f"zipf exponent must be >= 0, got {exponent}")
    w = np.arange(1, n_items + 1, dtype=float) ** (-exponent)
    return w / w.sum()


def run_voting(
    catalog: Sequence[Content],
    voters: int,
    rounds: int,
    zipf_exponent: float,
    rng: np.random.Generator,
    exclude_previous_winner: bool = False,
) -> list[tuple[VoteTally, int]]:
    """Simulate per-period plurality voting over the catalog.

    Each voter independently picks a content with probability following
    a Zipf law over popularity rank. The round's winner (vote ties break
    toward the lower content id) is what plays in the next period. With
    ``exclude_previous_winner`` the content just played sits the next
    vote out (its probability mass is renormalized away).
    """
    if not catalog:
        raise ParameterError("catalog must not be empty")
    if voters < 0 or rounds < 1:
        raise ParameterError("voters must be >= 0 and rounds >= 1")
    ranked = _top_by_popularity(catalog, len(catalog))
    ids = np.array([c.id for c in ranked])
    base_p = zipf_rank_weights(len(ranked), zipf_exponent)

    transcript: list[tuple[VoteTally, int]] = []
    previous_winner: int | None = None
    for _ in range(rounds):
        p = base_p
        if exclude_previous_winner and previous_winner is not None and len(ranked) > 1:
            p = base_p.copy()
            p[ids == previous_winner] = 0.0
            p = p / p.sum()
        if voters == 0:
            logger.warning("voting round with zero voters; defaulting to the top content")
            votes = np.zeros(len(ranked), dtype=np.int64)
            tally = VoteTally(counts={int(i): 0 for i in ids})
            winner = int(ids[0])
        else:
            drawn = rng.choice(len(ranked), size=voters, p=p)
            votes = np.bincount(drawn, minlength=len(ranked))
            tally = VoteTally(counts={int(i): int(v) for i, v in zip(ids, votes)})
            winner = plurality_winner(tally)
        transcript.append((tally, winner))
        previous_winner = winner
    return transcript


@dataclass(frozen=True, eq=False)
class ScheduleValue:
    """Total and per-slot cost reduction of a played sequence."""

    total: float
    per_slot: list[tuple[int, float]]


def _played_sequence(played) -> list[int]:
    if isinstance(played, BroadcastSchedule):
        return list(played.slots)
    out = []
    for item in played:
        if isinstance(item, tuple):  # voting transcript entry
            out.append(int(item[1]))
        else:
            out.append(int(item))
    return out


def schedule_efficiency(
    played,
    demand: Mapping[int, float],
    model: ModelParams,
    econ: EconParams,
) -> ScheduleValue:
    """Value a slot sequence under a per-content audience model.

    ``played`` may be a schedule, a voting transcript, or a plain id
    sequence. ``demand`` maps each content id to the audience rating its
    broadcast would draw; each slot contributes the corresponding cost
    reduction.
    """
    per_slot: list[tuple[int, float]] = []
    total = 0.0
    for cid in _played_sequence(played):
        if cid not in demand:
            raise ParameterError(f"demand model does not cover content {cid}")
        rating = demand[cid]
        if not 0.0 <= rating <= 1.0:
            raise ParameterError(f"audience rating must be in [0, 1], got {rating}")
        cr = cost_reduction(replace(model, alpha=rating), econ)
        per_slot.append((cid, cr))
        total += cr
    return ScheduleValue(total=total, per_slot=per_slot)


def format_schedule(schedule: BroadcastSchedule) -> str:
    """Delimited text ``slot,content_id``."""
    lines = ["slot,content_id"]
    lines += [f"{i},{cid}" for i, cid in enumerate(schedule.slots)]
    return "\n".join(lines) + "\n"


def format_voting_transcript(transcript: Sequence[tuple[VoteTally, int]]) -> str:
    """Delimited text ``round,content_id,votes,winner_flag``."""
    lines = ["round,content_id,votes,winner_flag"]
    for rnd, (tally, winner) in enumerate(transcript):
        for cid in sorted(tally.counts):
            flag = 1 if cid == winner else 0
            lines.append(f"{rnd},{cid},{tally.counts[cid]},{flag}")
    return "\n".join(lines) + "\n"

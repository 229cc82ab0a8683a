"""Scoring: success rate, distance, and relative rationality.

All three scores pair bid_i with price p_i for i = 1..t; the trailing
recommendation bid has no realized price and is never scored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError
from .strategies import BidSeries
from .trace import PriceTrace


@dataclass(frozen=True)
class MetricsSummary:
    """Per-strategy scores.

    success_rate is the 0-1 fraction of steps where the standing bid met or
    exceeded the spot price (ties succeed).  distance is the L1 distance
    between bids and prices in USD.  relative_rationality is filled in only
    within a comparison set, where the smallest-distance strategy scores 1.
    """

    success_rate: float
    distance: float
    relative_rationality: float | None = None


def _scored_pairs(series: BidSeries, trace: PriceTrace) -> zip:
    if len(series.bids) != len(trace.points) + 1:
        raise DataError(
            f"series/trace length mismatch: {len(series.bids)} bids for "
            f"{len(trace.points)} prices (expected t+1 bids)"
        )
    return zip(series.scored_bids(), trace.prices())


def success_rate(series: BidSeries, trace: PriceTrace) -> float:
    """Fraction of the t scored steps with bid_i >= p_i."""
    hits = sum(1 for bid, price in _scored_pairs(series, trace) if bid >= price)
    return hits / len(trace.points)


def distance(series: BidSeries, trace: PriceTrace) -> float:
    """L1 distance sum(|bid_i - p_i|) over the t scored steps.

    Accumulated in step order by plain addition; tests hold a straight-loop
    oracle to bitwise equality, so the order is contractual.  An explicit
    loop, not builtin sum: newer interpreters compensate float summation,
    which would change results in the last ulp.
    """
    total = 0.0
    for bid, price in _scored_pairs(series, trace):
        total += abs(bid - price)
    return total


def score(series: BidSeries, trace: PriceTrace) -> MetricsSummary:
    return MetricsSummary(
        success_rate=success_rate(series, trace),
        distance=distance(series, trace),
    )


def relative_rationality(
    distances: Sequence[tuple[str, float]],
) -> list[tuple[str, float]]:
    """Normalize a comparison set of distances: rr_j = min(d) / d_j.

    Every rr lies in (0, 1] and at least one entry is exactly 1.  A zero
    distance is rejected: relative rationality assumes no strategy tracks
    the trace perfectly.
    """
    if not distances:
        raise ValueError("empty comparison set")
    for name, d in distances:
        if d == 0:
            raise DataError(
                f"strategy {name!r} has zero distance; relative rationality "
                f"assumes no strategy tracks the trace perfectly"
            )
        if not (math.isfinite(d) and d > 0):
            raise DataError(f"strategy {name!r} has invalid distance {d!r}")
    smallest = min(d for _, d in distances)
    return [(name, smallest / d) for name, d in distances]

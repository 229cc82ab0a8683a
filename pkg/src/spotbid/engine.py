"""Backtest orchestration, gain/adjustment sweeps, and Pareto extraction.

Every strategy (or sweep cell) replays independently against the identical
trace, so work units may run concurrently; results always merge back in the
deterministic configured order and serial and parallel runs produce
identical output.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Callable, Sequence, TypeVar

from . import metrics
from .band_model import PriceBand
from .controller import PiGains
from .errors import UsageError
from .strategies import (
    Adjustments,
    BidSeries,
    StrategyKind,
    StrategySpec,
    run_strategy,
    validate_spec,
)
from .trace import PriceTrace, format_timestamp, validate

ENGINE_VERSION = "0.1.0"

_T = TypeVar("_T")
_R = TypeVar("_R")


@dataclass(frozen=True)
class TraceMeta:
    """Trace identification echoed into reports."""

    instance_type: str
    product: str
    zone: str
    start: str
    end: str
    n_points: int

    @classmethod
    def from_trace(cls, trace: PriceTrace) -> "TraceMeta":
        return cls(
            instance_type=trace.instance_type,
            product=trace.product,
            zone=trace.zone,
            start=format_timestamp(trace.points[0].timestamp),
            end=format_timestamp(trace.points[-1].timestamp),
            n_points=len(trace.points),
        )


@dataclass(frozen=True)
class StrategyResult:
    name: str
    series: BidSeries
    metrics: metrics.MetricsSummary


@dataclass(frozen=True)
class BacktestReport:
    trace_meta: TraceMeta
    band: PriceBand
    results: tuple[StrategyResult, ...]
    engine_version: str = ENGINE_VERSION
    config_echo: dict[str, object] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def rationality_set(self) -> list[tuple[str, float]]:
        return [(r.name, r.metrics.relative_rationality) for r in self.results]


@dataclass(frozen=True)
class SweepConfig:
    """Grid over feedback gains and adjustments.

    Magnitudes are positive; the applied gains are their negations.
    """

    band: PriceBand
    kp_magnitudes: tuple[float, ...]
    ki_magnitudes: tuple[float, ...]
    pre_deltas: tuple[float, ...] = (0.0,)
    post_deltas: tuple[float, ...] = (0.0,)
    initial_bid: float | None = None

    def __post_init__(self) -> None:
        for label in ("kp_magnitudes", "ki_magnitudes", "pre_deltas", "post_deltas"):
            values = tuple(getattr(self, label))
            object.__setattr__(self, label, values)
            if not values:
                raise ValueError(f"{label} must be nonempty")
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{label} must be finite, got {values}")
        for label in ("kp_magnitudes", "ki_magnitudes"):
            if not all(v > 0 for v in getattr(self, label)):
                raise ValueError(f"{label} must be positive magnitudes")


@dataclass(frozen=True)
class SweepPoint:
    """One grid cell: the applied (negative) gains, deltas, and scores."""

    kp: float
    ki: float
    pre_delta: float
    post_delta: float
    success_rate: float
    distance: float
    relative_rationality: float | None = None
    pareto_member: bool = False


def _ordered_map(
    fn: Callable[[_T], _R], items: Sequence[_T], parallel: bool
) -> list[_R]:
    # ThreadPoolExecutor.map preserves input order, keeping parallel output
    # identical to serial.
    if parallel and len(items) > 1:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _unique_names(base_names: Sequence[str]) -> list[str]:
    seen: dict[str, int] = {}
    names = []
    for base in base_names:
        seen[base] = seen.get(base, 0) + 1
        names.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return names


def backtest(
    trace: PriceTrace,
    specs: Sequence[StrategySpec],
    band: PriceBand,
    *,
    parallel: bool = False,
    allow_positive_gains: bool = False,
    config_echo: dict[str, object] | None = None,
) -> BacktestReport:
    """Replay every strategy against the same trace and score the set.

    Output ordering equals spec ordering; strategies sharing a kind get
    #2/#3 suffixes so report names stay unique.
    """
    validate(trace)
    if not specs:
        raise UsageError("at least one strategy is required")
    for spec in specs:
        validate_spec(spec, band, require_negative_gains=not allow_positive_gains)

    series_list = _ordered_map(
        lambda spec: run_strategy(spec, trace, band), list(specs), parallel
    )
    names = _unique_names([series.strategy_name for series in series_list])
    summaries = [metrics.score(series, trace) for series in series_list]
    rationality = metrics.relative_rationality(
        [(name, summary.distance) for name, summary in zip(names, summaries)]
    )

    results = tuple(
        StrategyResult(
            name=name,
            series=replace(series, strategy_name=name),
            metrics=replace(summary, relative_rationality=rr),
        )
        for name, series, summary, (_, rr) in zip(
            names, series_list, summaries, rationality
        )
    )
    warnings = ()
    if allow_positive_gains and any(
        spec.gains is not None and (spec.gains.kp >= 0 or spec.gains.ki >= 0)
        for spec in specs
    ):
        warnings = (
            "positive gains enabled: the controller pushes bids away from "
            "the price instead of correcting toward it",
        )
    return BacktestReport(
        trace_meta=TraceMeta.from_trace(trace),
        band=band,
        results=results,
        engine_version=ENGINE_VERSION,
        config_echo=dict(config_echo or {}),
        warnings=warnings,
    )


def sweep(
    trace: PriceTrace, config: SweepConfig, *, parallel: bool = False
) -> list[SweepPoint]:
    """Score the feedback strategy at every grid cell.

    Cells are emitted sorted by (kp, ki, pre_delta, post_delta) of the
    applied values, deduplicated, with relative rationality computed over
    the whole sweep and Pareto membership marked.
    """
    validate(trace)
    cells = sorted(
        {
            (-kp_mag, -ki_mag, pre, post)
            for kp_mag, ki_mag, pre, post in product(
                config.kp_magnitudes,
                config.ki_magnitudes,
                config.pre_deltas,
                config.post_deltas,
            )
        }
    )

    def evaluate(cell: tuple[float, float, float, float]) -> metrics.MetricsSummary:
        kp, ki, pre, post = cell
        spec = StrategySpec(
            kind=StrategyKind.FEEDBACK,
            gains=PiGains(kp=kp, ki=ki),
            adjustments=Adjustments(pre_delta=pre, post_delta=post),
            initial_bid=config.initial_bid,
        )
        series = run_strategy(spec, trace, config.band)
        return metrics.score(series, trace)

    summaries = _ordered_map(evaluate, cells, parallel)
    rationality = metrics.relative_rationality(
        [
            (f"kp={kp},ki={ki},pre={pre},post={post}", summary.distance)
            for (kp, ki, pre, post), summary in zip(cells, summaries)
        ]
    )
    points = [
        SweepPoint(
            kp=kp,
            ki=ki,
            pre_delta=pre,
            post_delta=post,
            success_rate=summary.success_rate,
            distance=summary.distance,
            relative_rationality=rr,
        )
        for (kp, ki, pre, post), summary, (_, rr) in zip(
            cells, summaries, rationality
        )
    ]
    return pareto(points)


def pareto_flags(points: Sequence[tuple[float, float]]) -> list[bool]:
    """Non-domination flags for (success_rate, distance) pairs.

    Point i is dominated when some j has sr_j >= sr_i and d_j <= d_i with at
    least one strict inequality; duplicates of a frontier point are all
    members.  Sort-based, O(n log n).
    """
    if not points:
        raise ValueError("empty point set")
    order = sorted(range(len(points)), key=lambda i: (-points[i][0], points[i][1]))
    flags = [False] * len(points)
    best_d = math.inf  # smallest distance seen at strictly higher success rates
    i = 0
    while i < len(order):
        j = i
        sr = points[order[i]][0]
        while j < len(order) and points[order[j]][0] == sr:
            j += 1
        group = order[i:j]
        group_min_d = min(points[k][1] for k in group)
        if group_min_d < best_d:
            for k in group:
                if points[k][1] == group_min_d:
                    flags[k] = True
            best_d = group_min_d
        i = j
    return flags


def pareto(points: Sequence[SweepPoint]) -> list[SweepPoint]:
    """Return the points with pareto_member set from (sr, d) domination."""
    flags = pareto_flags([(p.success_rate, p.distance) for p in points])
    return [replace(p, pareto_member=flag) for p, flag in zip(points, flags)]

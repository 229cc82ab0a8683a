"""Bidding strategy catalogue behind one uniform next-bid interface.

Six strategies share the same replay convention: bid_1 is the bid standing
when the first price arrives, and after observing price p_j the strategy
emits bid_{j+1}.  A t-point trace therefore yields t+1 bids, the last of
which never meets a realized price and is only a recommendation.

The feedback strategy closes the loop: bid error -> PI controller -> band
model -> next bid.  The five baselines (minimum, mean, high, current,
ondemand) are price statistics.  Bidding can be biased at three stages:
shifting the reference prices (pre_delta, feedback only), changing the
controller gains, or shifting the emitted bids (post_delta).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from . import controller
from .band_model import PriceBand, bid_from_control
from .controller import ControllerState, PiGains
from .errors import UsageError
from .trace import PriceTrace


class StrategyKind(enum.Enum):
    FEEDBACK = "feedback"
    MINIMUM = "minimum"
    MEAN = "mean"
    HIGH = "high"
    CURRENT = "current"
    ONDEMAND = "ondemand"


class StatMode(enum.Enum):
    """How minimum/mean/high read the price history.

    Causal uses only already-observed prices; a deployable bidder cannot see
    the future.  FullTrace uses the whole-trace statistic, constant across
    the series.
    """

    CAUSAL = "causal"
    FULL_TRACE = "fulltrace"


STAT_KINDS = frozenset({StrategyKind.MINIMUM, StrategyKind.MEAN, StrategyKind.HIGH})


@dataclass(frozen=True)
class Adjustments:
    """Bid biases: pre_delta shifts each reference price before the
    controller sees it, post_delta shifts each emitted bid."""

    pre_delta: float = 0.0
    post_delta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.pre_delta) and math.isfinite(self.post_delta)):
            raise ValueError(
                f"adjustments must be finite, got pre_delta={self.pre_delta}, "
                f"post_delta={self.post_delta}"
            )


@dataclass(frozen=True)
class StrategySpec:
    """A configured strategy.

    gains are required for feedback and forbidden elsewhere; stat_mode
    applies only to minimum/mean/high and defaults to causal.  initial_bid
    None means the default, half the band ceiling, resolved at run time.
    """

    kind: StrategyKind
    gains: PiGains | None = None
    adjustments: Adjustments = field(default_factory=Adjustments)
    initial_bid: float | None = None
    stat_mode: StatMode | None = None

    def __post_init__(self) -> None:
        if self.kind is StrategyKind.FEEDBACK:
            if self.gains is None:
                raise ValueError("feedback strategy requires gains")
        elif self.gains is not None:
            raise ValueError(f"{self.kind.value} strategy takes no gains")
        if self.kind in STAT_KINDS:
            if self.stat_mode is None:
                object.__setattr__(self, "stat_mode", StatMode.CAUSAL)
        elif self.stat_mode is not None:
            raise ValueError(f"{self.kind.value} strategy takes no stat_mode")
        if self.initial_bid is not None and not math.isfinite(self.initial_bid):
            raise ValueError(f"initial_bid must be finite, got {self.initial_bid}")


@dataclass(frozen=True)
class StrategyState:
    """Per-kind replay state threaded through next_bid."""

    controller: ControllerState | None = None  # feedback
    prev_bid: float | None = None  # feedback: last emitted bid
    running_min: float | None = None
    running_sum: float = 0.0
    running_max: float | None = None
    count: int = 0
    constant_bid: float | None = None  # fulltrace statistic / precomputed constant


@dataclass(frozen=True)
class BidSeries:
    """A strategy's bid trajectory: t+1 bids for a t-point trace.

    bids[-1] is emitted after the last observed price and never meets a
    realized price; it is a recommendation only and is excluded from
    scoring.
    """

    strategy_name: str
    bids: tuple[float, ...]
    spec: StrategySpec

    def scored_bids(self) -> tuple[float, ...]:
        return self.bids[:-1]


def initial_bid_default(band: PriceBand) -> float:
    """Default first bid: half the band ceiling (the on-demand price)."""
    return band.ceiling / 2


def resolve_initial_bid(spec: StrategySpec, band: PriceBand) -> float:
    return (
        spec.initial_bid
        if spec.initial_bid is not None
        else initial_bid_default(band)
    )


def validate_spec(
    spec: StrategySpec, band: PriceBand, *, require_negative_gains: bool = True
) -> None:
    """Check band-dependent invariants; raises UsageError on violation.

    The default initial bid (ceiling/2) can fall below the floor on narrow
    bands; that is rejected here to force an explicit choice.
    """
    resolved = resolve_initial_bid(spec, band)
    if not band.floor <= resolved <= band.ceiling:
        raise UsageError(
            f"initial bid {resolved} outside band [{band.floor}, {band.ceiling}]"
            + ("" if spec.initial_bid is not None else " (default ceiling/2)")
        )
    if spec.gains is not None and require_negative_gains:
        if spec.gains.kp >= 0 or spec.gains.ki >= 0:
            raise UsageError(
                f"gains must be negative for corrective control, got "
                f"kp={spec.gains.kp}, ki={spec.gains.ki}; "
                f"pass allow_positive_gains to override"
            )


def _full_trace_stat(kind: StrategyKind, prices: tuple[float, ...]) -> float:
    if kind is StrategyKind.MINIMUM:
        return min(prices)
    if kind is StrategyKind.HIGH:
        return max(prices)
    return sum(prices) / len(prices)


def next_bid(
    spec: StrategySpec,
    state: StrategyState,
    observed_price: float,
    band: PriceBand,
) -> tuple[float, StrategyState]:
    """Emit the bid responding to one observed price, with updated state."""
    if not math.isfinite(observed_price):
        raise ValueError(f"observed price must be finite, got {observed_price!r}")
    post = spec.adjustments.post_delta
    kind = spec.kind

    if kind is StrategyKind.FEEDBACK:
        if state.controller is None or state.prev_bid is None:
            raise ValueError("feedback state not initialized")
        error = (observed_price + spec.adjustments.pre_delta) - state.prev_bid
        u, ctrl = controller.step(state.controller, error, spec.gains, band)
        bid = band.clamp(bid_from_control(u, band) + post)
        return bid, replace(state, controller=ctrl, prev_bid=bid)

    if kind is StrategyKind.ONDEMAND:
        return band.ceiling, state

    if kind is StrategyKind.CURRENT:
        return band.clamp(observed_price + post), state

    # statistic kinds
    if spec.stat_mode is StatMode.FULL_TRACE:
        if state.constant_bid is None:
            raise ValueError("fulltrace state not initialized")
        return state.constant_bid, state
    count = state.count + 1
    if kind is StrategyKind.MINIMUM:
        stat = (
            observed_price
            if state.running_min is None
            else min(state.running_min, observed_price)
        )
        new_state = replace(state, running_min=stat, count=count)
    elif kind is StrategyKind.HIGH:
        stat = (
            observed_price
            if state.running_max is None
            else max(state.running_max, observed_price)
        )
        new_state = replace(state, running_max=stat, count=count)
    else:
        running_sum = state.running_sum + observed_price
        stat = running_sum / count
        new_state = replace(state, running_sum=running_sum, count=count)
    return band.clamp(stat + post), new_state


def run_strategy(
    spec: StrategySpec, trace: PriceTrace, band: PriceBand
) -> BidSeries:
    """Replay one strategy over a validated trace.

    Constant strategies (ondemand, and the statistics in fulltrace mode)
    already bid their constant when the first price arrives; the other
    strategies start from the configured initial bid.
    """
    validate_spec(spec, band, require_negative_gains=False)
    prices = trace.prices()
    post = spec.adjustments.post_delta

    if spec.kind is StrategyKind.ONDEMAND:
        first = band.ceiling
        state = StrategyState()
    elif spec.kind in STAT_KINDS and spec.stat_mode is StatMode.FULL_TRACE:
        constant = band.clamp(_full_trace_stat(spec.kind, prices) + post)
        first = constant
        state = StrategyState(constant_bid=constant)
    elif spec.kind is StrategyKind.FEEDBACK:
        first = resolve_initial_bid(spec, band)
        state = StrategyState(controller=ControllerState(), prev_bid=first)
    else:
        first = resolve_initial_bid(spec, band)
        state = StrategyState()

    bids = [first]
    for price in prices:
        bid, state = next_bid(spec, state, price, band)
        bids.append(bid)
    return BidSeries(strategy_name=spec.kind.value, bids=tuple(bids), spec=spec)

"""spotbid: deterministic backtesting of cloud spot-price bidding strategies.

Replays spot-price history against a feedback-control bidding mechanism and
five baseline strategies, scores each on success rate, distance, and
relative rationality, and sweeps controller parameters to map the Pareto
frontier of the success/rationality trade-off.
"""
from .band_model import PriceBand, bid_from_control, control_from_bid
from .controller import ControllerState, PiGains, reset, step
from .engine import (
    ENGINE_VERSION,
    BacktestReport,
    StrategyResult,
    SweepConfig,
    SweepPoint,
    TraceMeta,
    backtest,
    pareto,
    pareto_flags,
    sweep,
)
from .errors import DataError, SpotBidError, UsageError
from .metrics import (
    MetricsSummary,
    distance,
    relative_rationality,
    score,
    success_rate,
)
from .strategies import (
    STAT_KINDS,
    Adjustments,
    BidSeries,
    StatMode,
    StrategyKind,
    StrategySpec,
    StrategyState,
    initial_bid_default,
    next_bid,
    resolve_initial_bid,
    run_strategy,
    validate_spec,
)
from .trace import (
    PricePoint,
    PriceTrace,
    SynthConfig,
    TraceFilter,
    format_timestamp,
    parse_aws_json,
    parse_csv,
    synth_step_hold,
    to_csv,
    validate,
)

__version__ = ENGINE_VERSION

__all__ = [
    "Adjustments",
    "BacktestReport",
    "BidSeries",
    "ControllerState",
    "DataError",
    "ENGINE_VERSION",
    "MetricsSummary",
    "PiGains",
    "PriceBand",
    "PricePoint",
    "PriceTrace",
    "STAT_KINDS",
    "SpotBidError",
    "StatMode",
    "StrategyKind",
    "StrategyResult",
    "StrategySpec",
    "StrategyState",
    "SweepConfig",
    "SweepPoint",
    "SynthConfig",
    "TraceFilter",
    "TraceMeta",
    "UsageError",
    "backtest",
    "bid_from_control",
    "control_from_bid",
    "distance",
    "format_timestamp",
    "initial_bid_default",
    "next_bid",
    "pareto",
    "pareto_flags",
    "parse_aws_json",
    "parse_csv",
    "relative_rationality",
    "reset",
    "resolve_initial_bid",
    "run_strategy",
    "score",
    "step",
    "success_rate",
    "sweep",
    "synth_step_hold",
    "to_csv",
    "validate",
    "validate_spec",
    "__version__",
]

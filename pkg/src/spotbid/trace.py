"""Spot-price traces: ingestion, validation, filtering, and synthesis.

A trace is the reference signal every strategy is replayed against.  Two
input formats are supported: a two-column CSV (`timestamp,price`) and the
JSON export shape of the EC2 spot-price-history tooling.  Timestamps are
UTC instants at second resolution; prices are positive USD/hour values
parsed into double precision.
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .band_model import PriceBand
from .errors import DataError

# Epoch for synthetic timestamps, one point per minute.
SYNTH_EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)

_AWS_FIELDS = (
    "Timestamp",
    "SpotPrice",
    "InstanceType",
    "ProductDescription",
    "AvailabilityZone",
)


@dataclass(frozen=True)
class PricePoint:
    """One spot-price observation: UTC instant and USD/hour price."""

    timestamp: datetime
    price: float


@dataclass(frozen=True)
class PriceTrace:
    """Ordered spot-price observations plus market metadata labels."""

    points: tuple[PricePoint, ...]
    instance_type: str = ""
    product: str = ""
    zone: str = ""

    def __len__(self) -> int:
        return len(self.points)

    def prices(self) -> tuple[float, ...]:
        return tuple(pt.price for pt in self.points)


@dataclass(frozen=True)
class TraceFilter:
    """Record selection for the JSON parser; absent fields match everything."""

    instance_type: str | None = None
    product: str | None = None
    zone: str | None = None
    time_range: tuple[datetime, datetime] | None = None

    def __post_init__(self) -> None:
        if self.time_range is not None:
            start, end = self.time_range
            if start.tzinfo is None or end.tzinfo is None:
                raise ValueError("time_range bounds must be timezone-aware")
            if start > end:
                raise ValueError(f"time_range start {start} after end {end}")


@dataclass(frozen=True)
class SynthConfig:
    """Parameters for the step-hold synthetic generator.

    The price path holds each level for a geometrically distributed number
    of steps (mean hold_steps_mean), then jumps by a uniform draw from
    [-step_scale, +step_scale], clamped into the band.
    """

    band: PriceBand
    n_points: int
    hold_steps_mean: int = 1
    step_scale: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.band, PriceBand):
            # accept a bare (floor, ceiling) pair
            object.__setattr__(self, "band", PriceBand(*self.band))
        if self.n_points < 1:
            raise ValueError(f"n_points must be >= 1, got {self.n_points}")
        if self.hold_steps_mean < 1:
            raise ValueError(
                f"hold_steps_mean must be >= 1, got {self.hold_steps_mean}"
            )
        if not (math.isfinite(self.step_scale) and self.step_scale > 0):
            raise ValueError(f"step_scale must be > 0, got {self.step_scale}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def _decode(raw: bytes | str) -> str:
    if isinstance(raw, str):
        return raw
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"input is not valid UTF-8: {exc}") from None


def _parse_timestamp(text: str, where: str) -> datetime:
    raw = text.strip()
    # Python 3.10 fromisoformat rejects the 'Z' suffix.
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(raw)
    except ValueError:
        raise DataError(f"unparseable timestamp {text!r} at {where}") from None
    if ts.tzinfo is None:
        raise DataError(f"timestamp {text!r} at {where} lacks a UTC offset")
    ts = ts.astimezone(timezone.utc)
    if ts.microsecond:
        raise DataError(f"timestamp {text!r} at {where} has sub-second precision")
    return ts


def _parse_price(text: str, where: str) -> float:
    try:
        price = float(text.strip())
    except ValueError:
        raise DataError(f"unparseable price {text!r} at {where}") from None
    if not math.isfinite(price):
        raise DataError(f"unparseable price {text!r} at {where}")
    if price < 0:
        raise DataError(f"negative price {text!r} at {where}")
    return price


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_csv(raw: bytes | str) -> PriceTrace:
    """Parse `timestamp,price` CSV into a trace, in file order.

    Validation is a separate step (see validate); this only enforces that
    each row parses.
    """
    text = _decode(raw).lstrip("﻿")
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or [cell.strip() for cell in header] != ["timestamp", "price"]:
        raise DataError(
            f"malformed header at line 1: expected 'timestamp,price', got {header!r}"
        )
    points: list[PricePoint] = []
    for line_no, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(
                f"expected 2 columns at line {line_no}, got {len(row)}"
            )
        where = f"line {line_no}"
        ts = _parse_timestamp(row[0], where)
        price = _parse_price(row[1], where)
        points.append(PricePoint(timestamp=ts, price=price))
    if not points:
        raise DataError("empty body: no data rows after the header")
    return PriceTrace(points=tuple(points))


def to_csv(trace: PriceTrace) -> str:
    """Serialize a trace to the canonical CSV form.

    Prices are written with repr so that parse(to_csv(trace)) recovers the
    exact same doubles.
    """
    lines = ["timestamp,price"]
    for pt in trace.points:
        lines.append(f"{format_timestamp(pt.timestamp)},{pt.price!r}")
    return "\n".join(lines) + "\n"


def _common_label(values: list[str]) -> str:
    unique = set(values)
    return values[0] if len(unique) == 1 else ""


def parse_aws_json(
    raw: bytes | str, trace_filter: TraceFilter = TraceFilter()
) -> PriceTrace:
    """Parse a spot-price-history JSON export, filter, and sort by time.

    Accepts either a top-level array of records or an object with a
    `SpotPriceHistory` array.  Records matching every present filter field
    are kept and sorted by timestamp ascending, ties preserving input order.
    """
    text = _decode(raw)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc}") from None
    if isinstance(doc, dict):
        records = doc.get("SpotPriceHistory")
        if records is None:
            raise DataError("JSON object lacks a 'SpotPriceHistory' array")
    else:
        records = doc
    if not isinstance(records, list):
        raise DataError("expected an array of spot-price records")

    kept: list[tuple[datetime, float, str, str, str]] = []
    for idx, rec in enumerate(records):
        where = f"record {idx}"
        if not isinstance(rec, dict):
            raise DataError(f"{where} is not an object")
        for field in _AWS_FIELDS:
            if field not in rec:
                raise DataError(f"{where} missing required field {field!r}")
        spot = rec["SpotPrice"]
        if not isinstance(spot, str):
            raise DataError(f"{where}: SpotPrice must be quoted decimal text")
        ts = _parse_timestamp(str(rec["Timestamp"]), where)
        price = _parse_price(spot, where)
        instance_type = str(rec["InstanceType"])
        product = str(rec["ProductDescription"])
        zone = str(rec["AvailabilityZone"])
        if trace_filter.instance_type is not None and instance_type != trace_filter.instance_type:
            continue
        if trace_filter.product is not None and product != trace_filter.product:
            continue
        if trace_filter.zone is not None and zone != trace_filter.zone:
            continue
        if trace_filter.time_range is not None:
            start, end = trace_filter.time_range
            if not start <= ts <= end:
                continue
        kept.append((ts, price, instance_type, product, zone))
    if not kept:
        raise DataError("zero records after filtering")

    kept.sort(key=lambda item: item[0])  # stable: ties keep input order
    points = tuple(PricePoint(timestamp=ts, price=price) for ts, price, *_ in kept)
    return PriceTrace(
        points=points,
        instance_type=trace_filter.instance_type
        or _common_label([item[2] for item in kept]),
        product=trace_filter.product or _common_label([item[3] for item in kept]),
        zone=trace_filter.zone or _common_label([item[4] for item in kept]),
    )


def validate(trace: PriceTrace) -> PriceTrace:
    """Check trace invariants: nonempty, increasing timestamps, positive prices."""
    if not trace.points:
        raise DataError("empty trace")
    for idx, pt in enumerate(trace.points):
        if not (math.isfinite(pt.price) and pt.price > 0):
            raise DataError(f"nonpositive price {pt.price} at index {idx}")
    for idx in range(1, len(trace.points)):
        prev = trace.points[idx - 1].timestamp
        curr = trace.points[idx].timestamp
        if curr <= prev:
            raise DataError(
                f"non-increasing timestamps at indices {idx - 1} and {idx}: "
                f"{format_timestamp(prev)} then {format_timestamp(curr)}"
            )
    return trace


def synth_step_hold(config: SynthConfig) -> PriceTrace:
    """Generate a deterministic step-hold price path.

    The generator is pinned for golden-file stability: a Mersenne Twister
    seeded with config.seed, one uniform draw in [floor, ceiling] for the
    starting level, then per segment a geometric hold length via the
    inverse-CDF transform 1 + floor(log(1-U) / log(1 - 1/hold_steps_mean))
    (a single step when the mean is 1) and a uniform jump in
    [-step_scale, +step_scale] clamped into the band.  Timestamps advance
    one minute per point from a fixed epoch.
    """
    band = config.band
    rng = random.Random(config.seed)
    level = rng.uniform(band.floor, band.ceiling)
    prices: list[float] = []
    while len(prices) < config.n_points:
        if config.hold_steps_mean <= 1:
            hold = 1
        else:
            hold = 1 + int(
                math.log(1.0 - rng.random())
                / math.log(1.0 - 1.0 / config.hold_steps_mean)
            )
        for _ in range(min(hold, config.n_points - len(prices))):
            prices.append(level)
        jump = rng.uniform(-config.step_scale, config.step_scale)
        level = band.clamp(level + jump)
    points = tuple(
        PricePoint(timestamp=SYNTH_EPOCH + timedelta(minutes=i), price=price)
        for i, price in enumerate(prices)
    )
    return PriceTrace(points=points, instance_type="synthetic")

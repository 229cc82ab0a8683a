"""Shared fixtures and trace-building helpers."""
from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

import spotbid as sb

FIXTURES = Path(__file__).parent / "fixtures"

EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


def make_trace(prices, start=EPOCH, spacing_minutes=1, **meta) -> sb.PriceTrace:
    """Trace with the given prices at minute-spaced timestamps."""
    points = tuple(
        sb.PricePoint(
            timestamp=start + timedelta(minutes=i * spacing_minutes), price=price
        )
        for i, price in enumerate(prices)
    )
    return sb.PriceTrace(points=points, **meta)


def make_series(bids, name="test", kind=sb.StrategyKind.ONDEMAND) -> sb.BidSeries:
    """Bid series wrapping raw bid values with a placeholder spec."""
    return sb.BidSeries(
        strategy_name=name, bids=tuple(bids), spec=sb.StrategySpec(kind=kind)
    )


@pytest.fixture
def band() -> sb.PriceBand:
    return sb.PriceBand(floor=0.256, ceiling=2.600)


@pytest.fixture
def stephold_trace() -> sb.PriceTrace:
    return sb.validate(sb.parse_csv((FIXTURES / "stephold_1001.csv").read_bytes()))


@pytest.fixture
def const_trace() -> sb.PriceTrace:
    return sb.validate(sb.parse_csv((FIXTURES / "const_price_10pt.csv").read_bytes()))

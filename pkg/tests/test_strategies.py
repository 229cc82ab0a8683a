"""Strategy catalogue: per-kind bid rules, adjustments, replay contract."""
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import spotbid as sb
from conftest import make_trace

GAINS = sb.PiGains(kp=-10.0, ki=-10.0)

# Bid sequence of the feedback strategy on ten constant 1.000 prices with
# gains (-10, -10), initial bid 1.300, zero deltas; locked from a
# straight-line evaluation of the loop (error, accumulate, control, band).
CONST_TRACE_GOLDEN_BIDS = (
    1.3,
    0.3792204625311779,
    2.521053086278526,
    0.28340511929227624,
    2.297419138882966,
    0.28022777358206,
    0.468509341104939,
    1.440352630905849,
    0.3088075784095044,
    2.422420790452276,
    0.279876525369664,
)


def spec_for(kind, mode=None, pre=0.0, post=0.0, initial=None):
    return sb.StrategySpec(
        kind=kind,
        gains=GAINS if kind is sb.StrategyKind.FEEDBACK else None,
        adjustments=sb.Adjustments(pre_delta=pre, post_delta=post),
        initial_bid=initial,
        stat_mode=mode,
    )


def test_initial_bid_default(band):
    assert sb.initial_bid_default(band) == 1.300
    assert sb.initial_bid_default(sb.PriceBand(0.5, 1.0)) == 0.5


def test_default_initial_bid_below_floor_rejected():
    narrow = sb.PriceBand(0.6, 1.0)
    assert sb.initial_bid_default(narrow) == 0.5  # the rule still says half ceiling
    with pytest.raises(sb.UsageError, match="outside band"):
        sb.validate_spec(spec_for(sb.StrategyKind.ONDEMAND), narrow)
    # an explicit in-band choice passes
    sb.validate_spec(spec_for(sb.StrategyKind.ONDEMAND, initial=0.7), narrow)


def test_spec_structural_invariants():
    with pytest.raises(ValueError, match="requires gains"):
        sb.StrategySpec(kind=sb.StrategyKind.FEEDBACK)
    with pytest.raises(ValueError, match="no gains"):
        sb.StrategySpec(kind=sb.StrategyKind.CURRENT, gains=GAINS)
    with pytest.raises(ValueError, match="no stat_mode"):
        sb.StrategySpec(kind=sb.StrategyKind.ONDEMAND, stat_mode=sb.StatMode.CAUSAL)
    # stat kinds default to causal
    assert sb.StrategySpec(kind=sb.StrategyKind.MEAN).stat_mode is sb.StatMode.CAUSAL


def test_gain_sign_policy(band):
    fb = spec_for(sb.StrategyKind.FEEDBACK)
    sb.validate_spec(fb, band)
    positive = sb.StrategySpec(kind=sb.StrategyKind.FEEDBACK, gains=sb.PiGains(10.0, 10.0))
    with pytest.raises(sb.UsageError, match="negative"):
        sb.validate_spec(positive, band)
    sb.validate_spec(positive, band, require_negative_gains=False)


def test_feedback_single_step_derived_example(band):
    state = sb.StrategyState(controller=sb.ControllerState(), prev_bid=1.300)
    bid, state2 = sb.next_bid(spec_for(sb.StrategyKind.FEEDBACK), state, 1.000, band)
    # e = -0.300, e_sum = -0.300, u = 6.0, bid = a + (b-a) * arccot(6) / pi
    error = 1.000 - 1.300
    u = -10.0 * error + -10.0 * error
    expected = 0.256 + (2.600 - 0.256) * ((math.pi / 2 - math.atan(u)) / math.pi)
    assert bid == expected
    assert abs(bid - 0.379) < 5e-4
    assert state2.controller.error_sum == error
    assert state2.prev_bid == bid


def test_feedback_constant_trace_golden(band):
    trace = make_trace([1.000] * 10)
    series = sb.run_strategy(spec_for(sb.StrategyKind.FEEDBACK, initial=1.3), trace, band)
    assert len(series.bids) == 11
    for got, want in zip(series.bids, CONST_TRACE_GOLDEN_BIDS):
        assert abs(got - want) <= 1e-12


def test_current_follows_previous_price(band):
    series = sb.run_strategy(
        spec_for(sb.StrategyKind.CURRENT, initial=1.3), make_trace([1.0, 2.0]), band
    )
    assert series.bids == (1.3, 1.0, 2.0)


def test_causal_minimum_running(band):
    series = sb.run_strategy(
        spec_for(sb.StrategyKind.MINIMUM, mode=sb.StatMode.CAUSAL, initial=1.3),
        make_trace([1.0, 0.8, 0.9]),
        band,
    )
    assert series.bids == (1.3, 1.0, 0.8, 0.8)


def test_causal_mean_running(band):
    series = sb.run_strategy(
        spec_for(sb.StrategyKind.MEAN, initial=1.3), make_trace([1.0, 2.0, 1.5]), band
    )
    assert series.bids == (1.3, 1.0, 1.5, 1.5)


def test_ondemand_constant_ceiling(band):
    series = sb.run_strategy(
        spec_for(sb.StrategyKind.ONDEMAND, initial=1.3), make_trace([1.0, 2.0, 1.5]), band
    )
    assert series.bids == (2.6, 2.6, 2.6, 2.6)


def test_fulltrace_stats_constant_from_first_bid(band):
    trace = make_trace([1.0, 2.0, 1.5])
    for kind, value in (
        (sb.StrategyKind.MINIMUM, 1.0),
        (sb.StrategyKind.MEAN, 4.5 / 3),
        (sb.StrategyKind.HIGH, 2.0),
    ):
        series = sb.run_strategy(
            spec_for(kind, mode=sb.StatMode.FULL_TRACE, initial=1.3), trace, band
        )
        assert series.bids == (value,) * 4


def test_one_point_trace_yields_two_bids(band):
    for kind in sb.StrategyKind:
        series = sb.run_strategy(spec_for(kind), make_trace([1.0]), band)
        assert len(series.bids) == 2
        assert series.scored_bids() == series.bids[:1]


def test_post_delta_applies_and_clamps(band):
    trace = make_trace([1.0, 2.0])
    current = sb.run_strategy(
        spec_for(sb.StrategyKind.CURRENT, post=0.02, initial=1.3), trace, band
    )
    assert current.bids == (1.3, 1.02, 2.02)
    clamped_up = sb.run_strategy(
        spec_for(sb.StrategyKind.HIGH, mode=sb.StatMode.FULL_TRACE, post=5.0, initial=1.3),
        trace,
        band,
    )
    assert clamped_up.bids == (2.6, 2.6, 2.6)
    clamped_down = sb.run_strategy(
        spec_for(sb.StrategyKind.MINIMUM, mode=sb.StatMode.FULL_TRACE, post=-5.0, initial=1.3),
        trace,
        band,
    )
    assert clamped_down.bids == (0.256, 0.256, 0.256)


def test_ondemand_ignores_post_delta(band):
    series = sb.run_strategy(
        spec_for(sb.StrategyKind.ONDEMAND, post=-1.0, initial=1.3), make_trace([1.0]), band
    )
    assert series.bids == (2.6, 2.6)


def test_pre_delta_only_feeds_the_controller(band):
    trace = make_trace([1.0, 2.0, 1.5])
    plain = sb.run_strategy(spec_for(sb.StrategyKind.MINIMUM, initial=1.3), trace, band)
    shifted = sb.run_strategy(
        spec_for(sb.StrategyKind.MINIMUM, pre=0.02, initial=1.3), trace, band
    )
    assert plain.bids == shifted.bids
    fb_plain = sb.run_strategy(spec_for(sb.StrategyKind.FEEDBACK, initial=1.3), trace, band)
    fb_shift = sb.run_strategy(
        spec_for(sb.StrategyKind.FEEDBACK, pre=0.02, initial=1.3), trace, band
    )
    assert fb_plain.bids != fb_shift.bids


def test_corrective_direction_single_step(band):
    spec = spec_for(sb.StrategyKind.FEEDBACK)
    below = sb.StrategyState(controller=sb.ControllerState(), prev_bid=0.9)
    bid, _ = sb.next_bid(spec, below, 1.5, band)  # bid was below the price
    assert bid > band.midpoint
    above = sb.StrategyState(controller=sb.ControllerState(), prev_bid=2.0)
    bid, _ = sb.next_bid(spec, above, 1.5, band)  # bid was above the price
    assert bid < band.midpoint


@given(
    prices=st.lists(
        st.floats(min_value=0.26, max_value=2.59, allow_nan=False),
        min_size=1,
        max_size=40,
    ),
    kind=st.sampled_from(list(sb.StrategyKind)),
    mode=st.sampled_from([sb.StatMode.CAUSAL, sb.StatMode.FULL_TRACE]),
)
def test_band_safety_and_determinism(prices, kind, mode):
    band = sb.PriceBand(floor=0.256, ceiling=2.600)
    spec = spec_for(kind, mode=mode if kind in sb.STAT_KINDS else None)
    trace = make_trace(prices)
    series = sb.run_strategy(spec, trace, band)
    assert len(series.bids) == len(prices) + 1
    assert all(band.floor <= bid <= band.ceiling for bid in series.bids)
    assert series.bids == sb.run_strategy(spec, trace, band).bids


@given(
    prices=st.lists(
        st.floats(min_value=0.3, max_value=2.5, allow_nan=False), min_size=2, max_size=40
    )
)
def test_causal_stat_monotonicity(prices):
    band = sb.PriceBand(floor=0.256, ceiling=2.600)
    trace = make_trace(prices)
    low = sb.run_strategy(spec_for(sb.StrategyKind.MINIMUM), trace, band).bids[1:]
    assert all(a >= b for a, b in zip(low, low[1:]))
    high = sb.run_strategy(spec_for(sb.StrategyKind.HIGH), trace, band).bids[1:]
    assert all(a <= b for a, b in zip(high, high[1:]))


def test_feedback_error_outside_band_is_data_error():
    band = sb.PriceBand(floor=0.256, ceiling=2.600)
    trace = make_trace([5.0])  # price far above the ceiling
    with pytest.raises(sb.DataError, match="proportional band"):
        sb.run_strategy(spec_for(sb.StrategyKind.FEEDBACK, initial=1.3), trace, band)

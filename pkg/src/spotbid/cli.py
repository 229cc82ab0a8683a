"""Command-line entry point: ingest, backtest, sweep, synth.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
error.  The SPOTBID_LOG environment variable (error, warn, info, debug)
controls diagnostic verbosity on standard error.

Gains are accepted as positive magnitudes: `--kp 10` applies kp = -10,
because only negative gains steer bids toward the price.  The
--allow-positive-gains flag flips the applied sign to +magnitude for
exploring what non-corrective control does; such reports carry a warning.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .band_model import PriceBand
from .controller import PiGains
from .engine import (
    ENGINE_VERSION,
    BacktestReport,
    SweepConfig,
    SweepPoint,
    backtest,
    sweep,
)
from .errors import DataError, UsageError
from .strategies import (
    STAT_KINDS,
    Adjustments,
    StatMode,
    StrategyKind,
    StrategySpec,
)
from .trace import (
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

log = logging.getLogger("spotbid")

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

_ALL_STRATEGIES = ",".join(kind.value for kind in StrategyKind)


def _round6(value: float) -> float:
    return round(value, 6)


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


# ---------------------------------------------------------------- parsing


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--trace", metavar="PATH", help="timestamp,price CSV trace")
    source.add_argument(
        "--aws-json", metavar="PATH", help="spot-price-history JSON export"
    )
    parser.add_argument(
        "--instance-type", help="keep only records with this instance type"
    )
    parser.add_argument("--product", help="keep only records with this product/OS")
    parser.add_argument("--zone", help="keep only records with this availability zone")


def _add_band_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--floor", type=float, required=True, help="price floor (lowest spot price)"
    )
    parser.add_argument(
        "--ceiling", type=float, required=True, help="price ceiling (on-demand price)"
    )


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out", metavar="PATH", help="output path (default: standard output)"
    )
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spotbid",
        description="Deterministic backtesting of spot-price bidding strategies.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser(
        "ingest", help="parse, filter, validate, and normalize a price trace"
    )
    _add_input_flags(ingest)
    ingest.add_argument(
        "--out", metavar="PATH", help="output path (default: standard output)"
    )
    ingest.add_argument(
        "--format",
        choices=("csv", "json"),
        default="csv",
        help="normalized trace format",
    )
    ingest.set_defaults(handler=_cmd_ingest)

    bt = commands.add_parser(
        "backtest", help="replay strategies against a trace and score them"
    )
    _add_input_flags(bt)
    _add_band_flags(bt)
    bt.add_argument(
        "--strategies",
        default=_ALL_STRATEGIES,
        help=f"comma-separated strategy list (default: {_ALL_STRATEGIES})",
    )
    bt.add_argument(
        "--kp",
        type=_positive_float,
        default=10.0,
        help="proportional gain magnitude (applied negative; default 10)",
    )
    bt.add_argument(
        "--ki",
        type=_positive_float,
        default=10.0,
        help="integral gain magnitude (applied negative; default 10)",
    )
    bt.add_argument(
        "--pre-delta",
        type=float,
        default=0.0,
        help="shift each reference price before the controller sees it",
    )
    bt.add_argument(
        "--post-delta",
        type=float,
        default=0.0,
        help="shift each emitted bid (clamped into the band)",
    )
    bt.add_argument(
        "--mode",
        choices=("causal", "fulltrace"),
        default="causal",
        help="how minimum/mean/high read the price history",
    )
    bt.add_argument(
        "--initial-bid",
        type=float,
        help="first standing bid (default: half the ceiling)",
    )
    _add_output_flags(bt)
    bt.add_argument(
        "--plot-dir",
        metavar="PATH",
        help="also write per-strategy trajectory CSVs and comparison.csv here",
    )
    bt.add_argument(
        "--include-bids",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="include full bid arrays in the JSON report "
        "(default: on below 100000 points)",
    )
    bt.add_argument("--parallel", action="store_true", help="run strategies in parallel")
    bt.add_argument(
        "--allow-positive-gains",
        action="store_true",
        help="apply gains as +magnitude instead of -magnitude (adds a warning)",
    )
    bt.set_defaults(handler=_cmd_backtest)

    sw = commands.add_parser(
        "sweep", help="grid-sweep feedback gains/adjustments and mark the frontier"
    )
    _add_input_flags(sw)
    _add_band_flags(sw)
    sw.add_argument(
        "--kp",
        type=_float_list,
        default=(10.0,),
        help="comma-separated proportional gain magnitudes (applied negative)",
    )
    sw.add_argument(
        "--ki",
        type=_float_list,
        default=(10.0,),
        help="comma-separated integral gain magnitudes (applied negative)",
    )
    sw.add_argument(
        "--pre-delta",
        type=_float_list,
        default=(0.0,),
        help="comma-separated reference-price shifts",
    )
    sw.add_argument(
        "--post-delta",
        type=_float_list,
        default=(0.0,),
        help="comma-separated emitted-bid shifts",
    )
    sw.add_argument(
        "--initial-bid",
        type=float,
        help="first standing bid (default: half the ceiling)",
    )
    _add_output_flags(sw)
    sw.add_argument("--parallel", action="store_true", help="evaluate cells in parallel")
    sw.set_defaults(handler=_cmd_sweep)

    sy = commands.add_parser(
        "synth", help="generate a deterministic step-hold price trace"
    )
    _add_band_flags(sy)
    sy.add_argument(
        "--points", type=int, default=1000, help="number of trace points"
    )
    sy.add_argument(
        "--hold-mean",
        type=int,
        default=1,
        help="mean steps a price level holds before jumping",
    )
    sy.add_argument(
        "--step-scale",
        type=float,
        default=0.1,
        help="maximum jump magnitude between levels",
    )
    sy.add_argument("--seed", type=int, default=0, help="generator seed")
    sy.add_argument(
        "--out", metavar="PATH", help="output path (default: standard output)"
    )
    sy.set_defaults(handler=_cmd_synth)

    return parser


# ------------------------------------------------------------ serialization


def _spec_obj(spec: StrategySpec) -> dict[str, object]:
    return {
        "kind": spec.kind.value,
        "gains": (
            None
            if spec.gains is None
            else {"kp": spec.gains.kp, "ki": spec.gains.ki}
        ),
        "pre_delta": spec.adjustments.pre_delta,
        "post_delta": spec.adjustments.post_delta,
        "initial_bid": spec.initial_bid,
        "stat_mode": None if spec.stat_mode is None else spec.stat_mode.value,
    }


def _trace_obj(report: BacktestReport) -> dict[str, object]:
    meta = report.trace_meta
    return {
        "instance_type": meta.instance_type,
        "product": meta.product,
        "zone": meta.zone,
        "start": meta.start,
        "end": meta.end,
        "points": meta.n_points,
    }


def report_to_obj(report: BacktestReport, include_bids: bool) -> dict[str, object]:
    strategies = []
    for result in report.results:
        entry: dict[str, object] = {
            "name": result.name,
            "spec": _spec_obj(result.series.spec),
            "metrics": {
                "success_rate": _round6(result.metrics.success_rate),
                "distance": _round6(result.metrics.distance),
                "relative_rationality": _round6(
                    result.metrics.relative_rationality
                ),
            },
        }
        if include_bids:
            entry["bids"] = [_round6(bid) for bid in result.series.bids]
        strategies.append(entry)
    return {
        "trace": _trace_obj(report),
        "band": {"floor": report.band.floor, "ceiling": report.band.ceiling},
        "strategies": strategies,
        "relative_rationality_set": {
            name: _round6(rr) for name, rr in report.rationality_set()
        },
        "config_echo": report.config_echo,
        "warnings": list(report.warnings),
        "engine_version": report.engine_version,
    }


def render_report(report: BacktestReport, fmt: str, include_bids: bool) -> str:
    if fmt == "json":
        return json.dumps(report_to_obj(report, include_bids), indent=2) + "\n"
    lines = ["name,success_rate,distance,relative_rationality"]
    for result in report.results:
        m = result.metrics
        lines.append(
            f"{result.name},{m.success_rate:.6f},{m.distance:.6f},"
            f"{m.relative_rationality:.6f}"
        )
    return "\n".join(lines) + "\n"


def render_sweep(
    points: list[SweepPoint],
    band: PriceBand,
    config_echo: dict[str, object],
    fmt: str,
) -> str:
    if fmt == "json":
        obj = {
            "band": {"floor": band.floor, "ceiling": band.ceiling},
            "points": [
                {
                    "kp": p.kp,
                    "ki": p.ki,
                    "pre_delta": p.pre_delta,
                    "post_delta": p.post_delta,
                    "success_rate": _round6(p.success_rate),
                    "distance": _round6(p.distance),
                    "relative_rationality": _round6(p.relative_rationality),
                    "pareto_member": p.pareto_member,
                }
                for p in points
            ],
            "config_echo": config_echo,
            "engine_version": ENGINE_VERSION,
        }
        return json.dumps(obj, indent=2) + "\n"
    lines = [
        "kp,ki,pre_delta,post_delta,success_rate,distance,"
        "relative_rationality,pareto_member"
    ]
    for p in points:
        lines.append(
            f"{p.kp!r},{p.ki!r},{p.pre_delta!r},{p.post_delta!r},"
            f"{p.success_rate:.6f},{p.distance:.6f},"
            f"{p.relative_rationality:.6f},{str(p.pareto_member).lower()}"
        )
    return "\n".join(lines) + "\n"


def trace_to_json(trace: PriceTrace) -> str:
    obj = {
        "instance_type": trace.instance_type,
        "product": trace.product,
        "zone": trace.zone,
        "points": [
            {"timestamp": format_timestamp(pt.timestamp), "price": pt.price}
            for pt in trace.points
        ],
    }
    return json.dumps(obj, indent=2) + "\n"


def write_plot_data(report: BacktestReport, trace: PriceTrace, plot_dir: Path) -> None:
    """One trajectory CSV per strategy plus a comparison summary.

    Trajectory rows pair bid_i with price p_i for i = 1..t; the trailing
    recommendation bid is excluded.
    """
    plot_dir.mkdir(parents=True, exist_ok=True)
    for result in report.results:
        lines = ["index,timestamp,spot_price,bid"]
        for i, point in enumerate(trace.points, start=1):
            bid = result.series.bids[i - 1]
            lines.append(
                f"{i},{format_timestamp(point.timestamp)},"
                f"{point.price:.6f},{bid:.6f}"
            )
        _write_file(plot_dir / f"trajectory_{result.name}.csv", "\n".join(lines) + "\n")
    lines = ["name,success_rate,relative_rationality"]
    for result in report.results:
        m = result.metrics
        lines.append(
            f"{result.name},{m.success_rate:.6f},{m.relative_rationality:.6f}"
        )
    _write_file(plot_dir / "comparison.csv", "\n".join(lines) + "\n")


# ---------------------------------------------------------------- handlers


def _read_bytes(path_text: str) -> bytes:
    try:
        return Path(path_text).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path_text}: {exc}") from None


def _write_file(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def _write_output(path_text: str | None, text: str) -> None:
    if path_text is None or path_text == "-":
        sys.stdout.write(text)
    else:
        _write_file(Path(path_text), text)


def _load_trace(args: argparse.Namespace) -> PriceTrace:
    if args.trace is not None:
        log.info("parsing CSV trace %s", args.trace)
        trace = parse_csv(_read_bytes(args.trace))
    else:
        log.info("parsing spot-price-history JSON %s", args.aws_json)
        trace_filter = TraceFilter(
            instance_type=args.instance_type,
            product=args.product,
            zone=args.zone,
        )
        trace = parse_aws_json(_read_bytes(args.aws_json), trace_filter)
    return validate(trace)


def _band_from_args(args: argparse.Namespace) -> PriceBand:
    try:
        return PriceBand(floor=args.floor, ceiling=args.ceiling)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _input_echo(args: argparse.Namespace) -> dict[str, object]:
    echo: dict[str, object] = {
        "trace": args.trace,
        "aws_json": args.aws_json,
    }
    for key in ("instance_type", "product", "zone"):
        echo[key] = getattr(args, key)
    return echo


def _build_specs(args: argparse.Namespace, band: PriceBand) -> list[StrategySpec]:
    sign = 1.0 if args.allow_positive_gains else -1.0
    adjustments = Adjustments(pre_delta=args.pre_delta, post_delta=args.post_delta)
    specs = []
    for name in args.strategies.split(","):
        name = name.strip()
        try:
            kind = StrategyKind(name)
        except ValueError:
            raise UsageError(
                f"unknown strategy {name!r}; choose from {_ALL_STRATEGIES}"
            ) from None
        gains = (
            PiGains(kp=sign * args.kp, ki=sign * args.ki)
            if kind is StrategyKind.FEEDBACK
            else None
        )
        stat_mode = StatMode(args.mode) if kind in STAT_KINDS else None
        specs.append(
            StrategySpec(
                kind=kind,
                gains=gains,
                adjustments=adjustments,
                initial_bid=args.initial_bid,
                stat_mode=stat_mode,
            )
        )
    if not specs:
        raise UsageError("empty strategy list")
    return specs


def _cmd_ingest(args: argparse.Namespace) -> int:
    trace = _load_trace(args)
    log.info("ingested %d points", len(trace))
    text = to_csv(trace) if args.format == "csv" else trace_to_json(trace)
    _write_output(args.out, text)
    return 0


def _cmd_backtest(args: argparse.Namespace) -> int:
    band = _band_from_args(args)
    trace = _load_trace(args)
    specs = _build_specs(args, band)
    include_bids = (
        args.include_bids if args.include_bids is not None else len(trace) < 100_000
    )
    # Result-affecting options only: execution details like --parallel and
    # output routing are excluded so serial/parallel runs stay byte-identical.
    config_echo = _input_echo(args)
    config_echo.update(
        {
            "floor": args.floor,
            "ceiling": args.ceiling,
            "strategies": args.strategies,
            "kp": args.kp,
            "ki": args.ki,
            "pre_delta": args.pre_delta,
            "post_delta": args.post_delta,
            "mode": args.mode,
            "initial_bid": args.initial_bid,
            "include_bids": include_bids,
            "allow_positive_gains": args.allow_positive_gains,
        }
    )
    report = backtest(
        trace,
        specs,
        band,
        parallel=args.parallel,
        allow_positive_gains=args.allow_positive_gains,
        config_echo=config_echo,
    )
    _write_output(args.out, render_report(report, args.format, include_bids))
    if args.plot_dir is not None:
        write_plot_data(report, trace, Path(args.plot_dir))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    band = _band_from_args(args)
    trace = _load_trace(args)
    try:
        config = SweepConfig(
            band=band,
            kp_magnitudes=args.kp,
            ki_magnitudes=args.ki,
            pre_deltas=args.pre_delta,
            post_deltas=args.post_delta,
            initial_bid=args.initial_bid,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    points = sweep(trace, config, parallel=args.parallel)
    config_echo = _input_echo(args)
    config_echo.update(
        {
            "floor": args.floor,
            "ceiling": args.ceiling,
            "kp": list(args.kp),
            "ki": list(args.ki),
            "pre_delta": list(args.pre_delta),
            "post_delta": list(args.post_delta),
            "initial_bid": args.initial_bid,
        }
    )
    _write_output(args.out, render_sweep(points, band, config_echo, args.format))
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    band = _band_from_args(args)
    try:
        config = SynthConfig(
            band=band,
            n_points=args.points,
            hold_steps_mean=args.hold_mean,
            step_scale=args.step_scale,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_output(args.out, to_csv(synth_step_hold(config)))
    return 0


# -------------------------------------------------------------------- main


def _configure_logging() -> None:
    raw = os.environ.get("SPOTBID_LOG", "warn").strip().lower()
    level = _LOG_LEVELS.get(raw)
    logging.basicConfig(
        level=level if level is not None else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if raw and level is None:
        log.warning("unknown SPOTBID_LOG level %r; using warn", raw)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage problems; remap
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    _configure_logging()
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

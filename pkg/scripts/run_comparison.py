#!/usr/bin/env python3
"""Replay the six bidding strategies over one trace and write a report.

Defaults reproduce the committed step-hold fixture comparison; point
--trace at any CSV produced by `spotbid ingest` or `spotbid synth`.
"""
from __future__ import annotations

import argparse
from pathlib import Path

import spotbid as sb
from spotbid.cli import render_report, write_plot_data

REPO = Path(__file__).resolve().parent.parent
DEFAULT_TRACE = REPO / "tests" / "fixtures" / "stephold_1001.csv"


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trace", type=Path, default=DEFAULT_TRACE)
    parser.add_argument("--floor", type=float, default=0.256)
    parser.add_argument("--ceiling", type=float, default=2.600)
    parser.add_argument(
        "--kp", type=float, default=10.0, help="gain magnitude, applied negative"
    )
    parser.add_argument(
        "--ki", type=float, default=10.0, help="gain magnitude, applied negative"
    )
    parser.add_argument("--mode", choices=["causal", "fulltrace"], default="fulltrace")
    parser.add_argument(
        "--out-dir", type=Path, default=REPO / "results" / "comparison"
    )
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    band = sb.PriceBand(floor=args.floor, ceiling=args.ceiling)
    trace = sb.validate(sb.parse_csv(args.trace.read_bytes()))
    gains = sb.PiGains(kp=-args.kp, ki=-args.ki)
    mode = sb.StatMode(args.mode)
    specs = [
        sb.StrategySpec(kind=sb.StrategyKind.FEEDBACK, gains=gains),
        sb.StrategySpec(kind=sb.StrategyKind.MINIMUM, stat_mode=mode),
        sb.StrategySpec(kind=sb.StrategyKind.MEAN, stat_mode=mode),
        sb.StrategySpec(kind=sb.StrategyKind.HIGH, stat_mode=mode),
        sb.StrategySpec(kind=sb.StrategyKind.CURRENT),
        sb.StrategySpec(kind=sb.StrategyKind.ONDEMAND),
    ]
    echo = {
        "trace": str(args.trace),
        "floor": args.floor,
        "ceiling": args.ceiling,
        "kp": -args.kp,
        "ki": -args.ki,
        "mode": args.mode,
    }
    report = sb.backtest(trace, specs, band, config_echo=echo)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "report.json").write_text(render_report(report, "json", True))
    write_plot_data(report, trace, args.out_dir)

    rationality = dict(report.rationality_set())
    print(f"trace: {args.trace} ({len(trace)} points)")
    print(f"{'strategy':<10} {'success':>8} {'distance':>10} {'rationality':>12}")
    for result in report.results:
        print(
            f"{result.name:<10} {result.metrics.success_rate:>8.4f} "
            f"{result.metrics.distance:>10.3f} {rationality[result.name]:>12.4f}"
        )
    print(f"report and plot data written to {args.out_dir}")


if __name__ == "__main__":
    main()

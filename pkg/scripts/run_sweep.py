#!/usr/bin/env python3
"""Sweep feedback-controller gains over a trace and map the Pareto frontier.

Gain flags take comma-separated magnitudes; the corrective (negative) sign
is applied per cell.  Writes the full grid as JSON and prints the frontier.
"""
from __future__ import annotations

import argparse
from pathlib import Path

import spotbid as sb
from spotbid.cli import render_sweep

REPO = Path(__file__).resolve().parent.parent
DEFAULT_TRACE = REPO / "tests" / "fixtures" / "stephold_1001.csv"


def magnitudes(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trace", type=Path, default=DEFAULT_TRACE)
    parser.add_argument("--floor", type=float, default=0.256)
    parser.add_argument("--ceiling", type=float, default=2.600)
    parser.add_argument("--kp", type=magnitudes, default="0.5,1,2,5,10,20,50,100")
    parser.add_argument("--ki", type=magnitudes, default="0.5,1,2,5,10,20,50,100")
    parser.add_argument("--pre-delta", type=magnitudes, default="0.0")
    parser.add_argument("--post-delta", type=magnitudes, default="0.0")
    parser.add_argument("--parallel", action="store_true")
    parser.add_argument("--out-dir", type=Path, default=REPO / "results" / "sweep")
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    band = sb.PriceBand(floor=args.floor, ceiling=args.ceiling)
    trace = sb.validate(sb.parse_csv(args.trace.read_bytes()))
    config = sb.SweepConfig(
        band=band,
        kp_magnitudes=args.kp,
        ki_magnitudes=args.ki,
        pre_deltas=args.pre_delta,
        post_deltas=args.post_delta,
    )
    points = sb.sweep(trace, config, parallel=args.parallel)

    echo = {
        "trace": str(args.trace),
        "floor": args.floor,
        "ceiling": args.ceiling,
        "kp": sorted(-m for m in args.kp),
        "ki": sorted(-m for m in args.ki),
        "pre_delta": list(args.pre_delta),
        "post_delta": list(args.post_delta),
    }
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "sweep.json").write_text(
        render_sweep(points, band, echo, "json")
    )

    frontier = [p for p in points if p.pareto_member]
    print(f"trace: {args.trace} ({len(trace)} points)")
    print(f"{len(points)} grid cells, {len(frontier)} on the frontier:")
    print(
        f"{'kp':>8} {'ki':>8} {'success':>8} {'distance':>10} {'rationality':>12}"
    )
    for p in sorted(frontier, key=lambda p: -p.success_rate):
        print(
            f"{p.kp:>8.3g} {p.ki:>8.3g} {p.success_rate:>8.4f} "
            f"{p.distance:>10.3f} {p.relative_rationality:>12.4f}"
        )
    print(f"full grid written to {args.out_dir / 'sweep.json'}")


if __name__ == "__main__":
    main()

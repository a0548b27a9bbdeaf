"""Restore one gap in a synthetic mixture with every algorithm.

Prints SDR, iteration count and runtime per algorithm, and optionally the
CP iteration traces, e.g.

    python3 scripts/single_gap.py --gap-ms 20 --trace-dir traces/
"""
import argparse
import time
from pathlib import Path

import numpy as np

from gapfill.audio import ms_to_samples
from gapfill.config import ALGORITHMS
from gapfill.errors import InpaintError
from gapfill.metrics import format_db, sdr
from gapfill.pipeline import inpaint
from gapfill.problem import GapSpec, build_mask
from gapfill.synth import desk_suite_config, sinusoid_mixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gap-ms", type=float, default=20.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rate", type=int, default=16000)
    ap.add_argument("--trace-dir")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    x = sinusoid_mixture(rng, 16384, args.rate)
    n = ms_to_samples(args.gap_ms, args.rate)
    start = int(rng.integers(x.size // 4, 3 * x.size // 4 - n))
    mask = build_mask(GapSpec(((start, n),), x.size, args.rate))
    y = np.where(mask.reliable, x, 0.0)
    cfg = desk_suite_config()
    gap = slice(start, start + n)

    print(f"gap of {n} samples at {start}")
    for algo in ALGORITHMS:
        t0 = time.perf_counter()
        try:
            restored, res = inpaint(y, mask, algo, cfg)
        except InpaintError as exc:
            print(f"{algo:<12} failed: {exc}")
            continue
        dt = time.perf_counter() - t0
        its = f"{res.iterations:>5} it" if res else " " * 8
        print(f"{algo:<12}{format_db(round(sdr(x[gap], restored[gap]), 2)):>8} dB {its} {dt:6.2f}s")
        if res and args.trace_dir:
            Path(args.trace_dir).mkdir(parents=True, exist_ok=True)
            res.write_trace(Path(args.trace_dir) / f"{algo}.csv")


if __name__ == "__main__":
    main()

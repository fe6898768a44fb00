#!/usr/bin/env python3
"""Throughput comparison: compiled feature kernel vs the numpy fallback.

Usage: python3 benchmarks/bench_features.py [--frames N] [--width W] [--height H]

The kernel computes per-frame HSV channel means, the per-pixel hot loop of
the scan stage; everything downstream of it is O(frames), not O(pixels).
"""

import argparse
import time

import numpy as np

from clipforge import features


def bench(fn, frames, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(frames)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--frames", type=int, default=240)
    parser.add_argument("--width", type=int, default=256)
    parser.add_argument("--height", type=int, default=144)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    frames = rng.integers(0, 256, size=(args.frames, 3, args.height, args.width),
                          dtype=np.uint8)
    mpix = frames.shape[0] * frames.shape[2] * frames.shape[3] / 1e6

    rows = []
    if features.active_kernel() == "compiled":
        fast = bench(lambda f: features.channel_means(f, impl="compiled"), frames)
        rows.append(("compiled (Cython)", fast))
    else:
        print("compiled kernel not built; benchmarking fallback only")
        fast = None
    slow = bench(lambda f: features.channel_means(f, impl="python"), frames)
    rows.append(("python (numpy)", slow))

    print(f"\n{args.frames} frames @ {args.width}x{args.height} "
          f"({mpix:.1f} Mpixel per pass)\n")
    print(f"{'kernel':<20} {'seconds/pass':>14} {'Mpixel/s':>12}")
    for name, seconds in rows:
        print(f"{name:<20} {seconds:>14.4f} {mpix / seconds:>12.1f}")
    if fast is not None:
        print(f"\nspeedup: {slow / fast:.1f}x")
        a = features.channel_means(frames, impl="compiled")
        b = features.channel_means(frames, impl="python")
        print(f"max abs difference between kernels: {np.abs(a - b).max():.2e}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallbacks.

Runs each kernel on identical inputs, checks that the results agree bit for
bit, and reports wall-clock times. Usage:

    python3 benchmarks/bench_kernels.py [--events N] [--fips-bits N]
"""

import argparse
import time

import numpy as np

from qli._kernels import _pure

try:
    from qli._kernels import _core
except ImportError:
    _core = None


def time_call(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_toggle(n_events):
    rng = np.random.default_rng(12345)
    total_rate, sample_rate = 25e6, 1e6
    times = np.cumsum(rng.standard_exponential(n_events)) / total_rate
    levels = (rng.random(n_events) < 0.8151).astype(np.uint8)
    n_samples = int(times[-1] * sample_rate)

    def run(kernel):
        out = np.zeros(n_samples, dtype=np.uint8)
        count, carry = kernel.toggle_samples(
            times, levels, 0, 1, 1.0 / sample_rate, n_samples, out
        )
        return count, carry, out

    results = {"pure": time_call(lambda: run(_pure))}
    if _core is not None:
        results["compiled"] = time_call(lambda: run(_core))
        p, c = results["pure"][1], results["compiled"][1]
        assert p[0] == c[0] and p[1] == c[1] and np.array_equal(p[2], c[2])
    return results, f"{n_events:.1e} events -> {n_samples:.1e} samples"


def bench_fips(n_bits):
    rng = np.random.default_rng(999)
    bits = rng.integers(0, 2, n_bits).astype(np.uint8)
    n_blocks = n_bits // 20000

    def run(kernel):
        return [
            kernel.fips_block_stats(bits[i * 20000 : (i + 1) * 20000])
            for i in range(n_blocks)
        ]

    results = {"pure": time_call(lambda: run(_pure))}
    if _core is not None:
        results["compiled"] = time_call(lambda: run(_core))
        for a, b in zip(results["pure"][1], results["compiled"][1]):
            assert np.array_equal(a, b)
    return results, f"{n_blocks} blocks of 20000 bits"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--events", type=int, default=20_000_000)
    parser.add_argument("--fips-bits", type=int, default=20_000_000)
    args = parser.parse_args()

    if _core is None:
        print("compiled kernel not available; timing the fallback only\n")

    for name, (results, detail) in (
        ("toggle_samples", bench_toggle(args.events)),
        ("fips_block_stats", bench_fips(args.fips_bits)),
    ):
        print(f"{name}  ({detail})")
        pure_s = results["pure"][0]
        print(f"  pure      {pure_s * 1e3:9.1f} ms")
        if "compiled" in results:
            comp_s = results["compiled"][0]
            print(f"  compiled  {comp_s * 1e3:9.1f} ms   ({pure_s / comp_s:.1f}x)")
            print("  outputs identical across backends")
        print()


if __name__ == "__main__":
    main()

"""Fixed-threshold randomness scoring for stored bit sequences.

Two scorers are provided:

* the FIPS 140-2 battery (monobit, poker, runs, long run) applied to
  consecutive 20000-bit blocks, and
* a chi-square byte-frequency test over the whole input with 255 degrees of
  freedom and a two-sided pass band on the tail probability.

FIPS 140-2 threshold constants, as amended by Change Notice 2:

====================  =====================================================
monobit               9725 < ones < 10275
poker                 2.16 < X < 46.17, X = (16/5000) * sum(f_i^2) - 5000
                      over 5000 non-overlapping 4-bit segments, MSB-first
runs (per length,     1: 2315-2685, 2: 1114-1386, 3: 527-723,
0-runs and 1-runs)    4: 240-384, 5: 103-209, 6 or longer: 103-209
long run              fail when any run reaches 26
====================  =====================================================

The standard's continuous-RNG test monitors a live stream rather than a
stored sequence and is intentionally not implemented.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from . import _kernels, bitio
from .qrng import BitSequence

BLOCK_BITS = 20000

MONOBIT_BOUNDS = (9725, 10275)  # exclusive
POKER_BOUNDS = (2.16, 46.17)  # exclusive
RUNS_INTERVALS = (  # inclusive, index = run length (>= 6 shares the last)
    (2315, 2685),
    (1114, 1386),
    (527, 723),
    (240, 384),
    (103, 209),
    (103, 209),
)
LONG_RUN_LIMIT = 26

CHI2_P_BOUNDS = (0.001, 0.999)  # two-sided pass band for the byte test

FIPS_TESTS = ("monobit", "poker", "runs", "long_run")


@dataclass(frozen=True)
class TestResult:
    test: str
    block_index: int
    statistic: float
    passed: bool
    threshold: str
    p_value: float | None = None


@dataclass
class TestReport:
    """Per-block results plus aggregation helpers."""

    results: list

    def tests(self):
        seen = []
        for r in self.results:
            if r.test not in seen:
                seen.append(r.test)
        return seen

    def blocks_tested(self, test):
        return sum(1 for r in self.results if r.test == test)

    def blocks_failed(self, test):
        return sum(1 for r in self.results if r.test == test and not r.passed)

    def failure_rate(self, test):
        tested = self.blocks_tested(test)
        if tested == 0:
            raise ValueError(f"no blocks scored for test {test!r}")
        return self.blocks_failed(test) / tested

    @property
    def all_passed(self):
        return all(r.passed for r in self.results)

    def extend(self, other):
        self.results.extend(other.results)

    def write_csv(self, fh):
        fh.write("test,block_index,statistic,pass\n")
        for r in self.results:
            fh.write(f"{r.test},{r.block_index},{r.statistic!r},{int(r.passed)}\n")

    def format_table(self):
        lines = [f"{'test':<10} {'blocks':>7} {'failed':>7} {'fail %':>8}"]
        for test in self.tests():
            tested = self.blocks_tested(test)
            failed = self.blocks_failed(test)
            lines.append(
                f"{test:<10} {tested:>7} {failed:>7} {100.0 * failed / tested:>7.3f}%"
            )
        chisq = [r for r in self.results if r.test == "chi_square"]
        if chisq:
            r = chisq[0]
            lines.append(
                f"chi-square statistic {r.statistic:.2f}, tail p = {r.p_value:.4g}"
            )
        verdict = "PASS" if self.all_passed else "FAIL"
        lines.append(f"overall: {verdict}")
        return "\n".join(lines)


def _as_bits(bits):
    if isinstance(bits, BitSequence):
        bits = bits.bits
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit input must be one-dimensional")
    if arr.size and int(arr.max()) > 1:
        raise ValueError("bit values must be 0 or 1")
    return arr


def chi_square_bytes(data):
    """Chi-square statistic over 256 byte bins and its upper-tail probability
    (255 degrees of freedom). Needs at least 256 bytes to be meaningful."""
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    if raw.size < 256:
        raise ValueError(f"need at least 256 bytes, got {raw.size}")
    freq = np.bincount(raw, minlength=256)
    expected = raw.size / 256.0
    statistic = float(((freq - expected) ** 2 / expected).sum())
    p_value = float(gammaincc(255 / 2.0, statistic / 2.0))
    return statistic, p_value


def _fips_block_results(stats, block_index):
    ones = int(stats[0])
    monobit_pass = MONOBIT_BOUNDS[0] < ones < MONOBIT_BOUNDS[1]

    poker_x = 16.0 / 5000.0 * float(stats[1]) - 5000.0
    poker_pass = POKER_BOUNDS[0] < poker_x < POKER_BOUNDS[1]

    runs_out_of_range = 0
    for length_index, (low, high) in enumerate(RUNS_INTERVALS):
        for offset in (2, 8):  # 0-runs, 1-runs
            count = int(stats[offset + length_index])
            if not low <= count <= high:
                runs_out_of_range += 1

    longest = int(stats[14])

    return [
        TestResult(
            "monobit",
            block_index,
            float(ones),
            monobit_pass,
            f"{MONOBIT_BOUNDS[0]} < ones < {MONOBIT_BOUNDS[1]}",
        ),
        TestResult(
            "poker",
            block_index,
            poker_x,
            poker_pass,
            f"{POKER_BOUNDS[0]} < X < {POKER_BOUNDS[1]}",
        ),
        TestResult(
            "runs",
            block_index,
            float(runs_out_of_range),
            runs_out_of_range == 0,
            "all run-length counts within the FIPS 140-2 intervals",
        ),
        TestResult(
            "long_run",
            block_index,
            float(longest),
            longest < LONG_RUN_LIMIT,
            f"longest run < {LONG_RUN_LIMIT}",
        ),
    ]


def fips140_2(bits):
    """Score consecutive 20000-bit blocks with the FIPS 140-2 battery.

    A trailing partial block is ignored; fewer than 20000 bits is an error.
    """
    arr = _as_bits(bits)
    n_blocks = arr.size // BLOCK_BITS
    if n_blocks == 0:
        raise ValueError(
            f"need at least {BLOCK_BITS} bits for one block, got {arr.size}"
        )
    results = []
    for index in range(n_blocks):
        block = arr[index * BLOCK_BITS : (index + 1) * BLOCK_BITS]
        stats = _kernels.fips_block_stats(block)
        results.extend(_fips_block_results(stats, index))
    return TestReport(results=results)


def chi_square_report(bits):
    """Chi-square byte test of a bit sequence (packed MSB-first)."""
    arr = _as_bits(bits)
    statistic, p_value = chi_square_bytes(bitio.pack_bits(arr))
    passed = CHI2_P_BOUNDS[0] < p_value < CHI2_P_BOUNDS[1]
    return TestReport(
        results=[
            TestResult(
                "chi_square",
                0,
                statistic,
                passed,
                f"{CHI2_P_BOUNDS[0]} < tail p < {CHI2_P_BOUNDS[1]}",
                p_value=p_value,
            )
        ]
    )


def score_bits(bits, tests=("fips", "chisq")):
    report = TestReport(results=[])
    for test in tests:
        if test == "fips":
            report.extend(fips140_2(bits))
        elif test == "chisq":
            report.extend(chi_square_report(bits))
        else:
            raise ValueError(f"unknown test {test!r} (known: fips, chisq)")
    return report


def score_file(path, tests=("fips", "chisq"), fmt="auto"):
    """Score a stored bit sequence (raw packed or ascii01 format)."""
    bits = bitio.read_bits(path, fmt=fmt)
    return score_bits(bits, tests=tests)

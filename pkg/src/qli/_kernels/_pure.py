"""Pure-numpy implementations of the hot kernels.

These mirror qli._kernels._core (the compiled Cython module) operation for
operation. Both consume the same pre-generated arrays, so a given random
stream produces bit-identical results on either backend.
"""

import numpy as np


def toggle_samples(
    event_times, event_levels, carry_level, next_sample, sample_period, max_samples, out
):
    """Sample a set/reset latch driven by timestamped events.

    Emits bits for clock ticks k*sample_period, k = next_sample, ..., as long
    as the tick does not run past the last event in the block (later ticks
    need events from the next block) and at most max_samples bits. Each bit
    is the level written by the latest event at or before the tick;
    carry_level covers ticks before the block's first event.

    Returns (number of bits emitted, level after the whole block).
    """
    t_last = float(event_times[-1])
    k_hi = int(t_last / sample_period)
    # Land exactly on the predicate k*sample_period <= t_last despite the
    # division rounding; the compiled kernel tests the product form.
    while (k_hi + 1) * sample_period <= t_last:
        k_hi += 1
    while k_hi >= next_sample and k_hi * sample_period > t_last:
        k_hi -= 1
    n_emit = min(k_hi - next_sample + 1, int(max_samples))
    if n_emit <= 0:
        return 0, int(event_levels[-1])
    ticks = (next_sample + np.arange(n_emit, dtype=np.int64)).astype(np.float64)
    ticks *= sample_period
    idx = np.searchsorted(event_times, ticks, side="right") - 1
    out[:n_emit] = np.where(idx < 0, carry_level, event_levels[np.maximum(idx, 0)])
    return n_emit, int(event_levels[-1])


def fips_block_stats(bits):
    """Single-pass statistics of one bit block.

    Returns int64[15]: [ones, poker term sum(f_i^2) over 4-bit segments,
    counts of 0-runs of length 1..5 and >=6, same for 1-runs, longest run].
    """
    b = np.asarray(bits, dtype=np.uint8)
    n = b.size
    out = np.zeros(15, dtype=np.int64)
    out[0] = int(b.sum())

    n_segments = n // 4
    nibbles = b[: 4 * n_segments].reshape(n_segments, 4).astype(np.int64)
    values = nibbles @ np.array([8, 4, 2, 1], dtype=np.int64)
    freq = np.bincount(values, minlength=16)
    out[1] = int((freq * freq).sum())

    change = np.flatnonzero(b[1:] != b[:-1])
    starts = np.concatenate(([0], change + 1))
    lengths = np.diff(np.concatenate((starts, [n])))
    run_values = b[starts]
    capped = np.minimum(lengths, 6)
    out[2:8] = np.bincount(capped[run_values == 0], minlength=7)[1:7]
    out[8:14] = np.bincount(capped[run_values == 1], minlength=7)[1:7]
    out[14] = int(lengths.max())
    return out

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels; see _pure.py for the
reference semantics. Both backends consume identical input arrays and must
return identical results."""

import numpy as np

cimport numpy as cnp


def toggle_samples(
    double[::1] event_times,
    cnp.uint8_t[::1] event_levels,
    int carry_level,
    long long next_sample,
    double sample_period,
    long long max_samples,
    cnp.uint8_t[::1] out,
):
    cdef Py_ssize_t n = event_times.shape[0]
    cdef Py_ssize_t i = 0
    cdef long long k = next_sample
    cdef long long emitted = 0
    cdef int level = carry_level
    cdef double t
    cdef double t_last = event_times[n - 1]
    while emitted < max_samples:
        t = k * sample_period
        if t > t_last:
            break
        while i < n and event_times[i] <= t:
            level = event_levels[i]
            i += 1
        out[emitted] = <cnp.uint8_t> level
        emitted += 1
        k += 1
    return emitted, <int> event_levels[n - 1]


def fips_block_stats(cnp.uint8_t[::1] bits):
    cdef Py_ssize_t n = bits.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(15, dtype=np.int64)
    cdef long long freq[16]
    cdef long long ones = 0, sumsq = 0, longest = 0
    cdef Py_ssize_t i
    cdef int nibble = 0
    cdef int v
    cdef int current
    cdef long long run_len
    cdef Py_ssize_t n_segments = n // 4

    for i in range(16):
        freq[i] = 0
    for i in range(4 * n_segments):
        v = bits[i]
        nibble = (nibble << 1) | v
        if (i & 3) == 3:
            freq[nibble] += 1
            nibble = 0
    for i in range(16):
        sumsq += freq[i] * freq[i]

    if n > 0:
        current = bits[0]
        run_len = 1
        ones = current
        for i in range(1, n):
            v = bits[i]
            ones += v
            if v == current:
                run_len += 1
            else:
                if run_len > longest:
                    longest = run_len
                if run_len > 6:
                    run_len = 6
                out[2 + 6 * current + run_len - 1] += 1
                current = v
                run_len = 1
        if run_len > longest:
            longest = run_len
        if run_len > 6:
            run_len = 6
        out[2 + 6 * current + run_len - 1] += 1

    out[0] = ones
    out[1] = sumsq
    out[14] = longest
    return out

"""Event-driven simulator of a set/reset toggle random number generator.

The modeled device splits LED light onto two photomultipliers. A detection on
the "set" tube forces an electrical level high, a detection on the "reset"
tube forces it low; further detections on the same side change nothing. The
level is sampled at a fixed clock, one bit per tick. With detection rates far
above the clock the bits are close to fair; shining extra light on one tube
skews them.

The simulation is exact rather than per-sample approximate: the merged
detection process is generated with exponential inter-arrival times (in
fixed-size blocks for speed), each event is attributed to the set tube with
probability rate_set / (rate_set + rate_reset), and each clock tick reads the
level left by the latest event. Tick-to-tick correlation from slow detection
rates (no event between ticks repeats the bit) is therefore preserved.

Randomness comes from a seeded PCG64 generator, so this is a simulator of a
QRNG, not a QRNG: identical seed and configuration give identical bits. All
random draws happen in the driver, which is why the compiled and the pure
sampling kernels produce bit-identical sequences.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels

# Events generated per chunk. Part of the determinism contract: changing it
# would reorder the random draws and change the output for a given seed.
_EVENT_BLOCK = 1 << 16


class BiasTarget(enum.Enum):
    SET = "set"
    RESET = "reset"


@dataclass(frozen=True)
class ToggleQrngConfig:
    """Detection rates (counts/s) of the set/reset tubes, the sampling clock,
    and the seed that makes a run reproducible."""

    rate_set: float
    rate_reset: float
    seed: int
    sample_rate: float = 1e6
    initial_level: int = 0

    def __post_init__(self):
        if self.rate_set < 0 or self.rate_reset < 0:
            raise ValueError("detection rates must be non-negative")
        if self.rate_set == 0 and self.rate_reset == 0:
            raise ValueError("at least one detection rate must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        if self.initial_level not in (0, 1):
            raise ValueError("initial level must be 0 or 1")


@dataclass(frozen=True)
class InjectionBias:
    """Extra detection rate on one tube from injected light. Negative values
    model removing light (e.g. after a rigged calibration)."""

    extra_rate: float
    target: BiasTarget = BiasTarget.SET


@dataclass(frozen=True)
class BitSequence:
    """A generated bit sequence; bits is a uint8 array of 0/1 values."""

    bits: np.ndarray

    def __len__(self):
        return int(self.bits.size)

    @property
    def length(self):
        return len(self)


def effective_rates(config, bias=None):
    """Set/reset rates with an injection bias applied; rejects biases that
    would drive a rate negative."""
    r_set, r_reset = config.rate_set, config.rate_reset
    if bias is not None:
        if bias.target is BiasTarget.SET:
            r_set += bias.extra_rate
        else:
            r_reset += bias.extra_rate
        if r_set < 0 or r_reset < 0:
            raise ValueError(
                f"bias {bias.extra_rate:g} counts/s drives the "
                f"{bias.target.value} rate negative"
            )
    if r_set == 0 and r_reset == 0:
        raise ValueError("biased detection rates are both zero")
    return r_set, r_reset


def steady_state_p1(config, bias=None):
    """Probability that the latest detection before a sample was on the set
    tube — the expected ones fraction when detection rates dwarf the clock."""
    r_set, r_reset = effective_rates(config, bias)
    return r_set / (r_set + r_reset)


def simulate(config, n_bits, bias=None):
    """Generate n_bits sampled latch levels. Deterministic given the seed."""
    if n_bits <= 0:
        raise ValueError(f"n_bits must be positive, got {n_bits}")
    r_set, r_reset = effective_rates(config, bias)
    total_rate = r_set + r_reset
    p_set = r_set / total_rate
    sample_period = 1.0 / config.sample_rate

    rng = np.random.default_rng(config.seed)
    out = np.empty(n_bits, dtype=np.uint8)
    emitted = 0
    next_sample = 1  # first bit is sampled one full clock period in
    t_now = 0.0
    carry = int(config.initial_level)
    while emitted < n_bits:
        waits = rng.standard_exponential(_EVENT_BLOCK)
        uniforms = rng.random(_EVENT_BLOCK)
        times = t_now + np.cumsum(waits / total_rate)
        levels = (uniforms < p_set).astype(np.uint8)
        n_new, carry = _kernels.toggle_samples(
            times,
            levels,
            carry,
            next_sample,
            sample_period,
            n_bits - emitted,
            out[emitted:],
        )
        emitted += n_new
        next_sample += n_new
        t_now = float(times[-1])
    return BitSequence(bits=out)


def ones_ratio(seq):
    """Fraction of ones in a bit sequence."""
    bits = seq.bits if isinstance(seq, BitSequence) else np.asarray(seq)
    if bits.size == 0:
        raise ValueError("empty bit sequence")
    return float(bits.sum() / bits.size)

"""From raw injection measurements to attack budgets.

Measuring the injected photon number directly is impossible; what a gated
single-photon detector gives is a click rate. :func:`infer_mu_inj` inverts the
Poisson click statistics to recover the mean photon number per gate. The rest
of the module extrapolates that calibration point to attacker-grade pulse
energies (assuming photon number scales linearly with power) and converts
pulse parameters into average power, continuous-wave-equivalent power and the
end-to-end coupling attenuation of the injection path.
"""

import csv
import math
from dataclasses import dataclass

from .physics import DEFAULT_WAVELENGTH_M, photon_energy


class DetectorSaturatedError(ValueError):
    """Click probability per gate reached 1; the Poisson inversion diverges."""


@dataclass(frozen=True)
class GatedCounterReading:
    """Gated single-photon counter measurement.

    count_rate and dark_rate are in counts/s, gate_rate in gates/s,
    gate_width in seconds, efficiency dimensionless.
    """

    count_rate: float
    dark_rate: float
    gate_rate: float
    gate_width: float = 20e-9
    efficiency: float = 0.1

    def __post_init__(self):
        if not 0 <= self.dark_rate <= self.count_rate:
            raise ValueError(
                f"need 0 <= dark_rate <= count_rate, got {self.dark_rate} "
                f"and {self.count_rate}"
            )
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"efficiency must be in (0, 1], got {self.efficiency}")
        if self.gate_rate <= 0:
            raise ValueError(f"gate_rate must be positive, got {self.gate_rate}")
        if self.gate_width <= 0:
            raise ValueError(f"gate_width must be positive, got {self.gate_width}")


@dataclass(frozen=True)
class CouplingReference:
    """Measured calibration point tying illumination energy per time bin to
    the injected photon number per bin."""

    ref_energy_per_bin_j: float = 0.344e-9  # 17.2 mW over a 20 ns bin
    ref_mu_inj: float = 3.32e-3

    def __post_init__(self):
        if self.ref_energy_per_bin_j <= 0 or self.ref_mu_inj <= 0:
            raise ValueError("coupling reference values must be positive")


@dataclass(frozen=True)
class AttackLaser:
    """Pulsed attack laser: energy (J), duration (s) and repetition rate (Hz)."""

    pulse_energy_j: float
    pulse_duration_s: float
    repetition_rate_hz: float

    def __post_init__(self):
        if self.pulse_energy_j <= 0:
            raise ValueError("pulse energy must be positive")
        if self.pulse_duration_s <= 0:
            raise ValueError("pulse duration must be positive")
        if self.repetition_rate_hz <= 0:
            raise ValueError("repetition rate must be positive")
        duty = self.pulse_duration_s * self.repetition_rate_hz
        if duty > 1:
            raise ValueError(f"duty cycle {duty:g} exceeds 1")


@dataclass(frozen=True)
class FrameSchedule:
    """Timing of the data-pulse frames the attacker must hit."""

    frame_period_s: float = 1e-3
    pulses_per_frame: int = 1000
    pulse_width_s: float = 20e-9
    pulse_period_s: float = 200e-9

    def __post_init__(self):
        if min(self.frame_period_s, self.pulse_width_s, self.pulse_period_s) <= 0:
            raise ValueError("frame timing values must be positive")
        if self.pulses_per_frame <= 0:
            raise ValueError("pulses_per_frame must be positive")
        if self.pulses_per_frame * self.pulse_period_s > self.frame_period_s:
            raise ValueError("pulses do not fit in the frame period")
        if self.pulse_width_s > self.pulse_period_s:
            raise ValueError("pulse width exceeds pulse period")

    @property
    def pulses_per_second(self):
        """Average data-pulse rate across frames."""
        return self.pulses_per_frame / self.frame_period_s


def laser_for_frame(pulse_energy_j, schedule=FrameSchedule()):
    """Attack laser that puts one pulse into every data pulse of the frame."""
    return AttackLaser(
        pulse_energy_j=pulse_energy_j,
        pulse_duration_s=schedule.pulse_width_s,
        repetition_rate_hz=schedule.pulses_per_second,
    )


def infer_mu_inj(reading, window_s=None):
    """Mean injected photon number per gate from gated counter statistics.

    Inverts the Poisson click model: with click probability per gate
    p = (count_rate - dark_rate) / gate_rate, the mean photon number is
    -ln(1 - p) / efficiency.

    When the detection gate matches the modulation window the count needs no
    time normalization; pass ``window_s`` to rescale the result by
    window_s / gate_width when they differ.
    """
    p = (reading.count_rate - reading.dark_rate) / reading.gate_rate
    if p < 0:
        raise ValueError(f"negative excess click probability {p:g}")
    if p >= 1:
        raise DetectorSaturatedError(
            f"detector saturated: click probability per gate {p:g} >= 1"
        )
    mu = -math.log1p(-p) / reading.efficiency
    if window_s is not None:
        if window_s <= 0:
            raise ValueError(f"window must be positive, got {window_s}")
        mu *= window_s / reading.gate_width
    return mu


def infer_mu_inj_with_stderr(reading, integration_time_s=20.0, window_s=None):
    """Like :func:`infer_mu_inj`, plus a standard error from Poissonian
    counting statistics over the stated integration time.

    Both the total and the dark count are Poisson tallies over the
    integration window; their rate variances add, and the error propagates
    through the inversion with d(mu)/dp = 1 / (efficiency * (1 - p)).
    """
    if integration_time_s <= 0:
        raise ValueError("integration time must be positive")
    mu = infer_mu_inj(reading, window_s=window_s)
    p = (reading.count_rate - reading.dark_rate) / reading.gate_rate
    rate_var = (reading.count_rate + reading.dark_rate) / integration_time_s
    sigma = math.sqrt(rate_var) / (reading.gate_rate * reading.efficiency * (1.0 - p))
    if window_s is not None:
        sigma *= window_s / reading.gate_width
    return mu, sigma


def extrapolate_mu_inj(energy_per_bin_j, ref=CouplingReference()):
    """Injected photon number per bin at a different illumination energy,
    assuming photon number scales linearly with laser power."""
    if energy_per_bin_j < 0:
        raise ValueError(f"energy must be non-negative, got {energy_per_bin_j}")
    return ref.ref_mu_inj * (energy_per_bin_j / ref.ref_energy_per_bin_j)


def average_attack_power(laser):
    """Average optical power of the pulsed attack, in watts."""
    return laser.pulse_energy_j * laser.repetition_rate_hz


def cw_equivalent_power(energy_per_bin_j, bin_s):
    """Continuous-wave power delivering the same energy within one bin."""
    if bin_s <= 0:
        raise ValueError(f"bin duration must be positive, got {bin_s}")
    return energy_per_bin_j / bin_s


def coupling_attenuation(
    input_power_w, mu_inj, bin_s, wavelength_m=DEFAULT_WAVELENGTH_M
):
    """End-to-end attenuation (dB) from illumination power to the optical
    power corresponding to the injected photons, before any losses in Alice."""
    if input_power_w <= 0:
        raise ValueError(f"input power must be positive, got {input_power_w}")
    if mu_inj <= 0:
        raise ValueError(f"injected photon number must be positive, got {mu_inj}")
    if bin_s <= 0:
        raise ValueError(f"bin duration must be positive, got {bin_s}")
    coupled_power = mu_inj * photon_energy(wavelength_m) / bin_s
    return 10.0 * math.log10(input_power_w / coupled_power)


# ---------------------------------------------------------------------------
# Counter-log ingestion (CSV columns: time_s, counts).

def read_counter_log(path):
    """Read a counter log: one row per tally interval, each row giving the
    interval's end time in seconds and the counts registered during it."""
    times, counts = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty counter log")
        if [c.strip().lower() for c in header[:2]] != ["time_s", "counts"]:
            raise ValueError(f"{path}: expected header 'time_s,counts', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                times.append(float(row[0]))
                counts.append(float(row[1]))
            except (ValueError, IndexError):
                raise ValueError(f"{path}:{lineno}: bad row {row}") from None
    if not times:
        raise ValueError(f"{path}: no data rows")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError(f"{path}: time_s column must be strictly increasing")
    if any(c < 0 for c in counts):
        raise ValueError(f"{path}: counts must be non-negative")
    return times, counts


def mean_count_rate(times, counts, start=None, end=None):
    """Average count rate (counts/s) over an integration window.

    Rows are attributed to the window by their end time: a row at time t
    belongs to (start, end] when start < t <= end. Without an explicit
    window the full log is used as (t0 - dt, tN] with dt the mean row
    spacing, so the first row's tally interval is included.
    """
    if len(times) != len(counts) or not times:
        raise ValueError("times and counts must be equal-length, non-empty")
    if start is None or end is None:
        if len(times) == 1:
            raise ValueError("cannot infer integration window from a single row")
        dt = (times[-1] - times[0]) / (len(times) - 1)
        start = times[0] - dt if start is None else start
        end = times[-1] if end is None else end
    if end <= start:
        raise ValueError(f"window end {end} must exceed start {start}")
    total = sum(c for t, c in zip(times, counts) if start < t <= end)
    return total / (end - start)

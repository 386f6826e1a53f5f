"""Alice-side loss budget of a plug-and-play QKD link.

In a plug-and-play system Bob sends strong pulses to Alice, who attenuates
them down to the protocol's target mean photon number and reflects them back.
This module models the optical path inside Alice — coupler, delay-line fiber
spool, phase modulator, variable optical attenuator (VOA), and a lossless
Faraday mirror — and answers two questions:

* what VOA setting produces the protocol's optimal outgoing photon number for
  a given channel transmission, and
* how many extra photons per pulse leak out to the channel when an attacker
  couples light into the fiber spool (the photons traverse the modulator
  twice, then the spool, VOA and coupler once on the way out).
"""

import enum
import math
from dataclasses import dataclass

from .physics import db_to_linear


class Protocol(enum.Enum):
    BB84 = "bb84"
    SARG04 = "sarg04"


class InfeasibleAttenuationError(ValueError):
    """The required VOA setting would be negative (target photon number
    unreachable: the fixed losses alone already attenuate too much)."""


@dataclass(frozen=True)
class AliceLossBudget:
    """One-way component losses inside Alice, in dB.

    The VOA is not part of the fixed budget; its setting is derived from the
    protocol and channel (see :func:`voa_attenuation`).
    """

    alpha_coup_db: float = 10.8
    alpha_pm_db: float = 4.2
    alpha_spool_db: float = 4.6

    def __post_init__(self):
        for name in ("alpha_coup_db", "alpha_pm_db", "alpha_spool_db"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def fixed_round_trip_db(self):
        """Round-trip loss through coupler, spool and modulator (VOA at 0 dB)."""
        return 2.0 * (self.alpha_coup_db + self.alpha_spool_db + self.alpha_pm_db)

    def round_trip_db(self, voa_db):
        """Total round-trip loss for a given VOA setting."""
        return self.fixed_round_trip_db + 2.0 * voa_db


@dataclass(frozen=True)
class SourceModel:
    """Mean photon number per strong pulse arriving from Bob."""

    mu_b: float = 5.69e5

    def __post_init__(self):
        if self.mu_b <= 0:
            raise ValueError("mu_b must be positive")


def _check_transmission(t):
    if not 0.0 < t <= 1.0:
        raise ValueError(f"channel transmission must be in (0, 1], got {t}")


def optimal_mu(protocol, t):
    """Protocol-optimal mean photon number leaving Alice.

    BB84 uses mu = t; SARG04 tolerates multi-photon pulses better and uses
    mu = 2*sqrt(t).
    """
    _check_transmission(t)
    if protocol is Protocol.BB84:
        return t
    return 2.0 * math.sqrt(t)


def required_alpha_a(protocol, t, source=SourceModel()):
    """Round-trip attenuation (dB) inside Alice that maps Bob's strong pulses
    to the protocol-optimal outgoing photon number."""
    _check_transmission(t)
    if protocol is Protocol.BB84:
        return 10.0 * math.log10(source.mu_b)
    return (
        10.0 * math.log10(source.mu_b)
        + 5.0 * math.log10(t)
        - 10.0 * math.log10(2.0)
    )


def voa_attenuation(protocol, t, source=SourceModel(), budget=AliceLossBudget()):
    """VOA setting (dB) realizing the required round-trip attenuation.

    Raises InfeasibleAttenuationError when the fixed component losses already
    exceed the target; clamping instead would silently change the outgoing
    photon number and corrupt every conclusion built on it.
    """
    alpha_a = required_alpha_a(protocol, t, source)
    voa_db = (alpha_a - budget.fixed_round_trip_db) / 2.0
    if voa_db < 0:
        raise InfeasibleAttenuationError(
            f"attenuation infeasible: required VOA setting {voa_db:.2f} dB < 0 "
            f"({protocol.value}, t={t:g})"
        )
    return voa_db


def probe_loss(protocol, t, budget=AliceLossBudget(), source=SourceModel()):
    """One-way loss (dB) seen by photons injected into the fiber spool before
    they reach the channel: modulator twice, then spool, VOA and coupler."""
    voa_db = voa_attenuation(protocol, t, source, budget)
    return (
        2.0 * budget.alpha_pm_db
        + budget.alpha_spool_db
        + voa_db
        + budget.alpha_coup_db
    )


def mu_ext(mu_inj, protocol, t, budget=AliceLossBudget(), source=SourceModel()):
    """Extra mean photon number per pulse leaving Alice for a mean injected
    photon number ``mu_inj`` per pulse inside the spool."""
    if mu_inj < 0:
        raise ValueError(f"injected photon number must be non-negative, got {mu_inj}")
    return mu_inj * db_to_linear(probe_loss(protocol, t, budget, source))


def select_protocol(channel_loss_db):
    """Protocol the system runs at a given channel loss: BB84 on short links
    (up to 3 dB), SARG04 beyond that up to the 20 dB hardware limit."""
    if channel_loss_db < 0:
        raise ValueError(f"channel loss must be non-negative, got {channel_loss_db}")
    if channel_loss_db <= 3.0:
        return Protocol.BB84
    if channel_loss_db <= 20.0:
        return Protocol.SARG04
    raise ValueError(
        f"channel loss {channel_loss_db:g} dB is out of operating range (max 20 dB)"
    )


# ---------------------------------------------------------------------------
# Hardware profile files (plain text, "key = value" per line, '#' comments).

PROFILE_KEYS = (
    "alpha_coup_db",
    "alpha_pm_db",
    "alpha_spool_db",
    "mu_b",
    "wavelength_nm",
    "fiber_atten_db_per_km",
)


@dataclass(frozen=True)
class HardwareProfile:
    budget: AliceLossBudget = AliceLossBudget()
    source: SourceModel = SourceModel()
    wavelength_m: float = 1550e-9
    fiber_atten_db_per_km: float = 0.2


def parse_profile(text, origin="<profile>"):
    """Parse a hardware profile. Unknown keys are errors, not warnings, so a
    typo cannot silently fall back to a default."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in PROFILE_KEYS:
            raise ValueError(
                f"{origin}:{lineno}: unknown profile key {key!r} "
                f"(known: {', '.join(PROFILE_KEYS)})"
            )
        if key in values:
            raise ValueError(f"{origin}:{lineno}: duplicate profile key {key!r}")
        try:
            values[key] = float(value.strip())
        except ValueError:
            raise ValueError(
                f"{origin}:{lineno}: invalid number {value.strip()!r} for {key!r}"
            ) from None

    budget = AliceLossBudget(
        alpha_coup_db=values.get("alpha_coup_db", 10.8),
        alpha_pm_db=values.get("alpha_pm_db", 4.2),
        alpha_spool_db=values.get("alpha_spool_db", 4.6),
    )
    source = SourceModel(mu_b=values.get("mu_b", 5.69e5))
    wavelength_nm = values.get("wavelength_nm", 1550.0)
    if wavelength_nm <= 0:
        raise ValueError(f"{origin}: wavelength_nm must be positive")
    atten = values.get("fiber_atten_db_per_km", 0.2)
    if atten < 0:
        raise ValueError(f"{origin}: fiber_atten_db_per_km must be non-negative")
    return HardwareProfile(
        budget=budget,
        source=source,
        wavelength_m=wavelength_nm * 1e-9,
        fiber_atten_db_per_km=atten,
    )


def load_profile(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_profile(fh.read(), origin=str(path))

"""Secret-key rates under light injection for BB84 and SARG04.

The attack does not add errors; it raises the mean photon number leaving
Alice from mu to mu' = mu + mu_ext without the legitimate parties noticing.
Key rates are therefore evaluated twice per operating point: once at the mu
Alice and Bob believe they have (``rate_estimated``) and once at mu'
(``rate_actual``). Where the actual rate drops to zero or below, the
generated key is insecure even though the system happily keeps running.

Rate formulas:

* SARG04 — incoherent-attack bound at perfect interference visibility,
  R = (eta/4) * (1 - I_storage) * (mu*t - mu^3/12), where I_storage is the
  information available to an attacker holding photons in quantum memory.
* BB84 — photon-number-splitting plus cloning bound,
  R = (1/2)(mu*t*eta + 2*p_d)(1 - H(Q)) - (1/2)mu*t*eta[(t - mu/2) I1(D1) + mu/2]
  with QBER Q = 1/2 - V / (2(1 + 2 p_d/(mu*t*eta))),
  D1 = (1 - V)/(2 - mu/t) and I1(D1) = 1 - H(1/2 + sqrt(D1(1 - D1))).

Rates may be negative; they are returned as-is so that security cutoffs are
detectable by sign. The BB84 bound is undefined once mu/t grows past the
single-photon regime it assumes (mu/t >= 2, or D1 > 1); sweep points whose
attacked photon number leaves that domain report ``rate_actual = -inf``,
which keeps the sign convention: no secure key there.
"""

import io
import math
from dataclasses import dataclass

from . import injection, link
from .link import Protocol
from .physics import channel_transmission

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def binary_entropy(x):
    """Binary entropy H(x) in bits, with H(0) = H(1) = 0 by continuity."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"probability out of range: {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def sarg_storage_info():
    """Bits of key information per pulse available to an attacker who stores
    photons in a quantum memory and measures after basis reconciliation."""
    return 1.0 - binary_entropy(0.5 + 0.5 * math.sqrt(0.5))


@dataclass(frozen=True)
class SargParams:
    """SARG04 rate parameters (interference visibility is fixed at 1)."""

    detector_efficiency: float = 0.1

    def __post_init__(self):
        if not 0 < self.detector_efficiency <= 1:
            raise ValueError("detector efficiency must be in (0, 1]")


@dataclass(frozen=True)
class Bb84Params:
    detector_efficiency: float = 0.1
    dark_count_prob: float = 5e-5
    visibility: float = 0.99

    def __post_init__(self):
        if not 0 < self.detector_efficiency <= 1:
            raise ValueError("detector efficiency must be in (0, 1]")
        if not 0 <= self.dark_count_prob < 1:
            raise ValueError("dark count probability must be in [0, 1)")
        if not 0 < self.visibility <= 1:
            raise ValueError("visibility must be in (0, 1]")


def sarg_rate(mu, t, params=SargParams()):
    """SARG04 secret-key rate in bits per pulse; negative means insecure."""
    if mu < 0:
        raise ValueError(f"mean photon number must be non-negative, got {mu}")
    if not 0 < t <= 1:
        raise ValueError(f"channel transmission must be in (0, 1], got {t}")
    eta = params.detector_efficiency
    return 0.25 * eta * (1.0 - sarg_storage_info()) * (mu * t - mu**3 / 12.0)


def bb84_qber(mu, t, params=Bb84Params()):
    """BB84 quantum bit error rate; tends to 1/2 when dark counts dominate."""
    if mu < 0:
        raise ValueError(f"mean photon number must be non-negative, got {mu}")
    if not 0 < t <= 1:
        raise ValueError(f"channel transmission must be in (0, 1], got {t}")
    gain = mu * t * params.detector_efficiency
    if gain == 0.0:
        return 0.5
    return 0.5 - params.visibility / (
        2.0 * (1.0 + 2.0 * params.dark_count_prob / gain)
    )


def bb84_rate(mu, t, params=Bb84Params(), single_photon_weight="channel"):
    """BB84 secret-key rate in bits per pulse; negative means insecure.

    ``single_photon_weight`` selects the prefactor of the cloning-information
    term: "channel" weights it by (t - mu/2), "unit" by (1 - mu/2). The
    latter exists for sensitivity analysis only.
    """
    if mu < 0:
        raise ValueError(f"mean photon number must be non-negative, got {mu}")
    if not 0 < t <= 1:
        raise ValueError(f"channel transmission must be in (0, 1], got {t}")
    ratio = mu / t
    if ratio >= 2.0:
        raise ValueError(
            f"rate bound undefined for mu/t >= 2 (got mu={mu:g}, t={t:g})"
        )
    disturbance = (1.0 - params.visibility) / (2.0 - ratio)
    if disturbance > 1.0:
        raise ValueError(
            f"rate bound undefined: single-photon disturbance {disturbance:g} > 1 "
            f"(mu={mu:g}, t={t:g})"
        )
    cloning_info = 1.0 - binary_entropy(
        0.5 + math.sqrt(disturbance * (1.0 - disturbance))
    )
    if single_photon_weight == "channel":
        weight = t - mu / 2.0
    elif single_photon_weight == "unit":
        weight = 1.0 - mu / 2.0
    else:
        raise ValueError(f"unknown single_photon_weight {single_photon_weight!r}")
    gain = mu * t * params.detector_efficiency
    q = bb84_qber(mu, t, params)
    return 0.5 * (gain + 2.0 * params.dark_count_prob) * (
        1.0 - binary_entropy(q)
    ) - 0.5 * gain * (weight * cloning_info + mu / 2.0)


def bb84_optimal_mu_numeric(t, params=Bb84Params(), xtol=1e-6):
    """Mean photon number maximizing the BB84 rate over (0, 2t).

    The rate is not unimodal in mu: next to the physical interior optimum the
    bound grows a second rising branch toward the mu/t upper edge, where its
    single-photon disturbance term saturates. A coarse scan over the whole
    interval brackets the global basin first; golden-section then refines it
    to xtol. Points where the bound is undefined count as -inf, and the
    mu = t heuristic is always among the evaluated candidates, so the result
    never scores below it.
    """
    if not 0 < t <= 1:
        raise ValueError(f"channel transmission must be in (0, 1], got {t}")

    best = [t, -math.inf]

    def rate(mu):
        try:
            value = bb84_rate(mu, t, params)
        except ValueError:
            return -math.inf
        if value > best[1]:
            best[0], best[1] = mu, value
        return value

    rate(t)
    lo = 2.0 * t * 1e-12
    hi = 2.0 * t * (1.0 - 1e-12)
    n_scan = 64
    scan = [lo + (hi - lo) * i / (n_scan - 1) for i in range(n_scan)]
    values = [rate(mu) for mu in scan]
    peak = max(range(n_scan), key=values.__getitem__)
    lo = scan[peak - 1] if peak > 0 else lo
    hi = scan[peak + 1] if peak < n_scan - 1 else hi

    a_pt = hi - _INV_PHI * (hi - lo)
    b_pt = lo + _INV_PHI * (hi - lo)
    f_a, f_b = rate(a_pt), rate(b_pt)
    while hi - lo > xtol:
        if f_a >= f_b:
            hi, b_pt, f_b = b_pt, a_pt, f_a
            a_pt = hi - _INV_PHI * (hi - lo)
            f_a = rate(a_pt)
        else:
            lo, a_pt, f_a = a_pt, b_pt, f_b
            b_pt = lo + _INV_PHI * (hi - lo)
            f_b = rate(b_pt)
    return best[0]


@dataclass(frozen=True)
class KeyRatePoint:
    """One operating point of a sweep: rates with and without the injected
    photons, in bits per pulse."""

    distance_km: float
    loss_db: float
    t: float
    protocol: Protocol
    pulse_energy_j: float
    mu: float
    mu_ext: float
    mu_prime: float
    rate_estimated: float
    rate_actual: float

    @property
    def secure(self):
        return self.rate_actual > 0.0


def rate_under_attack(
    protocol,
    distance_km,
    pulse_energy_j,
    *,
    atten_db_per_km=0.2,
    budget=link.AliceLossBudget(),
    source=link.SourceModel(),
    coupling=injection.CouplingReference(),
    sarg_params=SargParams(),
    bb84_params=Bb84Params(),
    numeric_mu=False,
):
    """Estimated and actual key rate at one distance and attack pulse energy.

    The estimated rate uses the photon number Alice believes she emits; the
    actual rate replaces it with mu + mu_ext from the injected light. With
    zero pulse energy the two are identical.
    """
    t = channel_transmission(distance_km, atten_db_per_km)
    if protocol is Protocol.BB84:
        mu = (
            bb84_optimal_mu_numeric(t, bb84_params)
            if numeric_mu
            else link.optimal_mu(protocol, t)
        )

        def rate(m):
            return bb84_rate(m, t, bb84_params)

    else:
        mu = link.optimal_mu(protocol, t)

        def rate(m):
            return sarg_rate(m, t, sarg_params)

    mu_inj = injection.extrapolate_mu_inj(pulse_energy_j, coupling)
    extra = link.mu_ext(mu_inj, protocol, t, budget, source)
    mu_prime = mu + extra
    rate_estimated = rate(mu)
    try:
        rate_actual = rate(mu_prime)
    except ValueError:
        # Attacked photon number left the validity domain of the BB84 bound:
        # no secure key can be claimed there.
        rate_actual = -math.inf
    return KeyRatePoint(
        distance_km=distance_km,
        loss_db=distance_km * atten_db_per_km,
        t=t,
        protocol=protocol,
        pulse_energy_j=pulse_energy_j,
        mu=mu,
        mu_ext=extra,
        mu_prime=mu_prime,
        rate_estimated=rate_estimated,
        rate_actual=rate_actual,
    )


def cutoff_distance(
    protocol,
    pulse_energy_j,
    *,
    atten_db_per_km=0.2,
    max_loss_db=20.0,
    tol_km=0.01,
    **model_kwargs,
):
    """Smallest distance at which the attacked rate is no longer positive.

    Bisects rate_actual over [0 km, max_loss_db / atten]; returns None when
    the rate stays positive over the whole range. The default range is the
    20 dB hardware operating limit; pass a larger ``max_loss_db`` to chase
    cutoffs beyond it.
    """
    if atten_db_per_km <= 0:
        raise ValueError("fiber attenuation must be positive")

    def attacked_rate(d):
        return rate_under_attack(
            protocol,
            d,
            pulse_energy_j,
            atten_db_per_km=atten_db_per_km,
            **model_kwargs,
        ).rate_actual

    d_max = max_loss_db / atten_db_per_km
    if attacked_rate(0.0) <= 0.0:
        return 0.0
    if attacked_rate(d_max) > 0.0:
        return None
    lo, hi = 0.0, d_max
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        if attacked_rate(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def sweep(protocol, distances_km, pulse_energies_j, **model_kwargs):
    """Evaluate rate_under_attack over a distance grid and a list of pulse
    energies; rows are ordered by (distance, energy)."""
    distances = list(distances_km)
    if any(b < a for a, b in zip(distances, distances[1:])):
        raise ValueError("distance grid must be non-decreasing")
    return [
        rate_under_attack(protocol, d, e, **model_kwargs)
        for d in distances
        for e in pulse_energies_j
    ]


# ---------------------------------------------------------------------------
# Sweep CSV serialization. Floats are written with repr() so that a parse /
# re-serialize cycle is the identity.

SWEEP_CSV_HEADER = (
    "distance_km,loss_db,t,protocol,pulse_energy_j,mu,mu_ext,mu_prime,"
    "rate_estimated,rate_actual,secure"
)


def write_sweep_csv(points, fh):
    fh.write(SWEEP_CSV_HEADER + "\n")
    for p in points:
        fh.write(
            ",".join(
                (
                    repr(p.distance_km),
                    repr(p.loss_db),
                    repr(p.t),
                    p.protocol.value,
                    repr(p.pulse_energy_j),
                    repr(p.mu),
                    repr(p.mu_ext),
                    repr(p.mu_prime),
                    repr(p.rate_estimated),
                    repr(p.rate_actual),
                    "1" if p.secure else "0",
                )
            )
            + "\n"
        )


def sweep_csv_text(points):
    buf = io.StringIO()
    write_sweep_csv(points, buf)
    return buf.getvalue()


def read_sweep_csv(fh):
    header = fh.readline().rstrip("\n")
    if header != SWEEP_CSV_HEADER:
        raise ValueError(f"unexpected sweep CSV header: {header!r}")
    points = []
    for lineno, line in enumerate(fh, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 11:
            raise ValueError(f"line {lineno}: expected 11 fields, got {len(fields)}")
        points.append(
            KeyRatePoint(
                distance_km=float(fields[0]),
                loss_db=float(fields[1]),
                t=float(fields[2]),
                protocol=Protocol(fields[3]),
                pulse_energy_j=float(fields[4]),
                mu=float(fields[5]),
                mu_ext=float(fields[6]),
                mu_prime=float(fields[7]),
                rate_estimated=float(fields[8]),
                rate_actual=float(fields[9]),
            )
        )
    return points

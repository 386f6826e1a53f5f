"""Physical constants and unit conversions used throughout the package.

All quantities are SI internally (meters, joules, seconds). Decibel helpers
follow the power-attenuation convention: ``a`` dB corresponds to a linear
power ratio of ``10**(-a/10)``, so positive values attenuate and negative
values amplify.
"""

import math

PLANCK_J_S = 6.62607015e-34
LIGHT_SPEED_M_S = 2.99792458e8

# Telecom C-band wavelength used for photon-count conversions unless the
# caller specifies otherwise.
DEFAULT_WAVELENGTH_M = 1550e-9


def photon_energy(wavelength_m=DEFAULT_WAVELENGTH_M):
    """Energy in joules of a single photon at the given wavelength."""
    if wavelength_m <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_m}")
    return PLANCK_J_S * LIGHT_SPEED_M_S / wavelength_m


def photons_from_energy(energy_j, wavelength_m=DEFAULT_WAVELENGTH_M):
    """Mean photon number carried by a pulse of the given total energy."""
    if energy_j < 0:
        raise ValueError(f"pulse energy must be non-negative, got {energy_j}")
    return energy_j / photon_energy(wavelength_m)


def db_to_linear(attenuation_db):
    """Linear power transmission of an attenuation given in dB."""
    return 10.0 ** (-attenuation_db / 10.0)


def linear_to_db(transmission):
    """Attenuation in dB of a linear power ratio."""
    if transmission <= 0:
        raise ValueError(f"transmission must be positive, got {transmission}")
    return -10.0 * math.log10(transmission)


def channel_transmission(length_km, atten_db_per_km):
    """Power transmission of a fiber span with a uniform loss coefficient."""
    if length_km < 0:
        raise ValueError(f"fiber length must be non-negative, got {length_km}")
    if atten_db_per_km < 0:
        raise ValueError(
            f"fiber attenuation must be non-negative, got {atten_db_per_km}"
        )
    return db_to_linear(length_km * atten_db_per_km)

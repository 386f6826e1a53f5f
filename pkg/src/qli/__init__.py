"""Feasibility modeling of light-injection attacks on quantum devices.

The package quantifies what an attacker gains by coupling light into the
unprotected optics of a plug-and-play QKD system or a toggle-type QRNG:
measured counter data become injected photon numbers, injected photon numbers
become corrected secret-key-rate curves and secure-distance cutoffs, and a
seeded simulator plus FIPS 140-2 / chi-square scoring reproduce the output
bias of an illuminated QRNG.
"""

from . import bitio, injection, keyrate, link, physics, qrng, randtests
from ._kernels import COMPILED_AVAILABLE, backend_name
from .link import Protocol

__version__ = "0.1.0"

__all__ = [
    "COMPILED_AVAILABLE",
    "Protocol",
    "backend_name",
    "bitio",
    "injection",
    "keyrate",
    "link",
    "physics",
    "qrng",
    "randtests",
]

"""Command-line front end.

Subcommands:

* ``keyrate`` — sweep secret-key rates over distance and attack pulse energy,
  emitting a CSV ready for gnuplot or a spreadsheet.
* ``attack-budget`` — power/energy bookkeeping for an attack laser: injected
  and leaked photon numbers, average and c.w.-equivalent power, coupling
  attenuation.
* ``mu-inj`` — infer the injected photon number per gate from a counter log.
* ``qrng`` — simulate the toggle generator and write a bit file.
* ``randtest`` — score a stored bit file with the FIPS 140-2 battery and the
  chi-square byte test.

Exit codes: 0 success, 1 domain or runtime error, 2 usage error.

Numeric arguments accept unit suffixes (nm, um, nJ, uJ, mW, W, kHz, MHz, dB,
km); bare numbers are taken as SI base units with a warning on stderr.
"""

import argparse
import dataclasses
import math
import os
import re
import sys

from . import bitio, injection, keyrate, link, qrng, randtests
from .link import Protocol

PROFILE_ENV_VAR = "QLI_PROFILE"

_UNIT_SCALES = {
    "length": {"nm": 1e-9, "um": 1e-6},
    "energy": {"nJ": 1e-9, "uJ": 1e-6},
    "power": {"mW": 1e-3, "W": 1.0},
    "rate": {"kHz": 1e3, "MHz": 1e6},
    "loss": {"dB": 1.0},
    "distance": {"km": 1.0},
}
_BASE_UNITS = {
    "length": "m",
    "energy": "J",
    "power": "W",
    "rate": "Hz",
    "loss": "dB",
    "distance": "km",
}

_QUANTITY_RE = re.compile(r"([-+]?[0-9.][0-9.eE+-]*)\s*([A-Za-z]*)")


def parse_quantity(text, kind, option):
    """Parse a number with an optional unit suffix into SI base units."""
    match = _QUANTITY_RE.fullmatch(text.strip())
    if not match:
        raise ValueError(f"{option}: cannot parse quantity {text!r}")
    number, suffix = match.group(1), match.group(2)
    try:
        value = float(number)
    except ValueError:
        raise ValueError(f"{option}: cannot parse number {number!r}") from None
    scales = _UNIT_SCALES[kind]
    if suffix:
        if suffix not in scales:
            raise ValueError(
                f"{option}: unit {suffix!r} not valid here "
                f"(expected one of {', '.join(scales)})"
            )
        return value * scales[suffix]
    if value != 0:
        print(
            f"warning: {option}: bare value {text.strip()!r} interpreted as "
            f"{_BASE_UNITS[kind]}",
            file=sys.stderr,
        )
    return value


def parse_distance_grid(text):
    """Parse 'A:B:STEP' (km) into an inclusive, monotone grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--dist-km: expected A:B:STEP, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"--dist-km: step must be positive, got {step:g}")
    if stop < start or start < 0:
        raise ValueError(f"--dist-km: need 0 <= A <= B, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def parse_window(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"--window: expected START:END, got {text!r}")
    return float(parts[0]), float(parts[1])


def _load_profile(args):
    path = args.profile or os.environ.get(PROFILE_ENV_VAR)
    if path:
        return link.load_profile(path)
    return link.HardwareProfile()


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _render_points(points):
    """Clamp negative rates to 0 for output; the secure column still carries
    the sign, so curves terminate at zero the way rate plots are drawn."""
    rendered = []
    for p in points:
        rendered.append(
            dataclasses.replace(
                p,
                rate_estimated=max(p.rate_estimated, 0.0),
                rate_actual=max(p.rate_actual, 0.0),
            )
        )
    return rendered


def cmd_keyrate(args):
    profile = _load_profile(args)
    protocol = Protocol(args.protocol)
    distances = parse_distance_grid(args.dist_km)
    energies = [
        parse_quantity(item, "energy", "--pulse-energy")
        for item in args.pulse_energy.split(",")
    ]
    atten = (
        args.atten_db_per_km
        if args.atten_db_per_km is not None
        else profile.fiber_atten_db_per_km
    )
    points = keyrate.sweep(
        protocol,
        distances,
        energies,
        atten_db_per_km=atten,
        budget=profile.budget,
        source=profile.source,
        sarg_params=keyrate.SargParams(detector_efficiency=args.eta),
        bb84_params=keyrate.Bb84Params(
            detector_efficiency=args.eta,
            dark_count_prob=args.pd,
            visibility=args.visibility,
        ),
        numeric_mu=args.numeric_mu,
    )
    fh, should_close = _open_output(args.output)
    try:
        keyrate.write_sweep_csv(_render_points(points), fh)
    finally:
        if should_close:
            fh.close()
    return 0


def cmd_attack_budget(args):
    profile = _load_profile(args)
    energy = parse_quantity(args.pulse_energy, "energy", "--pulse-energy")
    bin_s = args.bin_ns * 1e-9
    if args.rep_rate is not None:
        rep_rate = parse_quantity(args.rep_rate, "rate", "--rep-rate")
    else:
        rep_rate = injection.FrameSchedule().pulses_per_second
    laser = injection.AttackLaser(
        pulse_energy_j=energy,
        pulse_duration_s=bin_s,
        repetition_rate_hz=rep_rate,
    )

    ref = injection.CouplingReference()
    mu_inj = injection.extrapolate_mu_inj(energy, ref)
    attenuation = injection.coupling_attenuation(
        injection.cw_equivalent_power(ref.ref_energy_per_bin_j, bin_s),
        ref.ref_mu_inj,
        bin_s,
        profile.wavelength_m,
    )
    mu_ext_bb84 = link.mu_ext(
        mu_inj, Protocol.BB84, 1.0, profile.budget, profile.source
    )
    mu_ext_sarg = link.mu_ext(
        mu_inj, Protocol.SARG04, 1.0, profile.budget, profile.source
    )

    rows = [
        ("pulse energy", f"{energy:.4g} J"),
        ("time bin", f"{bin_s:.4g} s"),
        ("repetition rate", f"{rep_rate:.4g} Hz"),
        ("average power", f"{injection.average_attack_power(laser):.4g} W"),
        ("cw-equivalent power", f"{injection.cw_equivalent_power(energy, bin_s):.4g} W"),
        ("coupling attenuation", f"{attenuation:.2f} dB"),
        ("injected photons per bin", f"{mu_inj:.4g}"),
        ("extra photons out, BB84", f"{mu_ext_bb84:.4g} per pulse"),
        ("extra photons out, SARG04", f"{mu_ext_sarg:.4g} * t^-0.25 per pulse"),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    return 0


def cmd_mu_inj(args):
    times, counts = injection.read_counter_log(args.log)
    if args.window:
        start, end = parse_window(args.window)
    else:
        start = end = None
    count_rate = injection.mean_count_rate(times, counts, start=start, end=end)
    reading = injection.GatedCounterReading(
        count_rate=count_rate,
        dark_rate=args.dark_rate,
        gate_rate=parse_quantity(args.gate_rate, "rate", "--gate-rate"),
        gate_width=args.gate_width_ns * 1e-9,
        efficiency=args.efficiency,
    )
    duration = (end - start) if args.window else times[-1] - times[0]
    mu, sigma = injection.infer_mu_inj_with_stderr(
        reading, integration_time_s=duration
    )
    print(f"count rate          {count_rate:.4g} counts/s")
    print(f"dark rate           {reading.dark_rate:.4g} counts/s")
    print(f"injected photons    {mu:.4g} +- {sigma:.2g} per gate")
    return 0


def cmd_qrng(args):
    config = qrng.ToggleQrngConfig(
        rate_set=parse_quantity(args.rate_set, "rate", "--rate-set"),
        rate_reset=parse_quantity(args.rate_reset, "rate", "--rate-reset"),
        seed=args.seed,
        sample_rate=parse_quantity(args.sample_rate, "rate", "--sample-rate"),
    )
    bias = None
    inject = parse_quantity(args.inject_rate, "rate", "--inject-rate")
    if inject != 0:
        bias = qrng.InjectionBias(
            extra_rate=inject, target=qrng.BiasTarget(args.target)
        )
    seq = qrng.simulate(config, args.bits, bias)
    bitio.write_bits(args.output, seq.bits, fmt=args.format)
    print(
        f"wrote {len(seq)} bits to {args.output} "
        f"(ones ratio {qrng.ones_ratio(seq):.4f})"
    )
    return 0


def cmd_randtest(args):
    tests = tuple(t.strip() for t in args.tests.split(",") if t.strip())
    report = randtests.score_file(args.input, tests=tests, fmt=args.format)
    print(report.format_table())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            report.write_csv(fh)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qli",
        description=(
            "Feasibility modeling of light-injection attacks on plug-and-play "
            "QKD links and toggle QRNGs."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate", help="sweep secret-key rates to CSV")
    p.add_argument("--protocol", required=True, choices=["bb84", "sarg04"])
    p.add_argument("--dist-km", required=True, help="distance grid A:B:STEP in km")
    p.add_argument(
        "--pulse-energy",
        default="0",
        help="comma-separated attack pulse energies (suffixes nJ, uJ)",
    )
    p.add_argument("--atten-db-per-km", type=float, default=None)
    p.add_argument("--eta", type=float, default=0.1, help="detector efficiency")
    p.add_argument(
        "--pd", type=float, default=5e-5, help="dark count probability per gate"
    )
    p.add_argument("--visibility", type=float, default=0.99)
    p.add_argument(
        "--numeric-mu",
        action="store_true",
        help="use the numerically optimal BB84 photon number instead of mu = t",
    )
    p.add_argument("--profile", default=None, help="hardware profile file")
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("attack-budget", help="attack power/energy bookkeeping")
    p.add_argument("--pulse-energy", required=True)
    p.add_argument(
        "--rep-rate",
        default=None,
        help="pulse repetition rate (default: one pulse per frame data pulse)",
    )
    p.add_argument("--bin-ns", type=float, default=20.0, help="time bin in ns")
    p.add_argument("--profile", default=None)
    p.set_defaults(func=cmd_attack_budget)

    p = sub.add_parser("mu-inj", help="infer injected photons from a counter log")
    p.add_argument("--log", required=True, help="CSV with columns time_s,counts")
    p.add_argument("--window", default=None, help="integration window START:END (s)")
    p.add_argument("--dark-rate", type=float, required=True, help="counts/s")
    p.add_argument("--gate-rate", required=True, help="gates/s (suffixes kHz, MHz)")
    p.add_argument("--efficiency", type=float, default=0.1)
    p.add_argument("--gate-width-ns", type=float, default=20.0)
    p.set_defaults(func=cmd_mu_inj)

    p = sub.add_parser("qrng", help="simulate the toggle QRNG into a bit file")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rate-set", default="12.5MHz")
    p.add_argument("--rate-reset", default="12.5MHz")
    p.add_argument("--sample-rate", default="1MHz")
    p.add_argument(
        "--inject-rate",
        default="0",
        help="extra detection rate from injected light (may be negative)",
    )
    p.add_argument("--target", choices=["set", "reset"], default="set")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["raw", "ascii01"], default="raw")
    p.set_defaults(func=cmd_qrng)

    p = sub.add_parser("randtest", help="score a stored bit file")
    p.add_argument("--input", required=True)
    p.add_argument("--tests", default="fips,chisq")
    p.add_argument("--format", choices=["auto", "raw", "ascii01"], default="auto")
    p.add_argument("--csv", default=None, help="also write per-block results as CSV")
    p.set_defaults(func=cmd_randtest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

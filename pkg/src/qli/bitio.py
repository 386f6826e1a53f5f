"""Bit-sequence file formats.

Two on-disk formats are supported:

* ``raw`` — bits packed into bytes MSB-first; a final partial byte is padded
  with zero bits, so lengths that are not a multiple of 8 are not preserved.
* ``ascii01`` — one '0' or '1' character per bit, whitespace ignored.
"""

import numpy as np

_ASCII01_BYTES = np.frombuffer(b"01 \t\r\n", dtype=np.uint8)


def pack_bits(bits):
    """Pack an array of 0/1 values into bytes, MSB-first."""
    arr = np.asarray(bits, dtype=np.uint8)
    return np.packbits(arr).tobytes()


def unpack_bits(data):
    """Unpack MSB-first bytes into a uint8 array of 0/1 values."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_ascii(bits):
    arr = np.asarray(bits, dtype=np.uint8)
    return (arr + ord("0")).tobytes()


def ascii_to_bits(data):
    raw = np.frombuffer(data, dtype=np.uint8)
    keep = raw[(raw != ord(" ")) & (raw != ord("\t")) & (raw != 10) & (raw != 13)]
    bad = (keep != ord("0")) & (keep != ord("1"))
    if bad.any():
        offender = chr(int(keep[bad][0]))
        raise ValueError(f"invalid character {offender!r} in ascii01 bit data")
    return (keep == ord("1")).astype(np.uint8)


def detect_format(data):
    """Guess the format of bit-file contents: ascii01 if every byte is a
    '0'/'1' digit or whitespace, raw otherwise."""
    if not data:
        raise ValueError("empty bit file")
    raw = np.frombuffer(data, dtype=np.uint8)
    # cheap bail-out on the head before scanning a large file
    if not np.isin(raw[:4096], _ASCII01_BYTES).all():
        return "raw"
    return "ascii01" if np.isin(raw, _ASCII01_BYTES).all() else "raw"


def write_bits(path, bits, fmt="raw"):
    if fmt == "raw":
        payload = pack_bits(bits)
    elif fmt == "ascii01":
        payload = bits_to_ascii(bits)
    else:
        raise ValueError(f"unknown bit file format {fmt!r}")
    with open(path, "wb") as fh:
        fh.write(payload)


def read_bits(path, fmt="auto"):
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise ValueError(f"{path}: empty bit file")
    if fmt == "auto":
        fmt = detect_format(data)
    if fmt == "raw":
        return unpack_bits(data)
    if fmt == "ascii01":
        bits = ascii_to_bits(data)
        if bits.size == 0:
            raise ValueError(f"{path}: no bits in ascii01 file")
        return bits
    raise ValueError(f"unknown bit file format {fmt!r}")

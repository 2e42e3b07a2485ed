"""Fixed-width bitstring helpers.

Convention used throughout the package: bitstrings are ``str`` objects over
{'0','1'}, read big-endian (leftmost character is the most significant bit
and is consumed first by chained evaluations).
"""

from __future__ import annotations


def validate_bits(s: str, width: int | None = None) -> str:
    if not isinstance(s, str) or any(c not in "01" for c in s):
        raise ValueError(f"not a bitstring: {s!r}")
    if width is not None and len(s) != width:
        raise ValueError(f"expected {width} bits, got {len(s)}: {s!r}")
    return s


def int_to_bits(value: int, width: int) -> str:
    """Big-endian bitstring of exactly `width` characters."""
    if width < 0:
        raise ValueError("width must be nonnegative")
    if not 0 <= value < (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    if width == 0:
        return ""
    return format(value, f"0{width}b")


def bits_to_int(bits: str) -> int:
    validate_bits(bits)
    return int(bits, 2) if bits else 0


def all_bitstrings(width: int):
    """All bitstrings of a given width, in increasing integer order."""
    for v in range(1 << width):
        yield int_to_bits(v, width)

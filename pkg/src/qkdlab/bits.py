"""Bit strings as ``uint8`` arrays of 0/1, most significant bit first."""

from __future__ import annotations

from typing import Iterable

import numpy as np

BitString = np.ndarray


def as_bits(x: Iterable[int] | np.ndarray) -> BitString:
    b = np.asarray(x, dtype=np.uint8).reshape(-1)
    if b.size and b.max() > 1:
        raise ValueError("bit strings hold only 0 and 1")
    return b


def bits_to_int(bits: BitString) -> int:
    out = 0
    for b in as_bits(bits):
        out = (out << 1) | int(b)
    return out


def int_to_bits(value: int, length: int) -> BitString:
    if value < 0 or value >> length:
        raise ValueError(f"{value} does not fit in {length} bits")
    return np.array([(value >> (length - 1 - i)) & 1 for i in range(length)], dtype=np.uint8)


def bits_to_str(bits: BitString) -> str:
    return "".join(str(int(b)) for b in as_bits(bits))


def bits_from_str(text: str) -> BitString:
    return as_bits([int(c) for c in text.strip()])


def hamming_distance(a: BitString, b: BitString) -> int:
    a, b = as_bits(a), as_bits(b)
    if a.shape != b.shape:
        raise ValueError("bit strings differ in length")
    return int(np.count_nonzero(a != b))


def bits_to_hex(bits: BitString) -> str:
    """Hex digits of the bit string read as a big-endian integer, zero-padded to ceil(len/4)."""
    b = as_bits(bits)
    return format(bits_to_int(b), f"0{(len(b) + 3) // 4}x") if len(b) else ""


def bits_from_hex(text: str, length: int) -> BitString:
    return int_to_bits(int(text, 16) if text else 0, length)

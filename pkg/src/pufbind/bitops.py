"""Bit packing and seed derivation helpers.

Convention used everywhere in this package: bit 0 of a bit string is the
most significant bit of byte 0 (big-endian bit packing).
"""

from __future__ import annotations

import hashlib

import numpy as np


def pack_bits(bits) -> bytes:
    """Pack a 0/1 array into bytes, bit 0 -> MSB of byte 0.

    Trailing positions of the last byte are zero-padded.
    """
    arr = np.asarray(bits, dtype=np.uint8)
    return np.packbits(arr).tobytes()


def unpack_bits(data: bytes, n: int) -> np.ndarray:
    """Inverse of pack_bits; returns the first n bits as a uint8 array."""
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if n > arr.size:
        raise ValueError(f"need {n} bits, buffer holds {arr.size}")
    return arr[:n].copy()


def bits_to_int(bits) -> int:
    """Interpret a 0/1 array as a big-endian integer (bit 0 = MSB)."""
    out = 0
    for b in np.asarray(bits, dtype=np.uint8):
        out = (out << 1) | int(b)
    return out


def int_to_bits(x: int, n: int) -> np.ndarray:
    """n-bit big-endian expansion of x (bit 0 = MSB)."""
    if x < 0 or x >> n:
        raise ValueError(f"{x} does not fit in {n} bits")
    return np.array([(x >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def int_to_packed(x: int, n_bits: int) -> bytes:
    """Pack an n_bits-wide integer into bytes under the MSB-first convention."""
    n_bytes = (n_bits + 7) // 8
    return (x << (8 * n_bytes - n_bits)).to_bytes(n_bytes, "big")


def hamming(a, b) -> int:
    """Hamming distance between two 0/1 arrays of equal length."""
    x = np.asarray(a, dtype=np.uint8)
    y = np.asarray(b, dtype=np.uint8)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    return int(np.count_nonzero(x != y))


def derive_seed(*parts) -> int:
    """Stable 64-bit sub-seed from a tuple of ints/strings.

    Keeps independently consumed RNG streams (startup noise, key bytes,
    locker nonces) decoupled while everything stays reproducible from one
    user-facing seed.
    """
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "big")

"""Digital-locker fuzzy extractor over a noisy bit window.

Enrollment locks a secret byte string K once per mask, where a mask is a
window-sized bit string with exactly hd zeros.  Each locker stores

    nonce_i || H(nonce_i || (b AND M_i)) XOR (K || 0^check_len)

with H a counter-mode expansion of SHA-256.  A later reading b' opens a
locker whenever b' agrees with the enrolled b on every position the mask
keeps, so any reading within Hamming distance hd of b recovers K: the
masks' zero sets cover every error pattern of weight <= hd.  A reading
further away opens nothing (up to the 2^-32 per-locker false-open rate of
the zero-trailer check).

Masks are never stored; both sides re-derive the same list in
lexicographic order of the zero-position combinations.
"""

from __future__ import annotations

import hashlib
import math
import secrets
from dataclasses import dataclass
from itertools import combinations
from random import Random

import numpy as np

from .bitops import bits_to_int, int_to_packed, pack_bits, unpack_bits
from .errors import CapacityError, ParameterError

CHECK_LEN = 4  # zero bytes appended to K before XOR; the unlock check
MASK_CAP = 2**20
NONCE_LEN = 16


@dataclass
class Locker:
    nonce: bytes
    ciphertext: bytes


@dataclass
class HelperData:
    offset: int  # window start inside the full array
    sz: int  # window length in bits
    hd: int  # max Hamming distance the lockers absorb
    sm: np.ndarray  # stability mask, uint8 0/1, length sz
    lockers: list[Locker]

    @property
    def key_len(self) -> int:
        return len(self.lockers[0].ciphertext) - CHECK_LEN


def mask_count(sz: int, hd: int) -> int:
    return math.comb(sz, hd)


def gen_masks(sz: int, hd: int, cap: int = MASK_CAP) -> list[int]:
    """All sz-bit masks with exactly hd zeros, as integers.

    Bit i of the mask string maps to integer bit (sz - 1 - i); the list is
    ordered lexicographically by zero-position combination, which both
    sides rely on to pair masks with lockers.
    """
    if sz <= 0:
        raise ParameterError("sz must be positive")
    if not 0 <= hd <= sz:
        raise ParameterError("hd must lie in [0, sz]")
    nm = mask_count(sz, hd)
    if nm > cap:
        raise CapacityError(f"C({sz},{hd}) = {nm} masks exceeds cap {cap}")
    full = (1 << sz) - 1
    out = []
    for zeros in combinations(range(sz), hd):
        m = full
        for pos in zeros:
            m &= ~(1 << (sz - 1 - pos))
        out.append(m)
    return out


def _pad(nonce: bytes, masked: bytes, length: int) -> bytes:
    """Counter-mode SHA-256 keystream for one locker."""
    out = b""
    ctr = 0
    while len(out) < length:
        out += hashlib.sha256(nonce + masked + ctr.to_bytes(4, "big")).digest()
        ctr += 1
    return out[:length]


def lock(key: bytes, b, masks: list[int], nonce_seed: int | None = None) -> list[Locker]:
    """One locker per mask over the enrolled reading b (0/1 array, sz bits).

    Nonces are fresh random bytes; pass nonce_seed to make them
    reproducible.
    """
    if not key:
        raise ParameterError("key must be non-empty")
    bits = np.asarray(b, dtype=np.uint8)
    sz = bits.size
    b_int = bits_to_int(bits)
    plain = key + b"\x00" * CHECK_LEN
    rng = Random(nonce_seed) if nonce_seed is not None else None
    lockers = []
    for m in masks:
        nonce = rng.randbytes(NONCE_LEN) if rng else secrets.token_bytes(NONCE_LEN)
        masked = int_to_packed(b_int & m, sz)
        pad = _pad(nonce, masked, len(plain))
        lockers.append(Locker(nonce, bytes(x ^ y for x, y in zip(plain, pad))))
    return lockers


def unlock(helper: HelperData, b_prime) -> bytes | None:
    """Recover K from a fresh reading, or None if every locker stays shut.

    The stability mask is applied to b_prime first; lockers are probed in
    mask order and the first success wins.
    """
    bits = np.asarray(b_prime, dtype=np.uint8)
    if bits.size != helper.sz:
        raise ParameterError(f"reading must be {helper.sz} bits, got {bits.size}")
    sm_int = bits_to_int(helper.sm)
    b_int = bits_to_int(bits) & sm_int
    ct_len = len(helper.lockers[0].ciphertext)
    for m, locker in zip(gen_masks(helper.sz, helper.hd), helper.lockers):
        masked = int_to_packed(b_int & m, helper.sz)
        pad = _pad(locker.nonce, masked, ct_len)
        if pad[-CHECK_LEN:] == locker.ciphertext[-CHECK_LEN:]:
            return bytes(x ^ y for x, y in zip(locker.ciphertext[:-CHECK_LEN], pad))
    return None


def helper_to_dict(helper: HelperData) -> dict:
    blob = b"".join(lk.nonce + lk.ciphertext for lk in helper.lockers)
    return {
        "version": 1,
        "offset": helper.offset,
        "sz": helper.sz,
        "hd": helper.hd,
        "sm": pack_bits(helper.sm).hex(),
        "lockers": blob.hex(),
    }


def helper_from_dict(doc: dict) -> HelperData:
    sz, hd = doc["sz"], doc["hd"]
    nm = mask_count(sz, hd)
    blob = bytes.fromhex(doc["lockers"])
    if nm == 0 or len(blob) % nm:
        raise ParameterError("locker blob length does not divide mask count")
    stride = len(blob) // nm
    if stride <= NONCE_LEN + CHECK_LEN:
        raise ParameterError("locker entries too short")
    lockers = [
        Locker(blob[i : i + NONCE_LEN], blob[i + NONCE_LEN : i + stride])
        for i in range(0, len(blob), stride)
    ]
    return HelperData(
        offset=doc["offset"],
        sz=sz,
        hd=hd,
        sm=unpack_bits(bytes.fromhex(doc["sm"]), sz),
        lockers=lockers,
    )

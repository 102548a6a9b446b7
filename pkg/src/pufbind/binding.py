"""Bind an encoded parameter table to an enrolled device.

A bundle carries, in the clear, everything a device needs to fail
gracefully: the fallback expressions, the value encoding, the helper
data.  The real expressions travel AES-128-CTR encrypted under the first
16 bytes of the enrolled key K; the rest of K feeds the PUF-assignment
query.  There is deliberately no authentication tag on the ciphertext:
recovery decrypts, parses, and compares a SHA-256 of the canonical text
against the bundle's hash.  A match selects the real expressions, any
mismatch (wrong device, corrupted bundle, unparsable plaintext) silently
selects the fallback ones, so recovery never fails outright; a wrong or
cloned device just ends up on a suboptimal row of the table.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from . import fuzzy_extractor, logic_encode
from .bitops import derive_seed
from .enrollment import EnrollmentRecord
from .errors import ParameterError
from .fuzzy_extractor import HelperData
from .logic_encode import (
    ParamTable,
    SopExprList,
    ToBinTable,
    build_partition,
    build_tobin,
    canonical_text,
    derive_truth_tables,
    eval_exprs,
    hash_exprs,
    minimize,
    parse_exprs,
    synthesize_sop,
)

ENC_KEY_LEN = 16


@dataclass
class DeviceKeyMaterial:
    """Disjoint slices of one enrolled key."""

    enc_key: bytes
    assign_pool: bytes

    @classmethod
    def from_key(cls, key: bytes) -> "DeviceKeyMaterial":
        if len(key) <= ENC_KEY_LEN:
            raise ParameterError(
                f"key must be longer than {ENC_KEY_LEN} bytes to leave an assignment pool"
            )
        return cls(enc_key=key[:ENC_KEY_LEN], assign_pool=key[ENC_KEY_LEN:])


@dataclass
class ProtectedBundle:
    k: int
    tobin: ToBinTable
    phi_prime: SopExprList  # fallback expressions, stored in the clear
    hash_value: bytes  # SHA-256 of the canonical real expressions
    nonce: bytes
    encoded_exprs: bytes  # AES-128-CTR ciphertext of the canonical text
    helper: HelperData
    key_helper: HelperData | None = None  # optional second enrollment for enc_key
    version: int = 1


def query_puf(km: DeviceKeyMaterial, k: int) -> int:
    """First k bits of the assignment pool, MSB first."""
    pool_bits = 8 * len(km.assign_pool)
    if not 1 <= k <= pool_bits:
        raise ParameterError(f"k must lie in [1, {pool_bits}]")
    return int.from_bytes(km.assign_pool, "big") >> (pool_bits - k)


def encode_exprs(exprs: SopExprList, enc_key: bytes, nonce: bytes) -> bytes:
    if len(enc_key) != ENC_KEY_LEN:
        raise ParameterError(f"enc_key must be {ENC_KEY_LEN} bytes")
    if len(nonce) != 16:
        raise ParameterError("nonce must be 16 bytes")
    enc = Cipher(algorithms.AES(enc_key), modes.CTR(nonce)).encryptor()
    return enc.update(canonical_text(exprs).encode()) + enc.finalize()


def _decrypt(bundle: ProtectedBundle, enc_key: bytes) -> bytes:
    dec = Cipher(algorithms.AES(enc_key), modes.CTR(bundle.nonce)).decryptor()
    return dec.update(bundle.encoded_exprs) + dec.finalize()


def recover_exprs(bundle: ProtectedBundle, enc_key: bytes) -> SopExprList | None:
    """Decrypt and parse; None when the plaintext is not a wellformed
    expression list (wrong key, truncated or tampered ciphertext)."""
    try:
        text = _decrypt(bundle, enc_key).decode()
        return parse_exprs(text, bundle.k)
    except (ParameterError, UnicodeDecodeError):
        return None


def bind(
    table: ParamTable,
    rec: EnrollmentRecord,
    k: int,
    c: int | None = None,
    seed: int = 0,
    keep: str = "low",
    key_record: EnrollmentRecord | None = None,
) -> ProtectedBundle:
    """Build a bundle for the device behind rec; deterministic in seed.

    c defaults to m, making every alternative reachable through the
    fallback.  key_record, when given, supplies the cipher key from a
    second enrollment instead of the first slice of rec's key.
    """
    km = DeviceKeyMaterial.from_key(rec.key)
    enc_src = key_record if key_record is not None else rec
    enc_key = enc_src.key[:ENC_KEY_LEN]
    if c is None:
        c = table.m

    r = query_puf(km, k)
    part = build_partition(k, table.m, r, seed=seed)
    tb = build_tobin(table)
    tts = derive_truth_tables(table, part, tb, c, keep=keep)
    phi = minimize(synthesize_sop(tts.f))
    phi_prime = minimize(synthesize_sop(tts.f_prime))

    nonce = Random(derive_seed("bind-nonce", seed)).randbytes(16)
    return ProtectedBundle(
        k=k,
        tobin=tb,
        phi_prime=phi_prime,
        hash_value=hash_exprs(phi),
        nonce=nonce,
        encoded_exprs=encode_exprs(phi, enc_key, nonce),
        helper=rec.helper,
        key_helper=key_record.helper if key_record is not None else None,
    )


def _window(bits: np.ndarray, helper: HelperData) -> np.ndarray:
    if bits.size == helper.sz:
        return bits
    if bits.size < helper.offset + helper.sz:
        raise ParameterError("startup reading does not cover the helper window")
    return bits[helper.offset : helper.offset + helper.sz]


def _unlock_or_zero(helper: HelperData, bits: np.ndarray) -> bytes:
    key = fuzzy_extractor.unlock(helper, _window(bits, helper))
    return key if key is not None else b"\x00" * helper.key_len


def recover_values(bundle: ProtectedBundle, startup_bits) -> tuple:
    """Device-side recovery; total, never raises on any startup reading.

    Failed unlocks leave zeroed key material in place, which makes the
    hash check miss and routes evaluation to the fallback expressions.
    """
    bits = np.asarray(startup_bits, dtype=np.uint8)
    key = _unlock_or_zero(bundle.helper, bits)
    km = DeviceKeyMaterial.from_key(key)
    enc_key = km.enc_key
    if bundle.key_helper is not None:
        enc_key = _unlock_or_zero(bundle.key_helper, bits)[:ENC_KEY_LEN]

    candidate = recover_exprs(bundle, enc_key)
    if candidate is not None and hash_exprs(candidate) == bundle.hash_value:
        exprs = candidate
    else:
        exprs = bundle.phi_prime
    assignment = query_puf(km, bundle.k)
    return bundle.tobin.decode_triple(eval_exprs(exprs, assignment))


def bundle_to_dict(bundle: ProtectedBundle) -> dict:
    doc = {
        "version": bundle.version,
        "k": bundle.k,
        "tobin": logic_encode.tobin_to_dict(bundle.tobin),
        "phi_prime": canonical_text(bundle.phi_prime),
        "hashValue": bundle.hash_value.hex(),
        "nonce": bundle.nonce.hex(),
        "encodedExprs": bundle.encoded_exprs.hex(),
        "helper": fuzzy_extractor.helper_to_dict(bundle.helper),
    }
    if bundle.key_helper is not None:
        doc["keyHelper"] = fuzzy_extractor.helper_to_dict(bundle.key_helper)
    return doc


def bundle_from_dict(doc: dict) -> ProtectedBundle:
    tb = logic_encode.tobin_from_dict(doc["tobin"])
    k = doc["k"]
    phi_prime = parse_exprs(doc["phi_prime"], k)
    if len(phi_prime.exprs) != 3 * tb.n:
        raise ParameterError("fallback expression count does not match the encoding width")
    helper = fuzzy_extractor.helper_from_dict(doc["helper"])
    if helper.key_len <= ENC_KEY_LEN:
        raise ParameterError("helper lockers too short to carry key material")
    key_helper = doc.get("keyHelper")
    if key_helper is not None:
        key_helper_data = fuzzy_extractor.helper_from_dict(key_helper)
        if key_helper_data.key_len < ENC_KEY_LEN:
            raise ParameterError("key helper lockers too short for a cipher key")
    return ProtectedBundle(
        k=k,
        tobin=tb,
        phi_prime=phi_prime,
        hash_value=bytes.fromhex(doc["hashValue"]),
        nonce=bytes.fromhex(doc["nonce"]),
        encoded_exprs=bytes.fromhex(doc["encodedExprs"]),
        helper=helper,
        key_helper=key_helper_data if key_helper is not None else None,
        version=doc.get("version", 1),
    )

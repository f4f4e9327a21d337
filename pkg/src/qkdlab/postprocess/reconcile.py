"""One-way information reconciliation: LDPC syndrome, then hash verification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bits import BitString, as_bits, bits_to_str
from ..hashing import gf_family, hash_gf
from .ldpc import LdpcCode, decode


def verification_bits(eps_cor: float) -> int:
    if not 0 < eps_cor < 1:
        raise ValueError("eps_cor must lie in (0, 1)")
    return math.ceil(math.log2(1 / eps_cor) - 1e-12)


@dataclass(frozen=True)
class IrResult:
    """Bob's corrected key and the bookkeeping Alice and Bob exchanged.

    ``leak`` counts syndrome bits plus twice the verification hash length
    (hash description and value).
    """

    corrected: BitString
    leak: int
    verified: bool
    eps_cor: float
    syndrome_bits: int
    verify_bits: int
    converged: bool
    iterations: int
    hash_seed: str
    hash_alice: str
    hash_bob: str


def verification_tag(key: BitString, ell: int, seed: BitString) -> BitString:
    family = gf_family(len(key), min(ell, len(key)))
    return hash_gf(family, key, seed)


def verification_seed_bits(n: int) -> int:
    return gf_family(n, 1).seed_bits


def reconcile(
    key_a: BitString,
    key_b: BitString,
    code: LdpcCode | None,
    eps_cor: float,
    hash_seed: BitString,
    qber: float = 0.0,
    max_iter: int = 100,
) -> IrResult:
    """Correct ``key_b`` towards ``key_a`` and verify with a two-universal hash.

    ``code`` of ``None`` sends no syndrome; Bob's key goes straight to
    verification.  ``qber`` is the decoder's channel prior.
    """
    a, b = as_bits(key_a), as_bits(key_b)
    if len(a) != len(b):
        raise ValueError("keys must have equal length")
    if len(a) == 0:
        raise ValueError("keys must be non-empty")
    ell = verification_bits(eps_cor)
    if code is None:
        corrected, converged, iters, m = b.copy(), True, 0, 0
    else:
        if code.n != len(a):
            raise ValueError("code length does not match the key")
        res = decode(code, b, code.syndrome(a), qber, max_iter)
        corrected, converged, iters, m = res.bits, res.converged, res.iterations, code.m
    seed = as_bits(hash_seed)
    tag_a = verification_tag(a, ell, seed)
    tag_b = verification_tag(corrected, ell, seed)
    verified = converged and np.array_equal(tag_a, tag_b)
    return IrResult(
        corrected=corrected,
        leak=m + 2 * ell,
        verified=bool(verified),
        eps_cor=eps_cor,
        syndrome_bits=m,
        verify_bits=ell,
        converged=converged,
        iterations=iters,
        hash_seed=bits_to_str(seed),
        hash_alice=bits_to_str(tag_a),
        hash_bob=bits_to_str(tag_b),
    )

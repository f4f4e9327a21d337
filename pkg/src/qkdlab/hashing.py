"""Two-universal hashing for privacy amplification and the leftover-hash calculus.

Two families are provided:

* ``gf-multiply``: f_a(x) = low l bits of x * a in GF(2^n).  Keys longer than
  64 bits are zero-padded into the next tabulated wide field, which keeps the
  map injective and so preserves the 2^-l collision bound.
* ``polynomial-almost``: f_a(x_1..x_r) = sum_i x_i a^(r-i) over GF(2^n), which
  is (r-1)/2^n almost two-universal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bits import BitString, as_bits, bits_to_int, int_to_bits
from .fields import Gf2nField, WideField, field_for_bits, gf_mul, wide_mul


@dataclass(frozen=True)
class HashFamily:
    kind: str
    input_bits: int
    output_bits: int = 0
    blocks: int = 1
    field: Gf2nField | WideField = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.kind not in ("gf-multiply", "polynomial-almost"):
            raise ValueError(f"unknown hash family kind {self.kind!r}")
        if self.input_bits < 1:
            raise ValueError("input_bits must be positive")
        if self.field is None:
            object.__setattr__(self, "field", field_for_bits(self.input_bits))
        if self.kind == "gf-multiply":
            if not 0 <= self.output_bits <= self.input_bits:
                raise ValueError("output_bits must lie in [0, input_bits]")
        else:
            if not isinstance(self.field, Gf2nField) or self.field.n != self.input_bits:
                raise ValueError("polynomial family needs a block-sized Gf2nField")
            if self.blocks < 1:
                raise ValueError("need at least one block")

    @property
    def seed_bits(self) -> int:
        return self.field.n

    @property
    def collision_bound(self) -> float:
        if self.kind == "gf-multiply":
            return 2.0 ** -self.output_bits
        return (self.blocks - 1) / 2.0 ** self.field.n

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "input_bits": self.input_bits,
            "output_bits": self.output_bits,
            "blocks": self.blocks,
            "field": self.field.describe(),
        }


def gf_family(input_bits: int, output_bits: int) -> HashFamily:
    return HashFamily("gf-multiply", input_bits, output_bits)


def poly_family(block_bits: int, blocks: int) -> HashFamily:
    return HashFamily("polynomial-almost", block_bits, blocks=blocks, field=Gf2nField(block_bits))


def draw_seed(family: HashFamily, rng: np.random.Generator) -> BitString:
    return rng.integers(0, 2, size=family.seed_bits, dtype=np.uint8)


def _seed_int(family: HashFamily, seed: BitString | int) -> int:
    if isinstance(seed, (int, np.integer)):
        value = int(seed)
    else:
        s = as_bits(seed)
        if len(s) != family.seed_bits:
            raise ValueError(f"seed must have {family.seed_bits} bits, got {len(s)}")
        value = bits_to_int(s)
    if not 0 <= value < 1 << family.seed_bits:
        raise ValueError("seed out of range")
    return value


def hash_gf(family: HashFamily, key: BitString, seed: BitString | int) -> BitString:
    """Low ``output_bits`` bits of key * seed in the family's field."""
    if family.kind != "gf-multiply":
        raise ValueError("hash_gf needs a gf-multiply family")
    key = as_bits(key)
    if len(key) != family.input_bits:
        raise ValueError(f"key must have {family.input_bits} bits, got {len(key)}")
    ell = family.output_bits
    fld = family.field
    if isinstance(fld, Gf2nField):
        prod = gf_mul(fld, bits_to_int(key), _seed_int(family, seed))
        return int_to_bits(prod & ((1 << ell) - 1), ell)
    # wide field: little-endian coefficient arrays
    if isinstance(seed, (int, np.integer)):
        seed = int_to_bits(int(seed), fld.n)
    seed = as_bits(seed)
    if len(seed) != fld.n:
        raise ValueError(f"seed must have {fld.n} bits")
    x = np.zeros(fld.n, dtype=np.uint8)
    x[: len(key)] = key[::-1]
    prod = wide_mul(fld, x, seed[::-1].copy())
    return prod[:ell][::-1].copy()


def hash_poly(family: HashFamily, blocks: Sequence[int], seed: int) -> int:
    """sum_i x_i seed^(r-i) by Horner's rule."""
    if family.kind != "polynomial-almost":
        raise ValueError("hash_poly needs a polynomial-almost family")
    if len(blocks) != family.blocks:
        raise ValueError(f"expected {family.blocks} blocks, got {len(blocks)}")
    acc = 0
    for x in blocks:
        acc = gf_mul(family.field, acc, seed) ^ int(x)
    return acc


# ---------------------------------------------------------------------------
# Leftover hashing

@dataclass(frozen=True)
class PaBudget:
    hmin_bound: float
    leak_ir: float
    eps_pa: float
    eps_cor: float = 1e-10
    eps_smooth: float = 0.0
    output_len: int | None = None

    def __post_init__(self):
        for name in ("eps_pa", "eps_cor"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if not 0 <= self.eps_smooth < 1:
            raise ValueError("eps_smooth must lie in [0, 1)")
        if self.leak_ir < 0:
            raise ValueError("leak_ir must be non-negative")


def leftover_hash_distance(hmin: float, ell: float, eps_smooth: float = 0.0) -> float:
    """eps + 2^(-(hmin - ell)/2 - 1)."""
    return eps_smooth + 2.0 ** (-(hmin - ell) / 2 - 1)


def max_key_length(budget: PaBudget) -> int:
    """Largest l >= 0 whose leftover-hash distance stays within eps_pa; else 0."""
    h = budget.hmin_bound - budget.leak_ir
    slack = budget.eps_pa - budget.eps_smooth
    if h <= 0 or slack <= 0:
        return 0
    ell = math.floor(h - 2 * math.log2(1 / slack) + 2 + 1e-9)
    # guard the floor against rounding in either direction
    while ell >= 0 and leftover_hash_distance(h, ell, budget.eps_smooth) > budget.eps_pa * (1 + 1e-12):
        ell -= 1
    while leftover_hash_distance(h, ell + 1, budget.eps_smooth) <= budget.eps_pa * (1 + 1e-12):
        ell += 1
    return max(ell, 0)

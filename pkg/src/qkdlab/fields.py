"""Binary extension fields GF(2^n).

Elements are non-negative integers whose bit i is the coefficient of x^i.
Fields with n <= 64 use plain Python integers.  Longer keys use
``WideField``, which stores elements as little-endian 0/1 ``uint8`` arrays
and reduces modulo a sparse trinomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

# Lowest-weight irreducible polynomial for each n: trinomial with the smallest
# middle exponent, otherwise the lexicographically smallest pentanomial.
_LOW_WEIGHT_TERMS: dict[int, tuple[int, ...]] = {
    1: (1, 0), 2: (2, 1, 0), 3: (3, 1, 0), 4: (4, 1, 0), 5: (5, 2, 0), 6: (6, 1, 0),
    7: (7, 1, 0), 8: (8, 4, 3, 1, 0), 9: (9, 1, 0), 10: (10, 3, 0), 11: (11, 2, 0),
    12: (12, 3, 0), 13: (13, 4, 3, 1, 0), 14: (14, 5, 0), 15: (15, 1, 0),
    16: (16, 5, 3, 1, 0), 17: (17, 3, 0), 18: (18, 3, 0), 19: (19, 5, 2, 1, 0),
    20: (20, 3, 0), 21: (21, 2, 0), 22: (22, 1, 0), 23: (23, 5, 0), 24: (24, 4, 3, 1, 0),
    25: (25, 3, 0), 26: (26, 4, 3, 1, 0), 27: (27, 5, 2, 1, 0), 28: (28, 1, 0),
    29: (29, 2, 0), 30: (30, 1, 0), 31: (31, 3, 0), 32: (32, 7, 3, 2, 0), 33: (33, 10, 0),
    34: (34, 7, 0), 35: (35, 2, 0), 36: (36, 9, 0), 37: (37, 6, 4, 1, 0),
    38: (38, 6, 5, 1, 0), 39: (39, 4, 0), 40: (40, 5, 4, 3, 0), 41: (41, 3, 0),
    42: (42, 7, 0), 43: (43, 6, 4, 3, 0), 44: (44, 5, 0), 45: (45, 4, 3, 1, 0),
    46: (46, 1, 0), 47: (47, 5, 0), 48: (48, 5, 3, 2, 0), 49: (49, 9, 0),
    50: (50, 4, 3, 2, 0), 51: (51, 6, 3, 1, 0), 52: (52, 3, 0), 53: (53, 6, 2, 1, 0),
    54: (54, 9, 0), 55: (55, 7, 0), 56: (56, 7, 4, 2, 0), 57: (57, 4, 0), 58: (58, 19, 0),
    59: (59, 7, 4, 2, 0), 60: (60, 1, 0), 61: (61, 5, 2, 1, 0), 62: (62, 29, 0),
    63: (63, 1, 0), 64: (64, 4, 3, 1, 0),
}

# Primitive trinomials x^p + x^k + 1 of Mersenne-exponent degree p.
WIDE_TRINOMIALS: dict[int, int] = {
    89: 38, 127: 1, 521: 32, 607: 105, 1279: 216, 2281: 715, 3217: 67,
    4423: 271, 9689: 84, 19937: 881, 23209: 1530, 44497: 8575, 110503: 25230,
    132049: 7000, 756839: 215747, 859433: 170340,
}


def terms_to_poly(terms: tuple[int, ...]) -> int:
    poly = 0
    for t in terms:
        poly |= 1 << t
    return poly


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit polynomials."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def poly_mod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a and a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    db = b.bit_length() - 1
    q = 0
    while a and a.bit_length() - 1 >= db:
        shift = a.bit_length() - 1 - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible_rabin(f: int) -> bool:
    """Rabin's irreducibility test over GF(2)."""
    n = f.bit_length() - 1
    if n < 1:
        return False

    def x_pow_2k(k: int) -> int:
        x = 2
        for _ in range(k):
            x = poly_mod(clmul(x, x), f)
        return x

    if x_pow_2k(n) != poly_mod(2, f):
        return False
    return all(poly_gcd(f, x_pow_2k(n // p) ^ 2) == 1 for p in _prime_factors(n))


def is_irreducible_exhaustive(f: int) -> bool:
    """Trial division by every polynomial of degree 1..n/2."""
    n = f.bit_length() - 1
    for d in range(1, n // 2 + 1):
        for g in range(1 << d, 1 << (d + 1)):
            if poly_mod(f, g) == 0:
                return False
    return n >= 1


@dataclass(frozen=True)
class Gf2nField:
    """GF(2^n) for 1 <= n <= 64 with an irreducible reduction polynomial."""

    n: int
    reduction_poly: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= 64:
            raise ValueError("Gf2nField supports 1 <= n <= 64; use WideField beyond")
        if self.reduction_poly == 0:
            object.__setattr__(self, "reduction_poly", terms_to_poly(_LOW_WEIGHT_TERMS[self.n]))
        if self.reduction_poly.bit_length() - 1 != self.n:
            raise ValueError("reduction polynomial degree does not match n")
        if not _verified(self.reduction_poly):
            raise ValueError(f"reduction polynomial {self.reduction_poly:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.n

    def describe(self) -> dict:
        return {"n": self.n, "reduction_poly": hex(self.reduction_poly)}


@lru_cache(maxsize=None)
def _verified(f: int) -> bool:
    n = f.bit_length() - 1
    return is_irreducible_exhaustive(f) if n <= 16 else is_irreducible_rabin(f)


def _check(fld: Gf2nField, *xs: int) -> None:
    for x in xs:
        if not 0 <= x < fld.order:
            raise ValueError(f"element {x} outside GF(2^{fld.n})")


def gf_mul(fld: Gf2nField, a: int, b: int) -> int:
    _check(fld, a, b)
    return poly_mod(clmul(a, b), fld.reduction_poly)


def gf_pow(fld: Gf2nField, a: int, e: int) -> int:
    result = 1
    while e:
        if e & 1:
            result = gf_mul(fld, result, a)
        a = gf_mul(fld, a, a)
        e >>= 1
    return result


def gf_inv(fld: Gf2nField, a: int) -> int:
    """Inverse by the extended Euclidean algorithm on polynomials."""
    _check(fld, a)
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(2^n)")
    r0, r1 = fld.reduction_poly, a
    s0, s1 = 0, 1
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 ^ clmul(q, s1)
    return poly_mod(s0, fld.reduction_poly)


def gf_mul_array(fld: Gf2nField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised product for n <= 32 on arrays of elements."""
    if fld.n > 32:
        raise ValueError("gf_mul_array supports n <= 32")
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a, b = np.broadcast_arrays(a, b)
    prod = np.zeros(a.shape, dtype=np.uint64)
    for i in range(fld.n):
        bit = (b >> np.uint64(i)) & np.uint64(1)
        prod ^= (a << np.uint64(i)) * bit
    f = np.uint64(fld.reduction_poly)
    for i in range(2 * fld.n - 2, fld.n - 1, -1):
        bit = (prod >> np.uint64(i)) & np.uint64(1)
        prod ^= (f << np.uint64(i - fld.n)) * bit
    return prod


# ---------------------------------------------------------------------------
# Wide fields

@dataclass(frozen=True)
class WideField:
    """GF(2^p) modulo the trinomial x^p + x^k + 1."""

    n: int
    k: int = field(default=0)

    def __post_init__(self):
        if self.k == 0:
            if self.n not in WIDE_TRINOMIALS:
                raise ValueError(f"no tabulated trinomial of degree {self.n}")
            object.__setattr__(self, "k", WIDE_TRINOMIALS[self.n])
        if not 0 < self.k < self.n:
            raise ValueError("middle exponent must lie strictly between 0 and n")

    def describe(self) -> dict:
        return {"n": self.n, "reduction_poly": f"x^{self.n}+x^{self.k}+1"}


def field_for_bits(n_bits: int) -> Gf2nField | WideField:
    """Smallest tabulated field holding ``n_bits``-bit elements."""
    if n_bits < 1:
        raise ValueError("need at least one bit")
    if n_bits <= 64:
        return Gf2nField(n_bits)
    for p in sorted(WIDE_TRINOMIALS):
        if p >= n_bits:
            return WideField(p)
    raise ValueError(f"no tabulated field wide enough for {n_bits} bits")


def _wide_reduce(c: np.ndarray, n: int, k: int) -> np.ndarray:
    c = c.copy()
    while len(c) > n:
        high = c[n:]
        c = c[:n].copy()
        if len(high) + k > len(c):
            c = np.concatenate([c, np.zeros(len(high) + k - len(c), dtype=np.uint8)])
        c[: len(high)] ^= high
        c[k: k + len(high)] ^= high
        c = np.trim_zeros(c, "b") if len(c) > n else c
    out = np.zeros(n, dtype=np.uint8)
    out[: len(c)] = c
    return out


def wide_mul(fld: WideField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of little-endian coefficient arrays of length n."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if len(a) != fld.n or len(b) != fld.n:
        raise ValueError("operands must have exactly n coefficients")
    if not a.any() or not b.any():
        return np.zeros(fld.n, dtype=np.uint8)
    conv = np.rint(fftconvolve(a.astype(float), b.astype(float))).astype(np.int64) & 1
    return _wide_reduce(conv.astype(np.uint8), fld.n, fld.k)


def wide_square(fld: WideField, a: np.ndarray) -> np.ndarray:
    spread = np.zeros(2 * fld.n - 1, dtype=np.uint8)
    spread[::2] = np.asarray(a, dtype=np.uint8)
    return _wide_reduce(spread, fld.n, fld.k)


def wide_is_irreducible(fld: WideField) -> bool:
    """For prime n a trinomial is irreducible iff x^(2^n) = x mod f."""
    x = np.zeros(fld.n, dtype=np.uint8)
    x[1] = 1
    y = x
    for _ in range(fld.n):
        y = wide_square(fld, y)
    return bool(np.array_equal(x, y))


__all__ = [
    "Gf2nField",
    "WIDE_TRINOMIALS",
    "WideField",
    "clmul",
    "field_for_bits",
    "gf_inv",
    "gf_mul",
    "gf_mul_array",
    "gf_pow",
    "is_irreducible_exhaustive",
    "is_irreducible_rabin",
    "poly_mod",
    "wide_is_irreducible",
    "wide_mul",
    "wide_square",
]

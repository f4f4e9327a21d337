"""Column-regular LDPC codes with sum-product syndrome decoding."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bits import BitString, as_bits
from ..entropy import binary_entropy

LLR_CLIP = 1 - 1e-15


@dataclass(frozen=True)
class LdpcCode:
    """Parity-check matrix stored as its edge list (check index, variable index)."""

    n: int
    m: int
    checks: np.ndarray
    variables: np.ndarray
    seed: int

    @property
    def rate(self) -> float:
        return 1 - self.m / self.n

    def syndrome(self, bits: BitString) -> BitString:
        x = as_bits(bits)
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} bits, got {len(x)}")
        return (np.bincount(self.checks, weights=x[self.variables], minlength=self.m) % 2).astype(np.uint8)

    def dense(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        h[self.checks, self.variables] = 1
        return h


def regular_code(n: int, m: int, seed: int, column_weight: int = 3) -> LdpcCode:
    """Random parity-check matrix with every column of weight ``column_weight``.

    Row weights differ by at most one.  Sockets are matched by a seeded
    permutation and repeated (check, variable) pairs are re-drawn.
    """
    if not 0 < m <= n:
        raise ValueError("need 0 < m <= n")
    wc = min(column_weight, m)
    rng = np.random.default_rng(seed)
    variables = np.repeat(np.arange(n), wc)
    check_sockets = np.arange(len(variables)) % m
    for _ in range(1000):
        checks = rng.permutation(check_sockets)
        pairs = checks.astype(np.int64) * n + variables
        if len(np.unique(pairs)) == len(pairs):
            break
        # repair: swap each duplicate socket with a random other socket until clean
        for _ in range(100 * len(pairs)):
            _, first = np.unique(pairs, return_index=True)
            dup = np.setdiff1d(np.arange(len(pairs)), first)
            if len(dup) == 0:
                break
            i = dup[0]
            j = rng.integers(len(pairs))
            checks[i], checks[j] = checks[j], checks[i]
            pairs = checks.astype(np.int64) * n + variables
        if len(np.unique(pairs)) == len(pairs):
            break
    else:  # pragma: no cover - only for absurdly dense requests
        raise RuntimeError("could not build a parity-check matrix without repeated edges")
    order = np.lexsort((variables, checks))
    return LdpcCode(n, m, checks[order], variables[order], seed)


def checks_for_rate(n: int, qber: float, efficiency: float = 1.4, margin: float = 1.1) -> int:
    """Syndrome length m = ceil(n * efficiency * h(margin * qber)), capped at n."""
    q = min(0.5, margin * qber)
    if q <= 0:
        return 0
    return min(n, math.ceil(n * efficiency * binary_entropy(q)))


@dataclass(frozen=True)
class DecodeResult:
    bits: BitString
    converged: bool
    iterations: int


def decode(code: LdpcCode, received: BitString, syndrome: BitString, qber: float,
           max_iter: int = 100) -> DecodeResult:
    """Sum-product search for the word nearest ``received`` with the given syndrome."""
    y = as_bits(received)
    s = as_bits(syndrome)
    if len(y) != code.n or len(s) != code.m:
        raise ValueError("received word or syndrome has the wrong length")
    q = min(max(qber, 1e-6), 0.5 - 1e-9)
    prior = (1 - 2 * y.astype(float)) * math.log((1 - q) / q)
    c, v = code.checks, code.variables
    sign_s = 1 - 2 * s[c].astype(float)
    to_check = prior[v].copy()
    total = prior.copy()
    for it in range(1, max_iter + 1):
        t = np.tanh(to_check / 2)
        mag = np.log(np.maximum(np.abs(t), 1e-300))
        neg = t < 0
        mag_sum = np.bincount(c, weights=mag, minlength=code.m)
        neg_sum = np.bincount(c, weights=neg, minlength=code.m)
        ext = np.exp(mag_sum[c] - mag)
        parity = (neg_sum[c] - neg) % 2
        ext = np.where(parity == 1, -ext, ext) * sign_s
        to_var = 2 * np.arctanh(np.clip(ext, -LLR_CLIP, LLR_CLIP))
        total = prior + np.bincount(v, weights=to_var, minlength=code.n)
        guess = (total < 0).astype(np.uint8)
        if np.array_equal(code.syndrome(guess), s):
            return DecodeResult(guess, True, it)
        to_check = total[v] - to_var
    return DecodeResult((total < 0).astype(np.uint8), False, max_iter)

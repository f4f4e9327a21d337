"""Parameter estimation: random sampling without replacement and the
max-entropy bound it supports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bits import BitString, as_bits
from ..entropy import binary_entropy


def serfling_tail(N: int, k: int, n: int, beta: float) -> float:
    """exp(-2 beta^2 n N / (k + 1)).

    Bounds Pr[mean of the ``n`` unsampled bits >= population mean + beta] when
    ``k`` of the ``N`` bits are sampled uniformly without replacement.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if n < 1 or k < 1 or N != n + k:
        raise ValueError("need N = n + k with n, k >= 1")
    return math.exp(-2 * beta**2 * n * N / (k + 1))


@dataclass(frozen=True)
class PeParams:
    N: int
    k: int
    lambda_max: float
    gamma: float

    def __post_init__(self):
        if not 0 < self.k < self.N:
            raise ValueError("need 0 < k < N")
        if not (0 <= self.lambda_max <= 1 and 0 <= self.gamma <= 1):
            raise ValueError("lambda_max and gamma must lie in [0, 1]")
        if self.lambda_max + self.gamma > 1:
            raise ValueError("lambda_max + gamma must not exceed 1")

    @property
    def n(self) -> int:
        return self.N - self.k


@dataclass(frozen=True)
class PeOutcome:
    error_ratio: float
    abort: bool
    hmax_bound: float
    eps_pe: float
    n: int


def pe_epsilon(params: PeParams, pass_probability: float = 1.0) -> float:
    """exp(-k^2 n gamma^2 / ((k+1) N)) / sqrt(Pr[pass])."""
    if not 0 < pass_probability <= 1:
        raise ValueError("pass_probability must lie in (0, 1]")
    k, n, N = params.k, params.n, params.N
    return min(1.0, math.exp(-(k**2) * n * params.gamma**2 / ((k + 1) * N)) / math.sqrt(pass_probability))


def gamma_for_epsilon(N: int, k: int, eps_pe: float) -> float:
    """Smallest gamma whose estimation error equals ``eps_pe`` (pass probability 1)."""
    if not 0 < eps_pe < 1:
        raise ValueError("eps_pe must lie in (0, 1)")
    n = N - k
    return math.sqrt(math.log(1 / eps_pe) * (k + 1) * N / (k**2 * n))


def estimate(
    sample_a: BitString,
    sample_b: BitString,
    params: PeParams,
    pass_probability: float = 1.0,
) -> PeOutcome:
    """Compare the sampled bits and bound the max-entropy of the remaining n bits."""
    a, b = as_bits(sample_a), as_bits(sample_b)
    if len(a) != params.k or len(b) != params.k:
        raise ValueError(f"samples must have k={params.k} bits")
    ratio = float(np.count_nonzero(a != b)) / params.k
    abort = ratio > params.lambda_max
    n = params.n
    bound = float(n) if abort else n * binary_entropy(params.lambda_max + params.gamma)
    return PeOutcome(ratio, abort, bound, pe_epsilon(params, pass_probability), n)


def asymptotic_hbound(q: float) -> float:
    """h(q), the per-signal upper bound on H(K_A|K_B) at error rate q."""
    return binary_entropy(q)


def random_bits_for_subset(N: int, k: int) -> int:
    return (math.comb(N, k) - 1).bit_length()


def unrank_subset(rank: int, N: int, k: int) -> np.ndarray:
    """The ``rank``-th k-subset of range(N) in lexicographic order."""
    total = math.comb(N, k)
    if not 0 <= rank < total:
        raise ValueError("rank out of range")
    out = np.empty(k, dtype=np.int64)
    j = 0
    # c = C(m, r): subsets whose next element is i, with m = N-1-i, r = k-j-1
    m, r = N - 1, k - 1
    c = math.comb(m, r)
    for i in range(N):
        if rank < c:
            out[j] = i
            j += 1
            if j == k:
                break
            c = c * r // m
            r -= 1
        else:
            rank -= c
            c = c * (m - r) // m
        m -= 1
    return out


def sample_subset(N: int, k: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Uniform k-subset of range(N) from ceil(log2 C(N,k))-bit draws.

    Returns the sorted indices and the number of random bits consumed, which
    exceeds the minimum only when a draw lands above C(N,k) and is rejected.
    """
    total = math.comb(N, k)
    width = random_bits_for_subset(N, k)
    used = 0
    while True:
        nbytes = (width + 7) // 8
        raw = int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - width) if width else 0
        used += width
        if raw < total:
            return unrank_subset(raw, N, k), used

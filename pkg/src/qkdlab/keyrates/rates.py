"""Asymptotic key-rate formulas and the bounds that feed finite-key lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..entropy import binary_entropy, h4
from ..quantum import Povm, sqrtm_psd


def dw_rate(h_ke: float, h_kb: float) -> float:
    """H(K_A|E) - H(K_A|K_B); may be negative."""
    return h_ke - h_kb


def bb84_rate(q_x: float, q_z: float | None = None) -> float:
    """1 - h(q_x) - h(q_z).

    Uses H(K_A|E) >= 1 - h(q_x) from the qubit uncertainty relation (c = 1/2)
    together with H(K_A|K_B) <= h(q_z).
    """
    q_z = q_x if q_z is None else q_z
    return 1 - binary_entropy(q_x) - binary_entropy(q_z)


def bisect_root(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of f on [lo, hi] given a sign change."""
    f_lo = f(lo)
    if f_lo * f(hi) > 0:
        raise ValueError("no sign change on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bb84_threshold() -> float:
    """Error rate where 1 - 2h(q) crosses zero."""
    return bisect_root(lambda q: bb84_rate(q), 1e-6, 0.5)


def lm05_rate(q_g0: float, q_g1: float, q_f: float) -> float:
    """1 - min(h(q_G0), h(q_G1)) - h(q_F)."""
    return 1 - min(binary_entropy(q_g0), binary_entropy(q_g1)) - binary_entropy(q_f)


def sdc_rate(q_g: Sequence[float], q_f: Sequence[float]) -> float:
    """2 - H4(q_G) - H4(q_F) for four-outcome error distributions."""
    return 2 - h4(q_g) - h4(q_f)


@dataclass(frozen=True)
class OverlapC:
    c: float

    def __post_init__(self):
        if not 0 < self.c <= 1:
            raise ValueError("overlap c must lie in (0, 1]")

    @classmethod
    def from_povms(cls, f: Povm, g: Povm) -> "OverlapC":
        """max over outcome pairs of ||sqrt(F_x) sqrt(G_z)||_inf^2."""
        roots_f = [sqrtm_psd(e) for e in f.elements]
        roots_g = [sqrtm_psd(e) for e in g.elements]
        best = max(np.linalg.norm(a @ b, 2) ** 2 for a in roots_f for b in roots_g)
        return cls(float(min(1.0, best)))


def uncertainty_hmin_bound(n: int, c: OverlapC | float, hmax_bound: float) -> float:
    """n log2(1/c) - hmax_bound: smooth min-entropy of one basis given the other's max-entropy."""
    c_val = c.c if isinstance(c, OverlapC) else OverlapC(c).c
    return n * math.log2(1 / c_val) - hmax_bound


def post_selection_adjust(eps: float, n: int, d_q: int) -> tuple[float, float]:
    """(eps (n+1)^(d^2-1), 2 (d^2-1) log2(n+1)): cost of lifting collective to coherent attacks."""
    if d_q < 1 or n < 0:
        raise ValueError("need d_q >= 1 and n >= 0")
    power = d_q**2 - 1
    return eps * float(n + 1) ** power, 2 * power * math.log2(n + 1)


def chsh_guess_bound(value: float) -> float:
    """Upper bound 3/2 - I/4 on Eve's guessing probability, capped at 1."""
    if not -4 <= value <= 4:
        raise ValueError("CHSH value must lie in [-4, 4]")
    return min(1.0, 1.5 - value / 4)

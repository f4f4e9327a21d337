"""Finite-key lengths: uncertainty bound, then leak subtraction, then leftover hashing."""

from __future__ import annotations

from dataclasses import dataclass

from ..entropy import binary_entropy
from ..hashing import PaBudget, max_key_length
from ..postprocess.estimation import PeOutcome, PeParams, gamma_for_epsilon, pe_epsilon
from ..postprocess.reconcile import verification_bits
from .rates import OverlapC, uncertainty_hmin_bound


@dataclass(frozen=True)
class FiniteKey:
    length: int
    abort: bool
    hmin_bound: float
    hmax_bound: float
    leak: float
    no_positive_rate: bool


def finite_key_length(pe: PeOutcome, c: OverlapC | float, leak_ir: float, eps_pa: float,
                      eps_cor: float = 1e-10) -> FiniteKey:
    """Key length extractable from the n unsampled bits; 0 with ``abort`` if PE aborted."""
    if pe.abort:
        return FiniteKey(0, True, 0.0, pe.hmax_bound, leak_ir, True)
    hmin = uncertainty_hmin_bound(pe.n, c, pe.hmax_bound)
    if hmin - leak_ir <= 0:
        return FiniteKey(0, False, hmin, pe.hmax_bound, leak_ir, True)
    ell = max_key_length(PaBudget(hmin, leak_ir, eps_pa, eps_cor))
    return FiniteKey(ell, False, hmin, pe.hmax_bound, leak_ir, ell == 0)


def bb84_finite_key(n: int, qber: float, eps: float = 1e-10, sample_ratio: float = 2.0,
                    ir_efficiency: float = 1.0) -> FiniteKey:
    """Key length for n key bits at observed error rate ``qber``.

    ``eps`` is split equally between estimation, correctness and privacy
    amplification.  k = sample_ratio * n bits are sampled; the threshold is the
    observed error rate and gamma is chosen so the estimation error is eps/3.
    Reconciliation leaks ir_efficiency * n * h(qber) plus the verification hash.
    """
    share = eps / 3
    k = max(1, round(sample_ratio * n))
    N = n + k
    gamma = gamma_for_epsilon(N, k, share)
    lam = min(qber, 1.0)
    gamma = min(gamma, 1 - lam)
    params = PeParams(N, k, lam, gamma)
    pe = PeOutcome(qber, False, n * binary_entropy(lam + gamma), pe_epsilon(params), n)
    leak = ir_efficiency * n * binary_entropy(qber) + 2 * verification_bits(share)
    return finite_key_length(pe, 0.5, leak, share, share)

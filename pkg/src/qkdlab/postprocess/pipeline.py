"""The classical post-processing state machine: estimate, reconcile, amplify.

All randomness is drawn through a ``Choices`` object.  A fresh run draws
from seeded substreams; a replay reads the same values back from a
transcript, so a transcript alone reproduces the final key.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any

import numpy as np

from ..bits import BitString, as_bits, bits_from_hex, bits_to_hex
from ..hashing import gf_family, hash_gf
from ..keyrates.finite import finite_key_length
from ..keyrates.report import RateReport
from ..protocols.models import ConfigError
from ..protocols.records import RoundRecords
from ..rng import substream
from .estimation import PeParams, estimate, gamma_for_epsilon, pe_epsilon, sample_subset
from .ldpc import checks_for_rate, regular_code
from .reconcile import reconcile, verification_seed_bits


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for one post-processing session.

    ``gamma`` of ``None`` picks the smallest slack whose estimation error is
    the PE share of ``eps_total``.  The budget is split by ``eps_split``
    between estimation, correctness and privacy amplification.
    """

    protocol: str = "bb84"
    sample_fraction: float = 0.2
    lambda_max: float = 0.05
    gamma: float | None = None
    eps_total: float = 1e-9
    eps_split: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    overlap: float = 0.5
    ir_efficiency: float = 1.4
    ir_margin: float = 1.1
    column_weight: int = 3
    max_iter: int = 100

    def __post_init__(self):
        object.__setattr__(self, "eps_split", tuple(float(x) for x in self.eps_split))
        if not 0 < self.sample_fraction < 1:
            raise ConfigError("sample_fraction must lie in (0, 1)")
        if not 0 <= self.lambda_max < 1:
            raise ConfigError("lambda_max must lie in [0, 1)")
        if self.gamma is not None and not 0 <= self.gamma <= 1 - self.lambda_max:
            raise ConfigError("gamma must lie in [0, 1 - lambda_max]")
        if not 0 < self.eps_total < 1:
            raise ConfigError("eps_total must lie in (0, 1)")
        if len(self.eps_split) != 3 or min(self.eps_split) <= 0 or abs(sum(self.eps_split) - 1) > 1e-9:
            raise ConfigError("eps_split needs three positive shares summing to 1")
        if not 0 < self.overlap <= 1:
            raise ConfigError("overlap must lie in (0, 1]")

    @property
    def eps_shares(self) -> tuple[float, float, float]:
        pe, cor, pa = (self.eps_total * s for s in self.eps_split)
        return pe, cor, pa

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["eps_split"] = list(self.eps_split)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown pipeline fields {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class PipelineResult:
    key: BitString | None
    key_bob: BitString | None
    report: RateReport
    transcript: dict[str, Any]

    @property
    def abort(self) -> bool:
        return self.report.abort

    @property
    def key_hex(self) -> str | None:
        return None if self.key is None else bits_to_hex(self.key)


class _Drawn:
    def __init__(self, seed: int):
        self.seed = seed

    def subset(self, N: int, k: int) -> tuple[np.ndarray, int]:
        return sample_subset(N, k, substream(self.seed, "pe-sample"))

    def code_seed(self) -> int:
        return int(substream(self.seed, "ir-code").integers(0, 2**63))

    def bits(self, tag: str, count: int) -> BitString:
        return substream(self.seed, tag).integers(0, 2, count, dtype=np.uint8)


class _Replayed:
    def __init__(self, transcript: dict[str, Any]):
        self.t = transcript

    def subset(self, N: int, k: int) -> tuple[np.ndarray, int]:
        pe = self.t["pe"]
        if (pe["N"], pe["k"]) != (N, k):
            raise ValueError("transcript does not match the key lengths")
        return np.asarray(pe["sample_indices"], dtype=np.int64), pe["subset_random_bits"]

    def code_seed(self) -> int:
        return int(self.t["ir"]["code"]["seed"])

    def bits(self, tag: str, count: int) -> BitString:
        entry = self.t["ir"]["verify_seed"] if tag == "ir-verify" else self.t["pa"]["seed"]
        return bits_from_hex(entry, count)


def _abort(config: PipelineConfig, stage: str, reason: str, transcript: dict, inputs: dict,
           eps: tuple[float, float, float], extra: dict) -> PipelineResult:
    transcript["abort"] = {"stage": stage, "reason": reason}
    report = RateReport(config.protocol, inputs, eps_pe=eps[0], eps_cor=eps[1], eps_pa=eps[2],
                        length=0, abort=True, extra={**extra, "transcript": transcript})
    return PipelineResult(None, None, report, transcript)


def _execute(key_a: BitString, key_b: BitString, config: PipelineConfig, choices,
             extra: dict[str, Any]) -> PipelineResult:
    a, b = as_bits(key_a), as_bits(key_b)
    if len(a) != len(b):
        raise ValueError("Alice's and Bob's raw keys differ in length")
    N = len(a)
    eps_pe_share, eps_cor, eps_pa = config.eps_shares
    transcript: dict[str, Any] = {"config": config.to_dict()}
    inputs: dict[str, Any] = {"N": N, "lambda_max": config.lambda_max}
    k = int(round(config.sample_fraction * N))
    if k < 1 or N - k < 1:
        return _abort(config, "pe", "too few raw key bits to sample", transcript, inputs,
                      (eps_pe_share, eps_cor, eps_pa), extra)

    # parameter estimation on a uniformly random k-subset
    gamma = config.gamma if config.gamma is not None else gamma_for_epsilon(N, k, eps_pe_share)
    gamma = min(gamma, 1 - config.lambda_max)
    params = PeParams(N, k, config.lambda_max, gamma)
    idx, used = choices.subset(N, k)
    mask = np.zeros(N, dtype=bool)
    mask[idx] = True
    pe = estimate(a[mask], b[mask], params)
    eps = (pe_epsilon(params), eps_cor, eps_pa)
    transcript["pe"] = {"N": N, "k": k, "n": params.n, "sample_indices": idx.tolist(),
                        "subset_random_bits": used, "error_ratio": pe.error_ratio,
                        "gamma": gamma, "hmax_bound": pe.hmax_bound}
    inputs.update(k=k, n=params.n, gamma=gamma, error_ratio=pe.error_ratio)
    if pe.abort:
        return _abort(config, "pe", "sampled error ratio above threshold", transcript, inputs, eps, extra)
    rest_a, rest_b = a[~mask], b[~mask]

    # reconciliation sized from the estimated error ratio
    n = params.n
    m = checks_for_rate(n, pe.error_ratio, config.ir_efficiency, config.ir_margin)
    code_seed = choices.code_seed()
    code = regular_code(n, m, code_seed, config.column_weight) if m > 0 else None
    verify_seed = choices.bits("ir-verify", verification_seed_bits(n))
    ir = reconcile(rest_a, rest_b, code, eps_cor, verify_seed, qber=max(pe.error_ratio, 1e-3),
                   max_iter=config.max_iter)
    transcript["ir"] = {"code": {"n": n, "m": m, "seed": code_seed, "column_weight": config.column_weight},
                        "syndrome_bits": ir.syndrome_bits, "verify_bits": ir.verify_bits,
                        "verify_seed": bits_to_hex(verify_seed), "hash_alice": ir.hash_alice,
                        "hash_bob": ir.hash_bob, "converged": ir.converged, "iterations": ir.iterations,
                        "leak": ir.leak}
    if not ir.verified:
        return _abort(config, "ir", "verification hash mismatch or decoder stall", transcript, inputs, eps, extra)

    # privacy amplification
    fk = finite_key_length(pe, config.overlap, ir.leak, eps_pa, eps_cor)
    ell = fk.length
    family = gf_family(n, ell)
    pa_seed = choices.bits("pa-seed", family.seed_bits)
    transcript["pa"] = {"output_bits": ell, "seed": bits_to_hex(pa_seed), "hmin_bound": fk.hmin_bound}
    key_a = hash_gf(family, rest_a, pa_seed)
    key_b = hash_gf(family, ir.corrected, pa_seed)
    report = RateReport(config.protocol, inputs, hmin=fk.hmin_bound, hmax=pe.hmax_bound, leak=float(ir.leak),
                        eps_pe=eps[0], eps_cor=eps_cor, eps_pa=eps_pa, length=ell,
                        extra={**extra, "transcript": transcript})
    return PipelineResult(key_a, key_b, report, transcript)


def process_keys(key_a: BitString, key_b: BitString, config: PipelineConfig, seed: int) -> PipelineResult:
    """Run estimation, reconciliation and amplification on raw keys."""
    return _execute(key_a, key_b, config, _Drawn(seed), {"seed": int(seed)})


def run_pipeline(records: RoundRecords, config: PipelineConfig, seed: int) -> PipelineResult:
    """Post-process the sifted rounds of a simulation."""
    a, b = records.sifted_keys()
    return process_keys(a, b, config, seed)


def replay(key_a: BitString, key_b: BitString, transcript: dict[str, Any]) -> PipelineResult:
    """Recompute a session from its transcript instead of fresh randomness."""
    config = PipelineConfig.from_dict({**transcript["config"], "eps_split": tuple(transcript["config"]["eps_split"])})
    return _execute(key_a, key_b, config, _Replayed(transcript), {})

"""Prepare-and-measure simulators for BB84 and the six-state protocol."""

from __future__ import annotations

from typing import Any

import numpy as np

from ..rng import concat_fields, map_chunks
from ._batch import BASIS_NAMES, born_outcome, depolarize, prepare, threshold_detect
from .models import ConfigError, ProtocolConfig
from .records import NO_BIT, RoundRecords, SimulationResult


def _draw_bases(rng: np.random.Generator, n: int, n_bases: int, p_x: float) -> np.ndarray:
    if n_bases == 2:
        return (rng.random(n) < p_x).astype(np.int8)
    return rng.integers(0, n_bases, n, dtype=np.int8)


def _intercept_resend(rho, rng, n_bases, fraction):
    hit = rng.random(len(rho)) < fraction
    eve_basis = rng.integers(0, n_bases, len(rho), dtype=np.int8)
    eve_bit = born_outcome(rho, eve_basis, rng)
    resent = prepare(eve_basis, eve_bit)
    return np.where(hit[:, None, None], resent, rho)


def _chunk(cfg: ProtocolConfig, n_bases: int):
    def run(rng: np.random.Generator, start: int, stop: int) -> dict[str, np.ndarray]:
        n = stop - start
        a_basis = _draw_bases(rng, n, n_bases, cfg.p_x)
        a_bit = rng.integers(0, 2, n, dtype=np.int8)
        b_basis = _draw_bases(rng, n, n_bases, cfg.p_x)
        rho = prepare(a_basis, a_bit)
        if cfg.attack.kind == "intercept-resend":
            rho = _intercept_resend(rho, rng, n_bases, cfg.attack.fraction)
        elif cfg.attack.active:
            raise ConfigError(f"attack {cfg.attack.kind!r} is not defined for {cfg.protocol}")
        rho = depolarize(rho, cfg.channel.p)
        arrived = rng.random(n) < cfg.channel.eta
        outcome = born_outcome(rho, b_basis, rng)
        detected, b_bit = threshold_detect(outcome, arrived, cfg.detector, rng)
        return {
            "alice_bit": a_bit, "alice_basis": a_basis, "bob_bit": b_bit,
            "bob_basis": b_basis, "detected": detected, "sifted": detected & (a_basis == b_basis),
        }

    return run


def qber_summary(records: RoundRecords, n_bases: int) -> dict[str, Any]:
    n = len(records)
    sifted = records.sifted
    err = sifted & (records.alice_bit != records.bob_bit)
    n_sift = int(sifted.sum())
    per_basis: dict[str, float | None] = {}
    counts: dict[str, int] = {}
    for b in range(n_bases):
        m = sifted & (records.alice_basis == b)
        counts[BASIS_NAMES[b]] = int(m.sum())
        per_basis[BASIS_NAMES[b]] = float(err[m].sum() / m.sum()) if m.any() else None
    return {
        "rounds": n,
        "detection_rate": float(records.detected.mean()),
        "sifted": n_sift,
        "sifted_fraction": n_sift / n,
        "qber": float(err.sum() / n_sift) if n_sift else None,
        "qber_defined": bool(n_sift),
        "qber_per_basis": per_basis,
        "sifted_per_basis": counts,
    }


def _run(cfg: ProtocolConfig, n_bases: int, workers: int | None) -> SimulationResult:
    cols = concat_fields(map_chunks(_chunk(cfg, n_bases), cfg.rounds, cfg.seed, cfg.protocol, workers))
    records = RoundRecords(**cols)
    if np.any(records.bob_bit[~records.detected] != NO_BIT):
        raise AssertionError("undetected round carries a bit")
    return SimulationResult(records, qber_summary(records, n_bases))


def run_bb84(config: ProtocolConfig, workers: int | None = None) -> SimulationResult:
    """BB84 with basis bias p_x = P(X); attack acts before the channel."""
    return _run(config, 2, workers)


def run_sixstate(config: ProtocolConfig, workers: int | None = None) -> SimulationResult:
    """Six-state protocol with uniform Z/X/Y bases."""
    return _run(config, 3, workers)

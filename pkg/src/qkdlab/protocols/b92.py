"""B92 with Bob's three-outcome unambiguous-discrimination measurement.

Alice sends |0> for bit 0 and |+> for bit 1.  Outcomes 0 and 1 of the USD
POVM are conclusive detector clicks; "?" (and every no-click event) is
inconclusive.
"""

from __future__ import annotations

import numpy as np

from ..quantum import usd_povm
from ..rng import concat_fields, map_chunks
from ._batch import depolarize, prepare, threshold_detect
from .models import ConfigError, ProtocolConfig
from .records import NO_BIT, RoundRecords, SimulationResult

_USD = np.array(usd_povm().elements)  # F0, F1, F?


def _sample_usd(rho: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """0, 1 or 2 (inconclusive) per state."""
    p = np.real(np.einsum("kij,nji->nk", _USD, rho))
    cum = np.cumsum(p, axis=1)
    u = rng.random(len(rho))[:, None] * cum[:, -1:]
    return np.minimum((u >= cum).sum(axis=1), 2).astype(np.int8)


def _state_for_bit(bit: np.ndarray) -> np.ndarray:
    # bit 0 -> |0> (Z basis), bit 1 -> |+> (X basis)
    return prepare(np.asarray(bit), np.zeros(len(bit), dtype=np.int8))


def _chunk(cfg: ProtocolConfig):
    def run(rng: np.random.Generator, start: int, stop: int) -> dict[str, np.ndarray]:
        n = stop - start
        a_bit = rng.integers(0, 2, n, dtype=np.int8)
        rho = _state_for_bit(a_bit)
        present = np.ones(n, dtype=bool)
        if cfg.attack.kind == "usd":
            hit = rng.random(n) < cfg.attack.fraction
            eve = _sample_usd(rho, rng)
            conclusive = eve < 2
            resent = _state_for_bit(np.where(conclusive, eve, 0))
            rho = np.where((hit & conclusive)[:, None, None], resent, rho)
            # an inconclusive Eve sends vacuum
            present &= ~(hit & ~conclusive)
        elif cfg.attack.active:
            raise ConfigError(f"attack {cfg.attack.kind!r} is not defined for b92")
        rho = depolarize(rho, cfg.channel.p)
        arrived = present & (rng.random(n) < cfg.channel.eta)
        outcome = _sample_usd(rho, rng)
        # conclusive outcomes drive detectors D0 / D1; "?" is no click
        detected, b_bit = threshold_detect(outcome, arrived & (outcome < 2), cfg.detector, rng)
        return {
            "alice_bit": a_bit, "alice_basis": np.zeros(n, dtype=np.int8), "bob_bit": b_bit,
            "bob_basis": np.zeros(n, dtype=np.int8), "detected": detected, "sifted": detected.copy(),
        }

    return run


def run_b92(config: ProtocolConfig, workers: int | None = None) -> SimulationResult:
    cols = concat_fields(map_chunks(_chunk(config), config.rounds, config.seed, "b92", workers))
    records = RoundRecords(**cols)
    n = len(records)
    conclusive = records.sifted
    n_c = int(conclusive.sum())
    errors = int((records.alice_bit[conclusive] != records.bob_bit[conclusive]).sum())
    assert np.all(records.bob_bit[~conclusive] == NO_BIT)
    summary = {
        "rounds": n,
        "conclusive": n_c,
        "inconclusive_fraction": 1 - n_c / n,
        "detection_rate": float(records.detected.mean()),
        "sifted_fraction": n_c / n,
        "qber": errors / n_c if n_c else None,
        "qber_defined": bool(n_c),
    }
    return SimulationResult(records, summary)

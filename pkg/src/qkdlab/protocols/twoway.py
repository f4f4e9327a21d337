"""Two-way protocols: modified LM05 and super-dense-coding (SDC) QKD.

Both run through two channels with the same ChannelModel.  Pauli indices are
0=I, 1=X, 2=Y, 3=Z throughout.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..quantum import BELL, projector
from ..rng import concat_fields, map_chunks
from ._batch import (
    bell_measure,
    born_outcome,
    depolarize,
    kron_batch,
    measure_first_qubit,
    pauli_on_last,
    prepare,
    threshold_detect,
)
from .models import ConfigError, ProtocolConfig
from .records import NO_BIT, RoundRecords, SimulationResult

# LM05 encodings I, X, Y, Z carry the bit pairs 00, 10, 11, 01
LM05_BITS = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=np.int8)
# SDC encodings I, X, Y, Z carry the bit pairs 00, 01, 11, 10
SDC_BITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.int8)
_PHI_PLUS = projector(BELL["phi+"])


def _rate(mask: np.ndarray, err: np.ndarray) -> float | None:
    return float(err[mask].mean()) if mask.any() else None


def _swap(pair: np.ndarray) -> np.ndarray:
    return pair.reshape(-1, 2, 2, 2, 2).transpose(0, 2, 1, 4, 3).reshape(-1, 4, 4)


# ---------------------------------------------------------------------------
# LM05

def _lm05_chunk(cfg: ProtocolConfig):
    det, ch = cfg.detector, cfg.channel

    def run(rng: np.random.Generator, start: int, stop: int) -> dict[str, np.ndarray]:
        n = stop - start
        a_basis = (rng.random(n) < cfg.p_x).astype(np.int8)
        a_bit = rng.integers(0, 2, n, dtype=np.int8)
        encode = rng.random(n) < cfg.r
        k = rng.integers(0, 4, n, dtype=np.int8)
        if cfg.version == 1:
            b_basis = np.ones(n, dtype=np.int8)
        else:
            b_basis = (rng.random(n) < cfg.p_x_check).astype(np.int8)
        rho = prepare(a_basis, a_bit)

        # honest forward channel and Bob's action
        fwd = depolarize(rho, ch.p)
        arrived1 = rng.random(n) < ch.eta
        c = born_outcome(fwd, b_basis, rng)
        bob_det, bob_bit = threshold_detect(c, arrived1, det, rng)
        back = np.where(encode[:, None, None], pauli_on_last(fwd, k), prepare(b_basis, np.maximum(bob_bit, 0)))
        sent_back = np.where(encode, arrived1, bob_det)
        back = depolarize(back, ch.p)
        arrived2 = sent_back & (rng.random(n) < ch.eta)
        eve_k = np.full(n, -1, dtype=np.int8)

        if cfg.attack.kind == "entangle-resend":
            hit = rng.random(n) < cfg.attack.fraction
            # Eve stores Alice's qubit and sends half of |phi+> (ordered E2, E1) to Bob
            pair = np.broadcast_to(_PHI_PLUS, (n, 4, 4)).copy()
            e_c, e1_post = measure_first_qubit(pair, b_basis, rng)
            e_det, e_bob_bit = threshold_detect(e_c, np.ones(n, dtype=bool), det, rng)
            checked = _swap(kron_batch(prepare(b_basis, np.maximum(e_bob_bit, 0)), e1_post))
            # on |phi+> a Pauli on either half gives the same state up to phase
            returned = np.where(encode[:, None, None], pauli_on_last(pair, k), checked)
            guess = bell_measure(returned, rng)
            guess = np.where(encode | e_det, guess, 0).astype(np.int8)
            to_alice = pauli_on_last(rho, guess)
            back = np.where(hit[:, None, None], to_alice, back)
            bob_det = np.where(hit, e_det, bob_det)
            bob_bit = np.where(hit, e_bob_bit, bob_bit).astype(np.int8)
            arrived2 = np.where(hit, np.where(encode, True, e_det), arrived2)
            eve_k = np.where(hit, guess, -1).astype(np.int8)
        elif cfg.attack.active:
            raise ConfigError(f"attack {cfg.attack.kind!r} is not defined for lm05")

        m = born_outcome(back, a_basis, rng)
        alice_det, alice_out = threshold_detect(m, arrived2, det, rng)
        key_a = (a_bit ^ np.maximum(alice_out, 0)).astype(np.int8)
        key_b = LM05_BITS[k, a_basis]
        sifted = encode & alice_det
        return {
            "alice_bit": np.where(encode, key_a, a_bit).astype(np.int8),
            "alice_basis": a_basis,
            "bob_bit": np.where(encode, np.where(sifted, key_b, NO_BIT), bob_bit).astype(np.int8),
            "bob_basis": np.where(encode, a_basis, b_basis).astype(np.int8),
            "detected": np.where(encode, alice_det, bob_det),
            "sifted": sifted,
            "encode": encode, "k": k, "prep_bit": a_bit, "check_basis": b_basis,
            "bob_detected": bob_det, "bob_check_bit": bob_bit,
            "alice_detected": alice_det, "alice_out": alice_out, "eve_k": eve_k,
        }

    return run


def _split(cols: dict[str, np.ndarray], main: tuple[str, ...]) -> RoundRecords:
    return RoundRecords(**{c: cols[c] for c in main}, extra={c: v for c, v in cols.items() if c not in main})


_MAIN = ("alice_bit", "alice_basis", "bob_bit", "bob_basis", "detected", "sifted")


def lm05_summary(rec: RoundRecords) -> dict[str, Any]:
    x = rec.extra
    check = ~x["encode"]
    matched = check & x["bob_detected"] & (x["check_basis"] == rec.alice_basis)
    first_err = x["bob_check_bit"] != x["prep_bit"]
    second = matched & x["alice_detected"]
    second_err = x["alice_out"] != x["bob_check_bit"]
    q_g = {}
    for b, name in ((0, "Z"), (1, "X")):
        q_g[f"first_{name}"] = _rate(matched & (rec.alice_basis == b), first_err)
        q_g[f"second_{name}"] = _rate(second & (rec.alice_basis == b), second_err)
    sifted = rec.sifted
    hit = x["eve_k"] >= 0
    eve_rounds = hit & x["encode"]
    return {
        "rounds": len(rec),
        "key_rounds": int(sifted.sum()),
        "check_rounds": int(check.sum()),
        "q_F": _rate(sifted, rec.alice_bit != rec.bob_bit),
        "q_G": q_g,
        "first_channel_checks": int(matched.sum()),
        "eve_encoding_success": _rate(eve_rounds, x["eve_k"] == x["k"]),
        "bits_per_key_round": 1,
    }


def run_lm05(config: ProtocolConfig, workers: int | None = None) -> SimulationResult:
    """Modified LM05.  Version 1 checks in X, version 2 in X or Z."""
    cols = concat_fields(map_chunks(_lm05_chunk(config), config.rounds, config.seed, "lm05", workers))
    rec = _split(cols, _MAIN)
    return SimulationResult(rec, lm05_summary(rec))


# ---------------------------------------------------------------------------
# SDC

def _sdc_chunk(cfg: ProtocolConfig):
    det, ch = cfg.detector, cfg.channel

    def run(rng: np.random.Generator, start: int, stop: int) -> dict[str, np.ndarray]:
        n = stop - start
        pair = np.broadcast_to(_PHI_PLUS, (n, 4, 4)).copy()  # (memory, travel)
        if cfg.attack.active:
            raise ConfigError(f"attack {cfg.attack.kind!r} is not defined for sdc")
        pair = depolarize(pair, ch.p)
        arrived1 = rng.random(n) < ch.eta

        bob_encode = rng.random(n) < cfg.r
        k = rng.integers(0, 4, n, dtype=np.int8)
        c, mem_post = measure_first_qubit(_swap(pair), np.zeros(n, dtype=np.int8), rng)
        bob_det, bob_z = threshold_detect(c, arrived1, det, rng)
        x_prep = rng.integers(0, 2, n, dtype=np.int8)
        checked = kron_batch(mem_post, prepare(np.ones(n, dtype=np.int8), x_prep))
        pair = np.where(bob_encode[:, None, None], pauli_on_last(pair, k), checked)
        sent = np.where(bob_encode, arrived1, bob_det)
        pair = depolarize(pair, ch.p)
        arrived2 = sent & (rng.random(n) < ch.eta)

        alice_bell = rng.random(n) < cfg.r
        decoded = bell_measure(pair, rng)
        bell_det = arrived2 & (rng.random(n) < det.efficiency)
        z_a, travel_post = measure_first_qubit(pair, np.zeros(n, dtype=np.int8), rng)
        x_raw = born_outcome(travel_post, np.ones(n, dtype=np.int8), rng)
        x_det, x_a = threshold_detect(x_raw, arrived2, det, rng)
        alice_det = np.where(alice_bell, bell_det, x_det)

        sifted = bob_encode & alice_bell & alice_det
        sym_b = SDC_BITS[k] @ np.array([2, 1], dtype=np.int8)
        sym_a = SDC_BITS[decoded] @ np.array([2, 1], dtype=np.int8)
        return {
            "alice_bit": np.where(alice_bell, sym_a, z_a).astype(np.int8),
            "alice_basis": np.where(alice_bell, 3, 0).astype(np.int8),
            "bob_bit": np.where(bob_encode, np.where(sifted, sym_b, NO_BIT), bob_z).astype(np.int8),
            "bob_basis": np.where(bob_encode, 3, 0).astype(np.int8),
            "detected": np.where(bob_encode, alice_det, bob_det),
            "sifted": sifted,
            "bob_encode": bob_encode, "alice_bell": alice_bell, "k": k,
            "bob_detected": bob_det, "bob_z": bob_z, "x_prep": x_prep,
            "alice_detected": alice_det, "alice_z": z_a, "alice_x": x_a,
        }

    return run


def _four_way(mask: np.ndarray, e1: np.ndarray, e2: np.ndarray) -> list[float] | None:
    if not mask.any():
        return None
    a, b = e1[mask], e2[mask]
    return [float(np.mean(~a & ~b)), float(np.mean(a & ~b)), float(np.mean(~a & b)), float(np.mean(a & b))]


def sdc_summary(rec: RoundRecords) -> dict[str, Any]:
    x = rec.extra
    key = rec.sifted
    bits_a = np.stack([(rec.alice_bit >> 1) & 1, rec.alice_bit & 1], axis=1)
    bits_b = np.stack([(np.maximum(rec.bob_bit, 0) >> 1) & 1, np.maximum(rec.bob_bit, 0) & 1], axis=1)
    check = ~x["bob_encode"] & ~x["alice_bell"] & x["bob_detected"] & x["alice_detected"]
    return {
        "rounds": len(rec),
        "key_rounds": int(key.sum()),
        "check_rounds": int(check.sum()),
        "q_F": _four_way(key, bits_a[:, 0] != bits_b[:, 0], bits_a[:, 1] != bits_b[:, 1]),
        "q_G": _four_way(check, x["alice_z"] != x["bob_z"], x["alice_x"] != x["x_prep"]),
        "bits_per_key_round": 2,
    }


def run_sdc(config: ProtocolConfig, workers: int | None = None) -> SimulationResult:
    cols = concat_fields(map_chunks(_sdc_chunk(config), config.rounds, config.seed, "sdc", workers))
    rec = _split(cols, _MAIN)
    return SimulationResult(rec, sdc_summary(rec))

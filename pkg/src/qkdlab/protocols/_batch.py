"""Vectorised single- and two-qubit operations on stacks of density matrices."""

from __future__ import annotations

import numpy as np

from ..quantum import BASES, BELL, PAULI_X, PAULI_Y, PAULI_Z
from .models import DetectorModel

# basis index -> basis name; 0 = Z, 1 = X, 2 = Y
BASIS_NAMES = ("Z", "X", "Y")
_BASIS_VECS = np.array([BASES[b] for b in BASIS_NAMES])  # (3, 2, 2), columns are eigenvectors
_EIG_PROJ = np.einsum("bik,bjk->bkij", _BASIS_VECS, _BASIS_VECS.conj())  # (basis, bit, 2, 2)
PAULI_STACK = np.array([np.eye(2), PAULI_X, PAULI_Y, PAULI_Z], dtype=complex)  # I, X, Y, Z
# Bell states in the order phi+, psi+, phi-, psi-: (1 (x) sigma)|phi+> for sigma = I, X, Z, Y
BELL_STACK = np.array([BELL["phi+"], BELL["psi+"], BELL["phi-"], BELL["psi-"]])
BELL_TO_PAULI = np.array([0, 1, 3, 2])  # Bell index -> index into PAULI_STACK


def prepare(basis: np.ndarray, bit: np.ndarray) -> np.ndarray:
    """Eigenstates |bit>_basis as an (N, 2, 2) stack."""
    return _EIG_PROJ[np.asarray(basis), np.asarray(bit)].copy()


def depolarize(rho: np.ndarray, p: float) -> np.ndarray:
    """p rho + (1-p) Tr(rho) 1/2 on the last qubit of each state."""
    if p == 1.0:
        return rho
    d = rho.shape[-1]
    if d == 2:
        tr = np.einsum("nii->n", rho)
        return p * rho + (1 - p) * tr[:, None, None] * np.eye(2) / 2
    r = rho.reshape(-1, d // 2, 2, d // 2, 2)
    reduced = np.einsum("naibi->nab", r)
    mixed = np.einsum("nab,ij->naibj", reduced, np.eye(2) / 2).reshape(rho.shape)
    return p * rho + (1 - p) * mixed


def conjugate(rho: np.ndarray, ops: np.ndarray) -> np.ndarray:
    return ops @ rho @ np.conj(np.swapaxes(ops, -1, -2))


def pauli_on_last(rho: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Apply Pauli index k (0=I, 1=X, 2=Y, 3=Z) to the last qubit."""
    ops = PAULI_STACK[np.asarray(k)]
    d = rho.shape[-1]
    if d == 4:
        ops = np.einsum("ij,nkl->nikjl", np.eye(2), ops).reshape(-1, 4, 4)
    return conjugate(rho, ops)


def born_outcome(rho: np.ndarray, basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample a projective measurement of single qubits in the given bases."""
    p0 = np.real(np.einsum("nij,nji->n", _EIG_PROJ[np.asarray(basis), 0], rho))
    tr = np.real(np.einsum("nii->n", rho))
    return (rng.random(len(rho)) * tr >= p0).astype(np.int8)


def measure_first_qubit(rho: np.ndarray, basis: np.ndarray, rng: np.random.Generator):
    """Measure qubit 0 of two-qubit states; return outcomes and the qubit-1 post-states."""
    proj = _EIG_PROJ[np.asarray(basis)]  # (N, 2, 2, 2)
    r = rho.reshape(-1, 2, 2, 2, 2)
    # unnormalised conditional state of qubit 1 for each outcome
    cond = np.einsum("nkab,nbiaj->nkij", proj, r)
    p = np.real(np.einsum("nkii->nk", cond))
    out = (rng.random(len(rho)) * p.sum(axis=1) >= p[:, 0]).astype(np.int8)
    post = cond[np.arange(len(rho)), out]
    post = post / np.real(np.einsum("nii->n", post))[:, None, None]
    return out, post


def bell_measure(rho: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample a Bell measurement; returns Pauli indices (0=I, 1=X, 2=Y, 3=Z)."""
    p = np.real(np.einsum("bi,nij,bj->nb", BELL_STACK.conj(), rho, BELL_STACK))
    cum = np.cumsum(p, axis=1)
    u = rng.random(len(rho))[:, None] * cum[:, -1:]
    idx = np.minimum((u >= cum).sum(axis=1), 3)
    return BELL_TO_PAULI[idx]


def kron_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("nij,nkl->nikjl", a, b).reshape(len(a), a.shape[1] * b.shape[1], -1)


def threshold_detect(
    outcome: np.ndarray,
    arrived: np.ndarray,
    det: DetectorModel,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Two threshold detectors with efficiency, dark counts and double clicks.

    Returns (detected, bit); bit is -1 where nothing was registered.
    """
    n = len(outcome)
    real = arrived & (rng.random(n) < det.efficiency)
    c0 = (real & (outcome == 0)) | (rng.random(n) < det.dark_count)
    c1 = (real & (outcome == 1)) | (rng.random(n) < det.dark_count)
    double = c0 & c1
    coin = rng.integers(0, 2, n, dtype=np.int8)
    bit = np.where(c1 & ~c0, 1, np.where(c0 & ~c1, 0, -1)).astype(np.int8)
    if det.double_click_policy == "random-bit":
        bit = np.where(double, coin, bit).astype(np.int8)
        detected = c0 | c1
    else:
        detected = (c0 | c1) & ~double
    return detected, bit

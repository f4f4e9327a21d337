"""The CHSH game: referee draws x, y; the players win iff a xor b = x and y."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..quantum import BELL, PAULI_X, PAULI_Z, Povm, projector

QUANTUM_ANGLES = ((0.0, np.pi / 2), (np.pi / 4, -np.pi / 4))


def angle_povm(theta: float) -> Povm:
    """Projective measurement of cos(theta) Z + sin(theta) X; outcome 0 is the +1 eigenvalue."""
    obs = np.cos(theta) * PAULI_Z + np.sin(theta) * PAULI_X
    plus = (np.eye(2) + obs) / 2
    return Povm((plus, np.eye(2) - plus), (0, 1))


@dataclass(frozen=True)
class ChshStrategy:
    """``kind`` is "deterministic", "random" or "quantum".

    Deterministic strategies give Alice's outputs for x = 0, 1 in ``alice``
    and Bob's for y = 0, 1 in ``bob``.  Quantum strategies measure ``state``
    (a two-qubit density matrix) with angle observables.
    """

    kind: str
    alice: tuple[int, int] = (0, 0)
    bob: tuple[int, int] = (0, 0)
    state: np.ndarray | None = field(default=None, compare=False)
    alice_angles: tuple[float, float] = QUANTUM_ANGLES[0]
    bob_angles: tuple[float, float] = QUANTUM_ANGLES[1]

    def __post_init__(self):
        if self.kind not in ("deterministic", "random", "quantum"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "quantum":
            if self.state is None:
                object.__setattr__(self, "state", projector(BELL["phi+"]))
            for t in (*self.alice_angles, *self.bob_angles):
                angle_povm(t)  # validates the measurement

    def joint_probabilities(self) -> np.ndarray:
        """P[x, y, a, b]."""
        p = np.zeros((2, 2, 2, 2))
        for x in range(2):
            for y in range(2):
                if self.kind == "deterministic":
                    p[x, y, self.alice[x], self.bob[y]] = 1
                elif self.kind == "random":
                    p[x, y] = 0.25
                else:
                    fa = angle_povm(self.alice_angles[x]).elements
                    fb = angle_povm(self.bob_angles[y]).elements
                    for a in range(2):
                        for b in range(2):
                            p[x, y, a, b] = np.real(np.trace(np.kron(fa[a], fb[b]) @ self.state))
        return p

    def win_probability(self) -> float:
        p = self.joint_probabilities()
        return float(sum(0.25 * p[x, y, a, b] for x in range(2) for y in range(2)
                         for a in range(2) for b in range(2) if (a ^ b) == (x & y)))

    def chsh_value(self) -> float:
        """I = sum of correlators with the (1,1) term negated; I = 8 P_win - 4."""
        p = self.joint_probabilities()
        corr = p[..., 0, 0] + p[..., 1, 1] - p[..., 0, 1] - p[..., 1, 0]
        return float(corr[0, 0] + corr[0, 1] + corr[1, 0] - corr[1, 1])


def play_chsh(strategy: ChshStrategy, trials: int, rng: np.random.Generator) -> float:
    """Empirical win frequency over ``trials`` rounds."""
    if trials < 1:
        raise ValueError("need at least one trial")
    x = rng.integers(0, 2, trials)
    y = rng.integers(0, 2, trials)
    table = strategy.joint_probabilities().reshape(2, 2, 4)
    cum = np.cumsum(table[x, y], axis=1)
    u = rng.random(trials)[:, None]
    ab = np.minimum((u >= cum).sum(axis=1), 3)
    a, b = ab >> 1, ab & 1
    return float(np.mean((a ^ b) == (x & y)))

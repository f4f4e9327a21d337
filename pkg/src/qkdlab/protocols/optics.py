"""Optical primitives on truncated Fock spaces: coherent states, beamsplitters,
and the unbalanced Mach-Zehnder interferometer used for time-bin qubits."""

from __future__ import annotations

import math

import numpy as np

from ..quantum import Povm

DEFAULT_CUTOFF = 10


def coherent_amplitudes(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Fock amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    n = np.arange(cutoff + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    mag = np.exp(-abs(alpha) ** 2 / 2 - 0.5 * log_fact) * abs(alpha) ** n
    return mag * np.exp(1j * np.angle(alpha) * n)


def photon_number_dist(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> np.ndarray:
    """Poisson weights with mean |alpha|^2, truncated at ``cutoff``."""
    return np.abs(coherent_amplitudes(alpha, cutoff)) ** 2


def truncation_error(alpha: complex, cutoff: int = DEFAULT_CUTOFF) -> float:
    return float(max(0.0, 1.0 - photon_number_dist(alpha, cutoff).sum()))


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<beta|alpha> = exp(-|a|^2/2 - |b|^2/2 + conj(b) a)."""
    return complex(np.exp(-abs(alpha) ** 2 / 2 - abs(beta) ** 2 / 2 + np.conj(beta) * alpha))


def _check_beamsplitter(t: complex, r: complex) -> None:
    if abs(abs(t) ** 2 + abs(r) ** 2 - 1) > 1e-10 or abs(r * np.conj(t) + t * np.conj(r)) > 1e-10:
        raise ValueError("beamsplitter coefficients must satisfy |T|^2+|R|^2=1 and RT*+TR*=0")


def beamsplitter_transform(t: complex, r: complex, state: np.ndarray) -> np.ndarray:
    """Apply a1+ -> T a3+ + R a4+, a2+ -> R a3+ + T a4+ to a two-mode state.

    ``state[n, m]`` is the amplitude of |n, m>.  The output array is large
    enough to hold every photon number the input can produce, so the map is
    exact on the truncated input.
    """
    _check_beamsplitter(t, r)
    state = np.asarray(state, dtype=complex)
    d1, d2 = state.shape
    dout = d1 + d2 - 1
    out = np.zeros((dout, dout), dtype=complex)
    fact = [math.factorial(k) for k in range(dout)]
    for n in range(d1):
        for m in range(d2):
            amp = state[n, m]
            if amp == 0:
                continue
            norm = amp / math.sqrt(fact[n] * fact[m])
            for j in range(n + 1):
                for l in range(m + 1):
                    p, q = j + l, (n - j) + (m - l)
                    coeff = math.comb(n, j) * math.comb(m, l) * t ** j * r ** (n - j) * r ** l * t ** (m - l)
                    out[p, q] += norm * coeff * math.sqrt(fact[p] * fact[q])
    return out


def two_mode(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


MZ_LABELS = ("D0-early", "D1-early", "D0-centre", "D1-centre", "D0-late", "D1-late")


def mz_interferometer_povm(phi: float = 0.0) -> Povm:
    """Time-bin analyser on span{|first>, |second>}.

    Each input bin splits between the short and long arm, so clicks land in
    three slots.  The early and late slots reveal the bin; the centre slot
    projects onto (|first> +- e^{i phi}|second>)/sqrt(2).
    """
    first, second = np.eye(2, dtype=complex)
    plus = (first + np.exp(1j * phi) * second) / np.sqrt(2)
    minus = (first - np.exp(1j * phi) * second) / np.sqrt(2)
    elements = (
        0.25 * np.outer(first, first),
        0.25 * np.outer(first, first),
        0.5 * np.outer(plus, plus.conj()),
        0.5 * np.outer(minus, minus.conj()),
        0.25 * np.outer(second, second),
        0.25 * np.outer(second, second),
    )
    return Povm(elements, MZ_LABELS)

"""Classical and quantum entropies in bits.

The conditional min-entropy is computed by a log-barrier Newton method on

    minimise Tr(sigma_B)  subject to  1_A (x) sigma_B - rho_AB >= 0,

which keeps every iterate strictly feasible.  The returned value is always
backed by a primal certificate (a feasible sigma_B, re-checked by an
eigenvalue computation) and a dual certificate, so ``EntropyResult.bounds``
is a rigorous interval up to floating point error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .quantum import (
    DensityOperator,
    StateLike,
    _hermitize,
    _mat,
    as_density,
    hermitian_basis,
    partial_trace,
    partial_trace_matrix,
    projector,
    sqrtm_psd,
    trace_norm,
)

EIG_DROP = 1e-14
FEASIBILITY_TOL = 1e-8


class SolverError(RuntimeError):
    """The min-entropy solver ran out of iterations.

    ``best_bound`` is the best certified lower bound on the entropy found.
    """

    def __init__(self, message: str, best_bound: float):
        super().__init__(f"{message} (best certified bound {best_bound:.6g} bits)")
        self.best_bound = best_bound


@dataclass(frozen=True)
class EntropyResult:
    value: float
    certificate: Any = None
    bounds: tuple[float, float] | None = None
    info: dict = field(default_factory=dict, compare=False)

    def __float__(self) -> float:
        return self.value


def _probs(d: Sequence[float], tol: float = 1e-9) -> np.ndarray:
    p = np.asarray(d, dtype=float).reshape(-1)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    s = p.sum()
    if not (0 < s <= 1 + 1e-12) and abs(s - 1) > tol:
        raise ValueError(f"probabilities sum to {s}")
    return p


def shannon(d: Sequence[float]) -> float:
    """Shannon entropy of a normalised distribution, 0 log 0 = 0."""
    p = _probs(d)
    if abs(p.sum() - 1) > 1e-9:
        raise ValueError(f"distribution not normalised (sum {p.sum():.12g})")
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError("binary entropy needs p in [0, 1]")
    if p == 0 or p == 1:
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def h4(q: Sequence[float]) -> float:
    """Shannon entropy of a four-outcome distribution."""
    if len(q) != 4:
        raise ValueError("h4 takes exactly four probabilities")
    return shannon(q)


def hmin_classical(d: Sequence[float]) -> float:
    p = _probs(d)
    return float(-math.log2(p.max()))


def hmax_classical_support(d: Sequence[float]) -> float:
    p = _probs(d)
    return float(math.log2(np.count_nonzero(p)))


def hmax_classical_conditional(joint: np.ndarray) -> float:
    """max_y log |supp P_{X|Y=y}| for a joint table indexed [x, y]."""
    joint = np.asarray(joint, dtype=float)
    supports = [(joint[:, y] > 0).sum() for y in range(joint.shape[1]) if joint[:, y].sum() > 0]
    return float(math.log2(max(supports)))


# ---------------------------------------------------------------------------
# von Neumann family

def _split(rho: DensityOperator, a: Sequence[int], b: Sequence[int] | None):
    a = list(a)
    b = [i for i in range(len(rho.dims)) if i not in a] if b is None else list(b)
    if set(a) & set(b):
        raise ValueError("conditioning systems overlap")
    return a, b


def von_neumann(rho: StateLike) -> float:
    w = np.linalg.eigvalsh(_hermitize(_mat(rho)))
    w = w[w > EIG_DROP]
    return float(-np.sum(w * np.log2(w)))


def conditional_vn(rho: StateLike, a: Sequence[int] = (0,), b: Sequence[int] | None = None) -> float:
    """H(A|B) = H(AB) - H(B)."""
    r = as_density(rho)
    a, b = _split(r, a, b)
    ab = partial_trace(r, sorted(a + b)) if len(a + b) < len(r.dims) else r
    return von_neumann(ab) - (von_neumann(partial_trace(r, b)) if b else 0.0)


def mutual_information(rho: StateLike, a: Sequence[int] = (0,), b: Sequence[int] | None = None) -> float:
    r = as_density(rho)
    a, b = _split(r, a, b)
    return von_neumann(partial_trace(r, a)) - conditional_vn(r, a, b)


def holevo(ensemble: Sequence[tuple[float, StateLike]]) -> float:
    probs = _probs([p for p, _ in ensemble])
    mats = [_mat(s) for _, s in ensemble]
    avg = sum(p * m for p, m in zip(probs, mats))
    return von_neumann(avg) - float(sum(p * von_neumann(m) for p, m in zip(probs, mats)))


# ---------------------------------------------------------------------------
# Min- and max-entropy

def hmin_cq_binary(ensemble: Sequence[tuple[float, StateLike]]) -> EntropyResult:
    """Guessing entropy of a binary classical variable via the Helstrom measurement."""
    if len(ensemble) != 2:
        raise ValueError("hmin_cq_binary needs exactly two ensemble entries")
    (p0, r0), (p1, r1) = ensemble
    diff = _hermitize(p0 * _mat(r0) - p1 * _mat(r1))
    w, v = np.linalg.eigh(diff)
    pos = v[:, w > 0]
    proj0 = pos @ pos.conj().T
    pguess = 0.5 * (p0 + p1) + 0.5 * trace_norm(diff)
    return EntropyResult(-math.log2(pguess), certificate=(proj0, np.eye(diff.shape[0]) - proj0), info={"p_guess": pguess})


def _min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_hermitize(m))[0])


def _solve_hmin(rho: np.ndarray, d_a: int, d_b: int, tol: float, max_newton: int):
    """Barrier method; returns (sigma, dual X, newton steps)."""
    n = d_a * d_b
    basis = hermitian_basis(d_b)
    lifted = np.array([np.kron(np.eye(d_a), h) for h in basis])
    traces = np.real(np.einsum("kii->k", basis))
    scale = max(float(np.linalg.eigvalsh(rho)[-1]), 1e-300)
    rho = rho / scale

    sigma = 2.0 * np.eye(d_b, dtype=complex)
    x = np.real(np.einsum("kij,ji->k", basis, sigma))
    t = 1.0
    steps = 0
    while True:
        for _ in range(100):
            sig = np.einsum("k,kij->ij", x, basis)
            m = np.kron(np.eye(d_a), sig) - rho
            minv = np.linalg.inv(m)
            mk = minv @ lifted
            grad = t * traces - np.real(np.einsum("kii->k", mk))
            flat = mk.reshape(len(x), -1)
            hess = np.real(flat @ mk.transpose(0, 2, 1).reshape(len(x), -1).T)
            step = -np.linalg.solve(hess + 1e-14 * np.eye(len(x)), grad)
            decrement = -grad @ step
            steps += 1
            if steps > max_newton:
                raise StopIteration
            if decrement / 2 < 1e-12:
                break
            alpha = 1.0
            f0 = t * traces @ x - np.linalg.slogdet(m)[1]
            while True:
                xn = x + alpha * step
                mn = np.kron(np.eye(d_a), np.einsum("k,kij->ij", xn, basis)) - rho
                ok = True
                try:
                    np.linalg.cholesky(_hermitize(mn))
                except np.linalg.LinAlgError:
                    ok = False
                if ok and t * traces @ xn - np.linalg.slogdet(mn)[1] <= f0 - 0.25 * alpha * decrement:
                    break
                alpha *= 0.5
                if alpha < 1e-12:
                    break
            if alpha < 1e-12:
                break
            x = xn
        if n / t < tol:
            break
        t *= 8.0
    sig = np.einsum("k,kij->ij", x, basis)
    m = np.kron(np.eye(d_a), sig) - rho
    dual = np.linalg.inv(m) / t
    return _hermitize(sig) * scale, _hermitize(dual), steps


def _reduce(rho: StateLike, a: Sequence[int], b: Sequence[int] | None):
    """Reduced matrix on A (x) B with A first, plus the two dimensions."""
    r = as_density(rho)
    a, b = _split(r, a, b)
    kept = sorted(a + b)
    m = partial_trace_matrix(r.matrix, r.dims, kept)
    dims = [r.dims[i] for i in kept]
    perm = [kept.index(i) for i in a + b]
    k = len(kept)
    m = m.reshape(dims + dims).transpose(perm + [p + k for p in perm])
    d_a = int(np.prod([r.dims[i] for i in a]))
    d_b = int(np.prod([r.dims[i] for i in b])) if b else 1
    return np.asarray(m, dtype=complex).reshape(d_a * d_b, d_a * d_b), d_a, d_b


def hmin_quantum(
    rho: StateLike,
    a: Sequence[int] = (0,),
    b: Sequence[int] | None = None,
    tol: float = 1e-9,
    max_newton: int = 5000,
) -> EntropyResult:
    """Conditional min-entropy H_min(A|B) with primal and dual certificates.

    ``certificate`` is the optimal (feasible) sigma_B; ``bounds`` is the
    certified interval [lower, upper] for the entropy.
    """
    m, d_a, d_b = _reduce(rho, a, b)
    if d_b > 8:
        raise ValueError(f"conditioning system of dimension {d_b} is beyond desk scale")
    m = _hermitize(m)
    if d_b == 1:
        lam = float(np.linalg.eigvalsh(m)[-1])
        return EntropyResult(-math.log2(lam), certificate=np.array([[lam]]), bounds=(-math.log2(lam), -math.log2(lam)))
    try:
        sigma, dual, steps = _solve_hmin(m, d_a, d_b, tol, max_newton)
    except StopIteration:
        lam = float(np.linalg.eigvalsh(m)[-1])
        raise SolverError("min-entropy barrier method did not converge", -math.log2(lam * d_b)) from None

    # Polish: shrink sigma to the smallest feasible multiple of itself.
    s_inv_half = np.kron(np.eye(d_a), np.linalg.pinv(sqrtm_psd(sigma), rcond=1e-12, hermitian=True))
    scale = float(np.linalg.eigvalsh(_hermitize(s_inv_half @ m @ s_inv_half))[-1])
    if 0 < scale < 1 and _min_eig(np.kron(np.eye(d_a), scale * sigma) - m) >= -FEASIBILITY_TOL * 1e-2:
        sigma = scale * sigma
    primal = float(np.real(np.trace(sigma)))
    feas = _min_eig(np.kron(np.eye(d_a), sigma) - m)
    if feas < -FEASIBILITY_TOL:
        raise SolverError(f"certificate failed feasibility re-check ({feas:.3g})", -math.log2(primal))

    # Dual certificate: X >= 0 with Tr_A X = 1_B gives Tr(X rho) <= optimum.
    y = partial_trace_matrix(dual, (d_a, d_b), [1])
    w, v = np.linalg.eigh(_hermitize(y))
    y_inv_half = (v / np.sqrt(np.clip(w, 1e-300, None))) @ v.conj().T
    xn = np.kron(np.eye(d_a), y_inv_half) @ dual @ np.kron(np.eye(d_a), y_inv_half)
    dual_val = float(np.real(np.trace(xn @ m)))
    lower = -math.log2(primal)
    upper = -math.log2(dual_val) if dual_val > 0 else math.inf
    return EntropyResult(
        lower,
        certificate=sigma,
        bounds=(lower, upper),
        info={"newton_steps": steps, "min_eig": feas, "primal": primal, "dual": dual_val},
    )


def hmax_quantum(
    rho: StateLike,
    a: Sequence[int] = (0,),
    b: Sequence[int] | None = None,
    tol: float = 1e-9,
) -> EntropyResult:
    """H_max(A|B) = -H_min(A|C) for a purification on ABC."""
    m, d_a, d_b = _reduce(rho, a, b)
    w, v = np.linalg.eigh(_hermitize(m))
    keep = w > EIG_DROP
    w, v = w[keep], v[:, keep]
    d_c = len(w)
    # |psi> = sum_i sqrt(w_i) |v_i>_{AB} |i>_C, then drop B.
    psi = (v * np.sqrt(w)).reshape(d_a, d_b, d_c)
    rho_ac = np.einsum("abc,dbe->acde", psi, psi.conj()).reshape(d_a * d_c, d_a * d_c)
    res = hmin_quantum(DensityOperator(_hermitize(rho_ac), (d_a, d_c)), tol=tol)
    lo, hi = res.bounds
    return EntropyResult(-res.value, certificate=res.certificate, bounds=(-hi, -lo), info={"purifier_dim": d_c, **res.info})


def hmax_direct(rho: StateLike, sigma_b: np.ndarray, a: Sequence[int] = (0,), b: Sequence[int] | None = None) -> float:
    """log ||sqrt(rho_AB) sqrt(1_A (x) sigma_B)||_1^2 for a given sigma_B."""
    m, d_a, _ = _reduce(rho, a, b)
    val = trace_norm(sqrtm_psd(m) @ np.kron(np.eye(d_a), sqrtm_psd(sigma_b)))
    return float(2 * math.log2(val))


def guessing_probability(ensemble: Sequence[tuple[float, StateLike]]) -> float:
    """2^-Hmin(X|B) for a classical-quantum ensemble (any number of entries)."""
    d = _mat(ensemble[0][1]).shape[0]
    k = len(ensemble)
    cq = np.zeros((k * d, k * d), dtype=complex)
    for i, (p, s) in enumerate(ensemble):
        cq[i * d:(i + 1) * d, i * d:(i + 1) * d] = p * _mat(s)
    res = hmin_quantum(DensityOperator(cq, (k, d)))
    return 2.0 ** (-res.value)


__all__ = [
    "EntropyResult",
    "SolverError",
    "binary_entropy",
    "conditional_vn",
    "guessing_probability",
    "h4",
    "hmax_classical_conditional",
    "hmax_classical_support",
    "hmax_direct",
    "hmax_quantum",
    "hmin_classical",
    "hmin_cq_binary",
    "hmin_quantum",
    "holevo",
    "mutual_information",
    "projector",
    "shannon",
    "von_neumann",
]

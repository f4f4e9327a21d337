"""Squashing-map feasibility.

A squashing map Lambda from the full optical space F to a qubit space Q must
satisfy Lambda^dagger(F_i^Q) = F_i for every outcome.  With T the CJ matrix
of Lambda on Q (x) F (output first, Tr_Q T = 1_F), this reads

    F_i = (Tr_Q[(F_i^Q (x) 1) T])^T,

an affine slice of Hermitian matrices.  A map exists iff the slice meets the
PSD cone.  We maximise lambda_min(T) over the slice with a barrier method;
the central path yields both a primal T and a dual matrix W (W >= 0,
Tr W = 1, W orthogonal to the slice directions) whose value Tr(W T_0) bounds
the maximum from above.  Verdicts rest on those two certificates only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quantum import BASES, Povm, _hermitize, hermitian_basis, partial_trace_matrix

FEASIBLE_TOL = 1e-8
INFEASIBLE_TOL = 1e-6
RESIDUAL_TOL = 1e-8
NOISE_TOL = 1e-3


class SquashError(RuntimeError):
    pass


@dataclass(frozen=True)
class SquashProblem:
    """Target POVM on Q and full POVM on F with matched outcome order.

    ``groups`` partitions the outcomes for the noise model: noise weight
    lambda replaces each full element by its group average.  ``None`` means
    one group holding every outcome.
    """

    target: Povm
    full: Povm
    groups: tuple[tuple[int, ...], ...] | None = None
    name: str = "custom"

    def __post_init__(self):
        if len(self.target.elements) != len(self.full.elements):
            raise ValueError("target and full POVMs need the same number of outcomes")
        if self.groups is not None:
            flat = sorted(i for g in self.groups for i in g)
            if flat != list(range(len(self.full.elements))):
                raise ValueError("groups must partition the outcomes")

    @property
    def d_q(self) -> int:
        return self.target.dim

    @property
    def d_f(self) -> int:
        return self.full.dim

    def with_noise(self, lam: float) -> "SquashProblem":
        if not 0 <= lam <= 1:
            raise ValueError("noise weight must lie in [0, 1]")
        groups = self.groups or (tuple(range(len(self.full.elements))),)
        els = list(self.full.elements)
        noisy = [None] * len(els)
        for g in groups:
            avg = sum(els[i] for i in g) / len(g)
            for i in g:
                noisy[i] = (1 - lam) * els[i] + lam * avg
        return SquashProblem(self.target, Povm(tuple(noisy), self.full.labels), self.groups,
                             f"{self.name}+noise({lam:.6g})")


# ---------------------------------------------------------------------------
# Constraints

def constraint_images(problem: SquashProblem, t: np.ndarray) -> list[np.ndarray]:
    """[(Tr_Q[(F_i^Q (x) 1) T])^T for each i] + [Tr_Q T]."""
    dq, df = problem.d_q, problem.d_f
    eye_f = np.eye(df)
    out = [partial_trace_matrix(np.kron(fq, eye_f) @ t, (dq, df), [1]).T for fq in problem.target.elements]
    out.append(partial_trace_matrix(t, (dq, df), [1]))
    return out


def constraint_targets(problem: SquashProblem) -> list[np.ndarray]:
    return [np.asarray(f) for f in problem.full.elements] + [np.eye(problem.d_f)]


def _coords(mats: Sequence[np.ndarray], basis: np.ndarray) -> np.ndarray:
    return np.concatenate([np.real(np.einsum("kij,ji->k", basis, m)) for m in mats])


@dataclass(frozen=True)
class AffineSlice:
    """T = T0 + sum_j x_j B_j with B_j Hilbert-Schmidt orthonormal and orthogonal to T0."""

    t0: np.ndarray
    directions: np.ndarray
    residual: float
    consistent: bool

    @property
    def dimension(self) -> int:
        return len(self.directions)

    def point(self, x: np.ndarray) -> np.ndarray:
        if len(x) == 0:
            return self.t0.copy()
        return self.t0 + np.einsum("j,jab->ab", x, self.directions)


def build_constraints(problem: SquashProblem, tol: float = 1e-10) -> AffineSlice:
    dim = problem.d_q * problem.d_f
    basis = hermitian_basis(dim)
    basis_f = hermitian_basis(problem.d_f)
    a = np.array([_coords(constraint_images(problem, e), basis_f) for e in basis]).T
    b = _coords(constraint_targets(problem), basis_f)
    y0, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.max(np.abs(a @ y0 - b)))
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    null = vh[rank:]
    t0 = _hermitize(np.einsum("k,kab->ab", y0, basis))
    directions = np.einsum("jk,kab->jab", null, basis) if len(null) else np.zeros((0, dim, dim), complex)
    return AffineSlice(t0, directions, residual, residual <= 1e-10 * max(1.0, np.max(np.abs(b))))


# ---------------------------------------------------------------------------
# Eigenvalue ascent

@dataclass(frozen=True)
class SquashCertificate:
    verdict: str
    t: np.ndarray | None
    min_eigenvalue: float
    residual: float
    upper_bound: float
    dual: np.ndarray | None = field(default=None, repr=False)
    slice_dimension: int = 0
    newton_steps: int = 0

    @property
    def delta(self) -> float:
        """Margin by which the best achievable lambda_min falls short of zero."""
        return max(0.0, -self.upper_bound)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "min_eigenvalue": self.min_eigenvalue,
            "upper_bound": self.upper_bound,
            "residual": self.residual,
            "delta": self.delta,
            "slice_dimension": self.slice_dimension,
            "newton_steps": self.newton_steps,
        }


def _maximise_min_eig(sl: AffineSlice, tol: float, max_newton: int):
    """Barrier path for max_x lambda_min(T0 + sum x_j B_j); returns (x, dual W, steps, converged)."""
    dim = sl.t0.shape[0]
    p = sl.dimension
    gens = np.concatenate([sl.directions, -np.eye(dim, dtype=complex)[None]], axis=0)
    x = np.zeros(p)
    t = float(np.linalg.eigvalsh(sl.t0)[0]) - 1.0
    z = np.append(x, t)
    tau = 1.0
    steps = 0
    converged = True

    def slack(zv):
        return _hermitize(sl.point(zv[:-1]) - zv[-1] * np.eye(dim))

    def objective(zv, s):
        return -tau * zv[-1] - np.linalg.slogdet(s)[1]

    while True:
        for _ in range(200):
            s = slack(z)
            sinv = np.linalg.inv(s)
            mk = sinv @ gens
            grad = -np.real(np.einsum("kii->k", mk))
            grad[-1] -= tau
            flat = mk.reshape(p + 1, -1)
            hess = np.real(flat @ mk.transpose(0, 2, 1).reshape(p + 1, -1).T)
            step = -np.linalg.solve(hess + 1e-14 * np.eye(p + 1), grad)
            decrement = -grad @ step
            steps += 1
            if decrement / 2 < 1e-12 or steps > max_newton:
                break
            f0 = objective(z, s)
            alpha = 1.0
            while alpha > 1e-14:
                zn = z + alpha * step
                sn = slack(zn)
                try:
                    np.linalg.cholesky(sn)
                except np.linalg.LinAlgError:
                    alpha *= 0.5
                    continue
                if objective(zn, sn) <= f0 - 0.25 * alpha * decrement:
                    break
                alpha *= 0.5
            if alpha <= 1e-14:
                break
            z = zn
        if steps > max_newton:
            converged = False
            break
        if dim / tau < tol:
            break
        tau *= 8.0
    dual = np.linalg.inv(slack(z)) / tau
    return z[:-1], _hermitize(dual), steps, converged


def _certify_dual(sl: AffineSlice, w: np.ndarray) -> tuple[np.ndarray, float]:
    """Project W onto {Tr W = 1, Tr(W B_j) = 0, W >= 0}; return W and Tr(W T0)."""
    dim = w.shape[0]
    if sl.dimension:
        coeff = np.real(np.einsum("jab,ba->j", sl.directions, w))
        w = w - np.einsum("j,jab->ab", coeff, sl.directions)
    w = _hermitize(w)
    w = w / np.real(np.trace(w))
    low = float(np.linalg.eigvalsh(w)[0])
    if low < 0:
        # the identity is orthogonal to every slice direction since they are traceless
        w = (w - low * np.eye(dim)) / (1 - low * dim)
    return w, float(np.real(np.trace(w @ sl.t0)))


def verify_certificate(problem: SquashProblem, t: np.ndarray) -> tuple[float, float]:
    """Fresh (constraint residual, lambda_min) for a candidate CJ matrix."""
    imgs = constraint_images(problem, t)
    residual = max(float(np.max(np.abs(i - tg))) for i, tg in zip(imgs, constraint_targets(problem)))
    herm = float(np.max(np.abs(t - t.conj().T)))
    return max(residual, herm), float(np.linalg.eigvalsh(_hermitize(t))[0])


def check_feasibility(problem: SquashProblem, tol: float = 1e-9, max_newton: int = 4000) -> SquashCertificate:
    sl = build_constraints(problem)
    if not sl.consistent:
        return SquashCertificate("infeasible", None, -math.inf, sl.residual, -math.inf)
    x, w, steps, converged = _maximise_min_eig(sl, tol, max_newton)
    t = _hermitize(sl.point(x))
    residual, lam_min = verify_certificate(problem, t)
    w, upper = _certify_dual(sl, w)
    if lam_min >= -FEASIBLE_TOL and residual <= RESIDUAL_TOL:
        verdict = "feasible"
    elif upper < -INFEASIBLE_TOL and converged:
        verdict = "infeasible"
    else:
        verdict = "undetermined"
    return SquashCertificate(verdict, t, lam_min, residual, upper, w, sl.dimension, steps)


def squash_map(certificate: SquashCertificate, d_q: int, d_f: int) -> Callable[[np.ndarray], np.ndarray]:
    """rho_F -> Tr_F[(1 (x) rho^T) T], the map a feasible certificate describes."""
    if certificate.t is None:
        raise SquashError("certificate carries no CJ matrix")
    t = certificate.t

    def apply(rho: np.ndarray) -> np.ndarray:
        return partial_trace_matrix(np.kron(np.eye(d_q), np.asarray(rho).T) @ t, (d_q, d_f), [0])

    return apply


@dataclass(frozen=True)
class NoiseResult:
    lam: float
    tol: float
    above: SquashCertificate
    below: SquashCertificate | None


def noise_to_feasibility(problem: SquashProblem, tol: float = NOISE_TOL) -> NoiseResult:
    """Smallest noise weight admitting a squashing map, bracketed to within ``tol``.

    Feasibility is monotone in the weight because the constraint set is
    convex and full noise is always met by the map to the maximally mixed
    state.  The returned ``above`` certificate is feasible at lam + tol and
    ``below`` is the verdict at lam - tol.
    """
    start = check_feasibility(problem)
    if start.verdict == "feasible":
        return NoiseResult(0.0, tol, start, None)
    anchor = check_feasibility(problem.with_noise(1.0))
    if anchor.verdict != "feasible":
        raise SquashError("full noise should always admit a squashing map")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if check_feasibility(problem.with_noise(mid)).verdict == "feasible":
            hi = mid
        else:
            lo = mid
    lam = 0.5 * (lo + hi)
    above = check_feasibility(problem.with_noise(min(1.0, lam + tol)))
    below = check_feasibility(problem.with_noise(max(0.0, lam - tol)))
    return NoiseResult(lam, tol, above, below)


# ---------------------------------------------------------------------------
# Threshold-detector polarisation measurements

MEASUREMENTS = {"bb84-active": ("Z", "X"), "sixstate-active": ("Z", "X", "Y")}


def photon_subspace_dims(cutoff: int) -> list[int]:
    """Dimensions n + 1 of the n-photon subspaces of two modes, n = 1..cutoff."""
    return [n + 1 for n in range(1, cutoff + 1)]


def all_in_mode(u: np.ndarray, n: int) -> np.ndarray:
    """n photons in polarisation mode u; index j is the occupation |n-j, j> (j photons in mode 1).

    With this ordering the one-photon block coincides with the qubit basis.
    """
    j = np.arange(n + 1)
    comb = np.array([math.comb(n, int(i)) for i in j], dtype=float)
    return np.sqrt(comb) * u[0] ** (n - j) * u[1] ** j


def build_multiphoton_povm(measurement: str, cutoff: int) -> Povm:
    """Active polarisation measurement with two threshold detectors on 1..cutoff photons.

    The basis is picked uniformly.  Single clicks give the matching bit;
    double clicks get a uniformly random bit.  Vacuum is not modelled (it
    never clicks and is discarded before squashing).
    """
    if measurement not in MEASUREMENTS:
        raise ValueError(f"unknown measurement {measurement!r}")
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    bases = MEASUREMENTS[measurement]
    weight = 1 / len(bases)
    dims = photon_subspace_dims(cutoff)
    total = sum(dims)
    elements, labels = [], []
    for b in bases:
        pair = []
        for bit in (0, 1):
            el = np.zeros((total, total), dtype=complex)
            off = 0
            for n, d in zip(range(1, cutoff + 1), dims):
                single = [all_in_mode(BASES[b][:, x], n) for x in (0, 1)]
                proj = [np.outer(v, v.conj()) for v in single]
                double = np.eye(d) - proj[0] - proj[1]
                el[off:off + d, off:off + d] = weight * (proj[bit] + 0.5 * double)
                off += d
            pair.append(el)
        elements += pair
        labels += [(b, 0), (b, 1)]
    return Povm(tuple(elements), tuple(labels))


def preset_problem(name: str) -> SquashProblem:
    """``<measurement>-cutoff<k>``, e.g. ``bb84-active-cutoff2``."""
    base, sep, cut = name.rpartition("-cutoff")
    if not sep or base not in MEASUREMENTS or not cut.isdigit():
        raise ValueError(f"unknown squashing preset {name!r}")
    cutoff = int(cut)
    target = build_multiphoton_povm(base, 1)
    full = build_multiphoton_povm(base, cutoff)
    groups = tuple((2 * i, 2 * i + 1) for i in range(len(MEASUREMENTS[base])))
    return SquashProblem(target, full, groups, name)


def identity_problem(povm: Povm) -> SquashProblem:
    return SquashProblem(povm, povm, name="identity")

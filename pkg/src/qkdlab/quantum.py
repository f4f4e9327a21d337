"""Dense finite-dimensional quantum states, measurements and channels.

Conventions used throughout the package:

* Vectorisation is row-major: an operator ``L`` from an ``d_in`` space to a
  ``d_out`` space becomes the vector ``L.reshape(-1)`` on ``out (x) in``.
* The Choi-Jamiolkowski (CJ) matrix of a channel lives on ``out (x) in`` and is
  built from the *unnormalised* maximally entangled operator
  ``sum_ij |ii><jj|``, so that ``Tr_out(CJ) = 1_in`` for trace preserving maps and
  ``E(rho) = Tr_in[(1_out (x) rho^T) CJ]``.
* The Normal (natural) matrix ``N`` acts on vectorised operators:
  ``vec(E(rho)) = N @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
POVM_TOL = 1e-9
KRAUS_EIG_CUTOFF = 1e-12
PINV_CUTOFF = 1e-12


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid (sub-normalised) density operator."""


class InvalidChannelError(ValueError):
    """Raised when a channel representation violates CPTP constraints."""


class InvalidPovmError(ValueError):
    pass


def _hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class DensityOperator:
    """A Hermitian PSD matrix with trace in (0, 1], tagged with subsystem dims."""

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density operator must be square, got shape {m.shape}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (m.shape[0],)
        if int(np.prod(dims)) != m.shape[0]:
            raise InvalidStateError(f"subsystem dims {dims} do not multiply to {m.shape[0]}")
        herm_err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if herm_err > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix not Hermitian (max deviation {herm_err:.3g})")
        eigs = np.linalg.eigvalsh(_hermitize(m))
        if eigs[0] < -PSD_TOL:
            raise InvalidStateError(f"matrix not PSD (min eigenvalue {eigs[0]:.3g})")
        tr = float(np.real(np.trace(m)))
        if not (0 < tr <= 1 + TRACE_TOL):
            raise InvalidStateError(f"trace {tr:.6g} outside (0, 1]")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(_hermitize(self.matrix))

    def __repr__(self) -> str:
        return f"DensityOperator(dims={self.dims}, trace={self.trace:.6g})"


@dataclass(frozen=True)
class PureState:
    vector: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if abs(norm - 1) > 1e-12:
            raise InvalidStateError(f"pure state must have unit norm, got {norm:.15g}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (v.size,)
        if int(np.prod(dims)) != v.size:
            raise InvalidStateError(f"subsystem dims {dims} do not multiply to {v.size}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.vector.size

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.dims)


StateLike = Union[DensityOperator, PureState, np.ndarray]


def as_density(x: StateLike, dims: Sequence[int] | None = None) -> DensityOperator:
    """Coerce an array, pure state or density operator into a DensityOperator."""
    if isinstance(x, DensityOperator):
        if dims is not None and tuple(dims) != x.dims:
            return DensityOperator(x.matrix, tuple(dims))
        return x
    if isinstance(x, PureState):
        return DensityOperator(np.outer(x.vector, x.vector.conj()), tuple(dims) if dims else x.dims)
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        arr = np.outer(arr, arr.conj())
    return DensityOperator(arr, tuple(dims) if dims else ())


def hermitian_basis(d: int) -> np.ndarray:
    """Hilbert-Schmidt orthonormal basis of d x d Hermitian matrices, shape (d*d, d, d)."""
    basis = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1
        basis.append(m)
    s = 1 / np.sqrt(2)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = s
            basis.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[i, j], m[j, i] = -1j * s, 1j * s
            basis.append(m)
    return np.array(basis)


def _mat(x: StateLike) -> np.ndarray:
    if isinstance(x, DensityOperator):
        return x.matrix
    if isinstance(x, PureState):
        return np.outer(x.vector, x.vector.conj())
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return arr


# ---------------------------------------------------------------------------
# Standard states and operators

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

_S = 1 / np.sqrt(2)
KET = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_S, _S], dtype=complex),
    "-": np.array([_S, -_S], dtype=complex),
    "+i": np.array([_S, 1j * _S], dtype=complex),
    "-i": np.array([_S, -1j * _S], dtype=complex),
}

# Eigenbases indexed by basis label; column x is the eigenvector for bit x.
BASES = {
    "Z": np.column_stack([KET["0"], KET["1"]]),
    "X": np.column_stack([KET["+"], KET["-"]]),
    "Y": np.column_stack([KET["+i"], KET["-i"]]),
}

BELL = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) * _S,
    "phi-": np.array([1, 0, 0, -1], dtype=complex) * _S,
    "psi+": np.array([0, 1, 1, 0], dtype=complex) * _S,
    "psi-": np.array([0, 1, -1, 0], dtype=complex) * _S,
}


def basis_state(i: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(np.eye(d) / d)


# ---------------------------------------------------------------------------
# Basic operations

def tensor_product(a: StateLike, b: StateLike) -> DensityOperator:
    """Kronecker product of two states; subsystem dims are concatenated."""
    da, db = as_density(a), as_density(b)
    return DensityOperator(np.kron(da.matrix, db.matrix), da.dims + db.dims)


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace on a raw matrix; ``keep`` lists the subsystems retained."""
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise ValueError(f"subsystem index {k} out of range for {n} subsystems")
    t = np.asarray(m).reshape(dims + dims)
    current = n
    for idx in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=idx, axis2=idx + current)
        current -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: StateLike, keep: Iterable[int]) -> DensityOperator:
    """Trace out every subsystem not listed in ``keep``."""
    r = as_density(rho)
    keep = sorted(set(int(k) for k in keep))
    out = partial_trace_matrix(r.matrix, r.dims, keep)
    new_dims = tuple(r.dims[k] for k in keep) or (1,)
    return DensityOperator(out, new_dims)


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Matrix square root of a PSD matrix via its spectral decomposition."""
    w, v = np.linalg.eigh(_hermitize(np.asarray(m, dtype=complex)))
    if w.size and w[0] < -PSD_TOL:
        raise InvalidStateError(f"square root of non-PSD matrix (min eigenvalue {w[0]:.3g})")
    w = np.clip(w, 0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def pinv_hermitian(m: np.ndarray, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    w, v = np.linalg.eigh(_hermitize(np.asarray(m, dtype=complex)))
    inv = np.array([1 / x if abs(x) > cutoff else 0.0 for x in w])
    return (v * inv) @ v.conj().T


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def trace_distance(rho: StateLike, sigma: StateLike) -> float:
    return 0.5 * trace_norm(_mat(rho) - _mat(sigma))


def fidelity(rho: StateLike, sigma: StateLike) -> float:
    """Generalised fidelity, valid for sub-normalised states."""
    r, s = _mat(rho), _mat(sigma)
    main = trace_norm(sqrtm_psd(r) @ sqrtm_psd(s))
    tr_r = min(float(np.real(np.trace(r))), 1.0)
    tr_s = min(float(np.real(np.trace(s))), 1.0)
    return main + np.sqrt((1 - tr_r) * (1 - tr_s))


def purified_distance(rho: StateLike, sigma: StateLike) -> float:
    f = min(fidelity(rho, sigma), 1.0)
    return float(np.sqrt(1 - f * f))


def purify(rho: StateLike) -> PureState:
    """Return sum_i sqrt(l_i) |e_i>|i> on ``dim (x) dim`` (purifier last).

    Sub-normalised inputs are purified after normalisation.
    """
    r = as_density(rho)
    w, v = np.linalg.eigh(_hermitize(r.matrix))
    w = np.clip(w, 0, None)
    w = w / w.sum()
    vec = (v * np.sqrt(w)).reshape(-1)
    vec = vec / np.linalg.norm(vec)
    return PureState(vec, r.dims + (r.dim,))


# ---------------------------------------------------------------------------
# Measurements

@dataclass(frozen=True)
class Povm:
    elements: tuple[np.ndarray, ...]
    labels: tuple = ()
    tol: float = field(default=POVM_TOL, compare=False)

    def __post_init__(self):
        els = tuple(_frozen(e) for e in self.elements)
        if not els:
            raise InvalidPovmError("a POVM needs at least one element")
        d = els[0].shape[0]
        for e in els:
            if e.shape != (d, d):
                raise InvalidPovmError("POVM elements must share one square shape")
            if np.max(np.abs(e - e.conj().T)) > HERMITIAN_TOL:
                raise InvalidPovmError("POVM element not Hermitian")
            if np.linalg.eigvalsh(_hermitize(e))[0] < -PSD_TOL:
                raise InvalidPovmError("POVM element not PSD")
        total = sum(els)
        err = np.max(np.abs(total - np.eye(d)))
        if err > self.tol:
            raise InvalidPovmError(f"POVM elements sum to identity only within {err:.3g}")
        labels = tuple(self.labels) if self.labels else tuple(range(len(els)))
        if len(labels) != len(els):
            raise InvalidPovmError("one label per element required")
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


def measure(povm: Povm, rho: StateLike) -> np.ndarray:
    """Outcome probabilities Tr(F_i rho)."""
    r = _mat(rho)
    return np.array([float(np.real(np.trace(e @ r))) for e in povm.elements])


def basis_povm(basis: str, weight: float = 1.0) -> list[np.ndarray]:
    b = BASES[basis]
    return [weight * projector(b[:, x]) for x in range(2)]


def usd_povm() -> Povm:
    """Unambiguous discrimination of |0> and |+> (outcomes 0, 1, '?')."""
    c = np.sqrt(2) / (1 + np.sqrt(2))
    f0 = c * projector(KET["-"])
    f1 = c * projector(KET["1"])
    return Povm((f0, f1, np.eye(2) - f0 - f1), labels=(0, 1, "?"))


# ---------------------------------------------------------------------------
# Channels

KRAUS, CJ, NORMAL = "kraus", "cj", "normal"


@dataclass(frozen=True)
class ChannelRep:
    """A CPTP map stored as Kraus operators, a CJ matrix or a Normal matrix."""

    in_dim: int
    out_dim: int
    form: str
    kraus: tuple[np.ndarray, ...] = ()
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.form not in (KRAUS, CJ, NORMAL):
            raise ValueError(f"unknown channel form {self.form!r}")
        if self.form == KRAUS:
            ks = tuple(_frozen(k) for k in self.kraus)
            if not ks:
                raise InvalidChannelError("Kraus form needs at least one operator")
            for k in ks:
                if k.shape != (self.out_dim, self.in_dim):
                    raise InvalidChannelError(f"Kraus operator shape {k.shape} != {(self.out_dim, self.in_dim)}")
            tp = sum(k.conj().T @ k for k in ks)
            err = np.max(np.abs(tp - np.eye(self.in_dim)))
            if err > POVM_TOL:
                raise InvalidChannelError(f"Kraus operators not trace preserving (deviation {err:.3g})")
            object.__setattr__(self, "kraus", ks)
        else:
            m = _frozen(self.matrix)
            size = self.in_dim * self.out_dim
            expected = (size, size) if self.form == CJ else (self.out_dim**2, self.in_dim**2)
            if m.shape != expected:
                raise InvalidChannelError(f"{self.form} matrix shape {m.shape} != {expected}")
            if self.form == CJ:
                _check_cj(m, self.in_dim, self.out_dim)
            object.__setattr__(self, "matrix", m)


def _check_cj(m: np.ndarray, d_in: int, d_out: int) -> None:
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise InvalidChannelError("CJ matrix not Hermitian")
    lo = np.linalg.eigvalsh(_hermitize(m))[0]
    if lo < -PSD_TOL:
        raise InvalidChannelError(f"CJ matrix not PSD (min eigenvalue {lo:.3g})")
    tr_out = partial_trace_matrix(m, (d_out, d_in), [1])
    err = np.max(np.abs(tr_out - np.eye(d_in)))
    if err > POVM_TOL:
        raise InvalidChannelError(f"CJ matrix not trace preserving (deviation {err:.3g})")


def kraus_channel(ops: Sequence[np.ndarray]) -> ChannelRep:
    ops = [np.asarray(k, dtype=complex) for k in ops]
    out_dim, in_dim = ops[0].shape
    return ChannelRep(in_dim, out_dim, KRAUS, kraus=tuple(ops))


def cj_channel(matrix: np.ndarray, in_dim: int, out_dim: int) -> ChannelRep:
    return ChannelRep(in_dim, out_dim, CJ, matrix=np.asarray(matrix, dtype=complex))


def _realign(m: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    # CJ[(a,i),(b,j)] <-> N[(a,b),(i,j)]; the map is an involution up to shapes.
    return m.reshape(d_out, d_in, d_out, d_in).transpose(0, 2, 1, 3).reshape(d_out**2, d_in**2)


def _unrealign(n: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    return n.reshape(d_out, d_out, d_in, d_in).transpose(0, 2, 1, 3).reshape(d_out * d_in, d_out * d_in)


def cj_matrix(ch: ChannelRep) -> np.ndarray:
    if ch.form == CJ:
        return ch.matrix
    if ch.form == KRAUS:
        return sum(np.outer(k.reshape(-1), k.reshape(-1).conj()) for k in ch.kraus)
    return _unrealign(ch.matrix, ch.in_dim, ch.out_dim)


def kraus_to_cj(ch: ChannelRep) -> ChannelRep:
    return ChannelRep(ch.in_dim, ch.out_dim, CJ, matrix=cj_matrix(ch))


def cj_to_kraus(ch: ChannelRep) -> ChannelRep:
    """Kraus operators from the eigendecomposition of the CJ matrix."""
    if ch.form == KRAUS:
        return ch
    m = cj_matrix(ch)
    w, v = np.linalg.eigh(_hermitize(m))
    if w[0] < -PSD_TOL:
        raise InvalidChannelError(f"CJ matrix not PSD (min eigenvalue {w[0]:.3g})")
    ops = [np.sqrt(w[i]) * v[:, i].reshape(ch.out_dim, ch.in_dim) for i in range(len(w)) if w[i] > KRAUS_EIG_CUTOFF]
    return ChannelRep(ch.in_dim, ch.out_dim, KRAUS, kraus=tuple(ops))


def to_normal(ch: ChannelRep) -> ChannelRep:
    if ch.form == NORMAL:
        return ch
    if ch.form == KRAUS:
        n = sum(np.kron(k, k.conj()) for k in ch.kraus)
    else:
        n = _realign(ch.matrix, ch.in_dim, ch.out_dim)
    return ChannelRep(ch.in_dim, ch.out_dim, NORMAL, matrix=n)


def apply_channel_matrix(ch: ChannelRep, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if ch.form == KRAUS:
        return sum(k @ rho @ k.conj().T for k in ch.kraus)
    if ch.form == CJ:
        big = np.kron(np.eye(ch.out_dim), rho.T) @ ch.matrix
        return partial_trace_matrix(big, (ch.out_dim, ch.in_dim), [0])
    return (ch.matrix @ rho.reshape(-1)).reshape(ch.out_dim, ch.out_dim)


def apply_channel(ch: ChannelRep, rho: StateLike) -> DensityOperator:
    r = as_density(rho)
    if r.dim != ch.in_dim:
        raise ValueError(f"channel input dim {ch.in_dim} != state dim {r.dim}")
    out = _hermitize(apply_channel_matrix(ch, r.matrix))
    dims = r.dims if ch.out_dim == ch.in_dim else (ch.out_dim,)
    return DensityOperator(out, dims)


def stinespring_isometry(ch: ChannelRep) -> np.ndarray:
    """Stack Kraus operators into an isometry V: in -> out (x) env (env last)."""
    ks = cj_to_kraus(ch).kraus
    r = len(ks)
    v = np.zeros((ch.out_dim * r, ch.in_dim), dtype=complex)
    for i, k in enumerate(ks):
        v[i::r, :] = k
    return v


def identity_channel(d: int) -> ChannelRep:
    return kraus_channel([np.eye(d)])


def unitary_channel(u: np.ndarray) -> ChannelRep:
    return kraus_channel([u])


def depolarizing_channel(p: float, d: int = 2) -> ChannelRep:
    """rho -> p rho + (1 - p) 1/d; p = 0 is the fully mixing channel."""
    if not 0 <= p <= 1:
        raise ValueError("depolarizing parameter must lie in [0, 1]")
    # Kraus form from the uniform mixture over the d^2 Weyl operators.
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    weyl = [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a in range(d) for b in range(d)]
    ops = [np.sqrt(p + (1 - p) / d**2) * weyl[0]]
    ops += [np.sqrt((1 - p) / d**2) * w for w in weyl[1:]]
    return kraus_channel([o for o in ops if np.any(o)])


def pauli_channel(probs: Sequence[float]) -> ChannelRep:
    """Qubit Pauli channel with probabilities for (I, X, Y, Z)."""
    return kraus_channel([np.sqrt(p) * PAULIS[k] for p, k in zip(probs, "IXYZ") if p > 0])


# ---------------------------------------------------------------------------
# Random objects (Haar / Hilbert-Schmidt style), for property tests and sweeps

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None, dims: Sequence[int] | None = None) -> DensityOperator:
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = _hermitize(m / np.real(np.trace(m)))
    return DensityOperator(m, tuple(dims) if dims else ())


def random_pure(d: int, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v / np.linalg.norm(v))


def random_channel(d_in: int, d_out: int, n_kraus: int, rng: np.random.Generator) -> ChannelRep:
    """Random CPTP map from a Haar-random isometry split into Kraus blocks."""
    big = random_unitary(d_out * n_kraus, rng)[:, :d_in]
    return kraus_channel([big[i * d_out:(i + 1) * d_out, :] for i in range(n_kraus)])


# ---------------------------------------------------------------------------
# JSON helpers: matrices as nested [re, im] pairs

def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise ValueError("matrix JSON must be rows of [re, im] pairs or plain real rows")

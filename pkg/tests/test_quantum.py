from __future__ import annotations

import numpy as np
import pytest

from qkdlab.quantum import (
    BELL,
    KET,
    DensityOperator,
    InvalidChannelError,
    InvalidStateError,
    PureState,
    apply_channel,
    basis_povm,
    cj_channel,
    cj_matrix,
    cj_to_kraus,
    depolarizing_channel,
    fidelity,
    identity_channel,
    kraus_channel,
    kraus_to_cj,
    matrix_from_json,
    matrix_to_json,
    measure,
    partial_trace,
    Povm,
    projector,
    purified_distance,
    purify,
    random_channel,
    random_density,
    random_unitary,
    stinespring_isometry,
    tensor_product,
    to_normal,
    trace_distance,
    usd_povm,
)


def dm(vec, dims=None):
    return DensityOperator(projector(vec), dims)


def test_density_operator_validation():
    with pytest.raises(InvalidStateError):
        DensityOperator(np.array([[1, 1], [0, 0]]))
    with pytest.raises(InvalidStateError):
        DensityOperator(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidStateError):
        DensityOperator(np.eye(2))
    sub = DensityOperator(np.diag([0.3, 0.2]))
    assert sub.trace == pytest.approx(0.5)
    with pytest.raises(InvalidStateError):
        PureState(np.array([1.0, 1.0]))


def test_tensor_product_examples():
    out = tensor_product(dm(KET["0"]), dm(KET["1"]))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    assert np.allclose(out.matrix, expected)
    assert out.dims == (2, 2)
    mixed = tensor_product(np.eye(2) / 2, np.eye(2) / 2)
    assert np.allclose(mixed.matrix, np.eye(4) / 4)


def test_tensor_product_index_oracle():
    rng = np.random.default_rng(3)
    a, b = random_density(2, rng), random_density(2, rng)
    out = tensor_product(a, b).matrix
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    assert abs(out[i * 2 + k, j * 2 + l] - a.matrix[i, j] * b.matrix[k, l]) < 1e-14


def test_partial_trace_examples():
    rng = np.random.default_rng(5)
    rho, sigma = random_density(2, rng), random_density(3, rng)
    assert np.allclose(partial_trace(tensor_product(rho, sigma), [0]).matrix, rho.matrix)
    bell = dm(BELL["phi+"], (2, 2))
    assert np.allclose(partial_trace(bell, [0]).matrix, np.eye(2) / 2)
    with pytest.raises(ValueError):
        partial_trace(bell, [2])


def test_partial_trace_index_sum_oracle():
    rng = np.random.default_rng(7)
    r = random_density(6, rng, dims=(2, 3))
    m = r.matrix
    oracle_a = np.zeros((2, 2), dtype=complex)
    oracle_b = np.zeros((3, 3), dtype=complex)
    for i in range(2):
        for j in range(2):
            oracle_a[i, j] = sum(m[i * 3 + k, j * 3 + k] for k in range(3))
    for k in range(3):
        for l in range(3):
            oracle_b[k, l] = sum(m[i * 3 + k, i * 3 + l] for i in range(2))
    assert np.max(np.abs(partial_trace(r, [0]).matrix - oracle_a)) < 1e-13
    assert np.max(np.abs(partial_trace(r, [1]).matrix - oracle_b)) < 1e-13
    assert partial_trace(r, [1]).trace == pytest.approx(r.trace, abs=1e-12)


def test_distance_examples():
    zero, one, plus = dm(KET["0"]), dm(KET["1"]), dm(KET["+"])
    assert trace_distance(zero, zero) == pytest.approx(0, abs=1e-12)
    assert trace_distance(zero, one) == pytest.approx(1)
    assert trace_distance(zero, plus) == pytest.approx(1 / np.sqrt(2), abs=1e-5)
    assert fidelity(zero, zero) == pytest.approx(1)
    assert fidelity(zero, plus) == pytest.approx(1 / np.sqrt(2), abs=1e-9)
    half = 0.5 * zero.matrix
    assert fidelity(half, half) == pytest.approx(1.0)
    assert purified_distance(zero, zero) == pytest.approx(0, abs=1e-6)
    assert purified_distance(zero, one) == pytest.approx(1)
    assert purified_distance(zero, plus) == pytest.approx(1 / np.sqrt(2), abs=1e-9)


def test_purify_round_trip():
    rng = np.random.default_rng(11)
    for rho in [DensityOperator(np.eye(2) / 2), dm(KET["+"]), random_density(3, rng)]:
        psi = purify(rho)
        back = partial_trace(psi.density(), [0])
        assert np.max(np.abs(back.matrix - rho.matrix)) < 1e-10
    mixed = purify(DensityOperator(np.eye(2) / 2))
    # maximally mixed purifies to a maximally entangled state
    assert abs(abs(np.vdot(BELL["phi+"], mixed.vector)) - 1) < 1e-12


def test_identity_and_depolarizing_cj():
    ident = cj_matrix(identity_channel(2))
    omega = np.zeros(4)
    omega[[0, 3]] = 1
    assert np.allclose(ident, np.outer(omega, omega))
    assert np.linalg.matrix_rank(ident) == 1
    assert np.trace(ident).real == pytest.approx(2)
    assert np.allclose(cj_matrix(depolarizing_channel(0.0)), np.eye(4) / 2)


def test_kraus_cj_round_trip_action():
    rng = np.random.default_rng(13)
    ch = random_channel(2, 2, 4, rng)
    back = cj_to_kraus(kraus_to_cj(ch))
    for _ in range(20):
        rho = random_density(2, rng)
        assert np.max(np.abs(apply_channel(ch, rho).matrix - apply_channel(back, rho).matrix)) < 1e-10


def test_apply_channel_paths_agree():
    rng = np.random.default_rng(17)
    ch = random_channel(3, 2, 3, rng)
    cj = kraus_to_cj(ch)
    normal = to_normal(ch)
    for _ in range(10):
        rho = random_density(3, rng)
        out = apply_channel(ch, rho).matrix
        assert np.max(np.abs(out - apply_channel(cj, rho).matrix)) < 1e-10
        assert np.max(np.abs(out - apply_channel(normal, rho).matrix)) < 1e-10


def test_channel_examples():
    rng = np.random.default_rng(19)
    rho = random_density(2, rng)
    assert np.allclose(apply_channel(identity_channel(2), rho).matrix, rho.matrix)
    assert np.allclose(apply_channel(depolarizing_channel(0.0), rho).matrix, np.eye(2) / 2)
    with pytest.raises(InvalidChannelError):
        cj_channel(np.diag([1.0, -0.5, 0.0, 0.5]), 2, 2)
    with pytest.raises(InvalidChannelError):
        kraus_channel([np.eye(2) * 0.5])


def test_measure_examples():
    z = Povm(basis_povm("Z"))
    assert np.allclose(measure(z, dm(KET["0"])), [1, 0])
    assert np.allclose(measure(z, dm(KET["+"])), [0.5, 0.5])
    p = measure(usd_povm(), dm(KET["0"]))
    c = 1 / (2 + np.sqrt(2))
    assert np.allclose(p, [c, 0, 1 - c], atol=1e-12)
    assert np.allclose(p, [0.29289, 0, 0.70711], atol=1e-5)


def test_monotonicity_under_channels():
    rng = np.random.default_rng(23)
    for _ in range(200):
        ch = random_channel(2, 2, int(rng.integers(1, 5)), rng)
        rho, sigma = random_density(2, rng), random_density(2, rng)
        er, es = apply_channel(ch, rho), apply_channel(ch, sigma)
        assert trace_distance(er, es) <= trace_distance(rho, sigma) + 1e-9
        assert fidelity(er, es) >= fidelity(rho, sigma) - 1e-9
        assert purified_distance(er, es) <= purified_distance(rho, sigma) + 1e-9


def test_strong_convexity_of_trace_distance():
    rng = np.random.default_rng(29)
    for _ in range(100):
        k = 3
        p = rng.dirichlet(np.ones(k))
        q = rng.dirichlet(np.ones(k))
        rhos = [random_density(2, rng) for _ in range(k)]
        sigmas = [random_density(2, rng) for _ in range(k)]
        lhs = trace_distance(sum(pi * r.matrix for pi, r in zip(p, rhos)), sum(qi * s.matrix for qi, s in zip(q, sigmas)))
        rhs = 0.5 * np.abs(p - q).sum() + sum(pi * trace_distance(r, s) for pi, r, s in zip(p, rhos, sigmas))
        assert lhs <= rhs + 1e-9


def test_fuchs_van_de_graaf():
    rng = np.random.default_rng(31)
    for _ in range(200):
        rho, sigma = random_density(3, rng), random_density(3, rng)
        f, d = fidelity(rho, sigma), trace_distance(rho, sigma)
        assert 1 - f <= d + 1e-9
        assert d <= np.sqrt(max(0.0, 1 - f * f)) + 1e-9


def test_cj_trace_preservation_and_kraus_freedom():
    rng = np.random.default_rng(37)
    for _ in range(20):
        ch = random_channel(2, 3, 3, rng)
        xi = cj_matrix(ch)
        tr_out = xi.reshape(3, 2, 3, 2).trace(axis1=0, axis2=2)
        assert np.allclose(tr_out, np.eye(2), atol=1e-9)
        # mixing Kraus operators by a unitary leaves the CJ matrix fixed
        u = random_unitary(len(ch.kraus), rng)
        mixed = [sum(u[i, j] * ch.kraus[j] for j in range(len(ch.kraus))) for i in range(len(ch.kraus))]
        assert np.max(np.abs(cj_matrix(kraus_channel(mixed)) - xi)) < 1e-10
        # a unitary on the output leaves the channel a channel and conjugates the CJ matrix
        w = random_unitary(3, rng)
        rotated = cj_matrix(kraus_channel([w @ a for a in ch.kraus]))
        big = np.kron(w, np.eye(2))
        assert np.max(np.abs(rotated - big @ xi @ big.conj().T)) < 1e-10


def test_stinespring_is_isometry():
    rng = np.random.default_rng(41)
    ch = random_channel(2, 2, 3, rng)
    v = stinespring_isometry(ch)
    assert np.allclose(v.conj().T @ v, np.eye(2), atol=1e-12)


def test_matrix_json_round_trip():
    rng = np.random.default_rng(43)
    m = random_density(3, rng).matrix
    data = matrix_to_json(m)
    assert isinstance(data[0][0], list) and len(data[0][0]) == 2
    assert np.array_equal(matrix_from_json(data), m)

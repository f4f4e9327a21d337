from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from qkdlab.entropy import (
    binary_entropy,
    conditional_vn,
    hmax_classical_support,
    hmax_direct,
    hmax_quantum,
    hmin_classical,
    hmin_cq_binary,
    hmin_quantum,
    holevo,
    mutual_information,
    shannon,
    von_neumann,
)
from qkdlab.quantum import (
    BELL,
    KET,
    DensityOperator,
    partial_trace,
    projector,
    random_density,
    random_pure,
    tensor_product,
)


def bell_state():
    return DensityOperator(projector(BELL["phi+"]), (2, 2))


def test_shannon_and_binary_examples():
    assert shannon([0.25] * 4) == pytest.approx(2)
    assert shannon([1, 0]) == 0
    assert shannon([0.11, 0.89]) == pytest.approx(0.49992, abs=1e-4)
    assert binary_entropy(0.5) == pytest.approx(1)
    assert binary_entropy(0) == binary_entropy(1) == 0
    assert binary_entropy(0.06) == pytest.approx(0.32744, abs=1e-4)
    with pytest.raises(ValueError):
        shannon([0.5, 0.4])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda x: sum(x) > 1e-3))
def test_shannon_range(weights):
    p = np.array(weights) / sum(weights)
    h = shannon(p)
    assert -1e-12 <= h <= math.log2(np.count_nonzero(p)) + 1e-9
    assert hmin_classical(p) <= h + 1e-9 <= hmax_classical_support(p) + 2e-9


def test_von_neumann_examples():
    assert von_neumann(np.eye(4) / 4) == pytest.approx(2)
    assert conditional_vn(bell_state()) == pytest.approx(-1, abs=1e-10)
    assert mutual_information(bell_state()) == pytest.approx(2, abs=1e-10)
    rng = np.random.default_rng(2)
    psi = random_pure(6, rng)
    pure = DensityOperator(projector(psi.vector), (2, 3))
    assert abs(von_neumann(partial_trace(pure, [0])) - von_neumann(partial_trace(pure, [1]))) < 1e-10


def test_classical_min_max_examples():
    assert hmin_classical([1 / 8] * 8) == pytest.approx(3)
    assert hmax_classical_support([1 / 8] * 8) == pytest.approx(3)
    assert hmin_classical([0.5, 0.25, 0.25]) == pytest.approx(1)
    assert hmax_classical_support([0.5, 0.25, 0.25]) == pytest.approx(math.log2(3))
    assert hmin_classical([1, 0, 0]) == 0 and hmax_classical_support([1, 0, 0]) == 0


def test_hmin_cq_binary_examples():
    zero, one, plus = (projector(KET[k]) for k in ("0", "1", "+"))
    assert hmin_cq_binary([(0.5, zero), (0.5, one)]).value == pytest.approx(0, abs=1e-12)
    assert hmin_cq_binary([(0.5, zero), (0.5, zero)]).value == pytest.approx(1)
    assert hmin_cq_binary([(0.7, zero), (0.3, zero)]).info["p_guess"] == pytest.approx(0.7)
    res = hmin_cq_binary([(0.5, zero), (0.5, plus)])
    assert res.info["p_guess"] == pytest.approx(0.5 + 1 / (2 * math.sqrt(2)))
    assert res.value == pytest.approx(-math.log2(0.5 + 1 / (2 * math.sqrt(2))), abs=1e-12)
    assert res.value == pytest.approx(0.22839, abs=1e-4)
    p0, p1 = res.certificate
    achieved = 0.5 * np.trace(p0 @ zero).real + 0.5 * np.trace(p1 @ plus).real
    assert achieved == pytest.approx(res.info["p_guess"])


def test_hmin_cq_agrees_with_general_solver():
    zero, plus = projector(KET["0"]), projector(KET["+"])
    cq = np.zeros((4, 4), dtype=complex)
    cq[:2, :2] = 0.5 * zero
    cq[2:, 2:] = 0.5 * plus
    general = hmin_quantum(DensityOperator(cq, (2, 2)))
    assert general.value == pytest.approx(hmin_cq_binary([(0.5, zero), (0.5, plus)]).value, abs=1e-6)


def test_hmin_quantum_examples():
    rng = np.random.default_rng(5)
    for _ in range(5):
        ra, rb = random_density(2, rng), random_density(2, rng)
        expected = -math.log2(np.linalg.eigvalsh(ra.matrix)[-1])
        assert hmin_quantum(tensor_product(ra, rb)).value == pytest.approx(expected, abs=1e-4)
    bell = hmin_quantum(bell_state())
    assert bell.value == pytest.approx(-1, abs=1e-3)
    assert np.allclose(bell.certificate, np.eye(2) / 2 * 2, atol=1e-4)
    assert hmin_quantum(DensityOperator(np.eye(4) / 4, (2, 2))).value == pytest.approx(1, abs=1e-4)


def test_hmin_certificate_feasible_and_bounds_tight():
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho = random_density(4, rng, dims=(2, 2))
        res = hmin_quantum(rho)
        big = np.kron(np.eye(2), res.certificate) - rho.matrix
        assert np.linalg.eigvalsh(big)[0] >= -1e-8
        lo, hi = res.bounds
        assert lo <= hi + 1e-9
        assert hi - lo < 1e-6


def test_hmax_examples():
    rng = np.random.default_rng(9)
    psi = random_pure(4, rng)
    pure = DensityOperator(projector(psi.vector), (2, 2))
    marginal = partial_trace(pure, [0])
    # pure AB: Hmax(A|B) = -Hmin(A) with a trivial purifying system
    assert hmax_quantum(pure).value == pytest.approx(math.log2(np.linalg.eigvalsh(marginal.matrix)[-1]), abs=1e-6)
    assert hmax_quantum(DensityOperator(np.eye(2) / 2), a=(0,), b=()).value == pytest.approx(1, abs=1e-6)


def _bloch(v):
    x, y, z = v
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])


def _grid_hmax(rho):
    best, best_v = -np.inf, None
    for theta in np.linspace(0, np.pi, 13):
        for phi in np.linspace(0, 2 * np.pi, 13, endpoint=False):
            for r in (0.0, 0.5, 0.9, 1.0):
                v = r * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
                val = hmax_direct(rho, _bloch(v))
                if val > best:
                    best, best_v = val, v

    def neg(u):
        n = np.linalg.norm(u)
        u = u / max(n, 1.0)
        return -hmax_direct(rho, _bloch(u))

    refined = minimize(neg, best_v, method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-10})
    return max(best, -refined.fun)


def test_hmax_matches_grid_search():
    rng = np.random.default_rng(13)
    for _ in range(6):
        rho = random_density(4, rng, dims=(2, 2))
        assert hmax_quantum(rho).value == pytest.approx(_grid_hmax(rho), abs=1e-3)


def test_dpi_von_neumann():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        rho = random_density(8, rng, dims=(2, 2, 2))
        assert conditional_vn(rho, (0,), (1, 2)) <= conditional_vn(rho, (0,), (1,)) + 1e-9


def test_dpi_min_entropy():
    rng = np.random.default_rng(19)
    for _ in range(100):
        rho = random_density(8, rng, dims=(2, 2, 2))
        assert hmin_quantum(rho, (0,), (1, 2)).value <= hmin_quantum(rho, (0,), (1,)).value + 1e-3


def test_hmin_additive_on_products():
    rng = np.random.default_rng(23)
    for _ in range(5):
        r1 = random_density(4, rng, dims=(2, 2))
        r2 = random_density(4, rng, dims=(2, 2))
        joint = tensor_product(r1, r2)  # systems A1 B1 A2 B2
        value = hmin_quantum(joint, (0, 2), (1, 3)).value
        assert value == pytest.approx(hmin_quantum(r1).value + hmin_quantum(r2).value, abs=1e-4)


def test_qaep_trend_for_cq_state():
    zero, plus = projector(KET["0"]), projector(KET["+"])
    cq = np.zeros((4, 4), dtype=complex)
    cq[:2, :2] = 0.5 * zero
    cq[2:, 2:] = 0.5 * plus
    single = DensityOperator(cq, (2, 2))
    h_vn = conditional_vn(single)
    per_copy = []
    state = single
    for n in (1, 2, 3):
        if n > 1:
            state = tensor_product(state, single)
        a = tuple(range(0, 2 * n, 2))
        b = tuple(range(1, 2 * n, 2))
        per_copy.append(hmin_quantum(state, a, b).value / n)
    assert max(per_copy) - min(per_copy) < 1e-4
    assert per_copy[0] <= h_vn + 1e-9


def test_holevo_identical_states():
    rng = np.random.default_rng(29)
    r = random_density(3, rng)
    assert holevo([(0.3, r), (0.7, r)]) == pytest.approx(0, abs=1e-12)
    assert holevo([(0.5, projector(KET["0"])), (0.5, projector(KET["1"]))]) == pytest.approx(1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hmin_le_vn_le_hmax(seed):
    rho = random_density(4, np.random.default_rng(seed), dims=(2, 2))
    h = conditional_vn(rho)
    assert hmin_quantum(rho).value <= h + 1e-6
    assert h <= hmax_quantum(rho).value + 1e-6

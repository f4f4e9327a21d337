from __future__ import annotations

import math

import numpy as np
import pytest

from qkdlab.quantum import BASES, Povm, random_density
from qkdlab.squashing import (
    SquashProblem,
    build_constraints,
    build_multiphoton_povm,
    check_feasibility,
    identity_problem,
    noise_to_feasibility,
    preset_problem,
    squash_map,
    verify_certificate,
)


def qubit_povm(bases):
    els, w = [], 1 / len(bases)
    for b in bases:
        for bit in (0, 1):
            v = BASES[b][:, bit]
            els.append(w * np.outer(v, v.conj()))
    return els


def two_photon_oracle(bases):
    """Elements on the two-photon subspace from distinguishable photons.

    Symmetric states |2,0>, |1,1>, |0,2> are embedded into two qubits; each
    photon meets the polarising beamsplitter independently.
    """
    iso = np.zeros((4, 3))
    iso[0, 0] = 1
    iso[1, 1] = iso[2, 1] = 1 / math.sqrt(2)
    iso[3, 2] = 1
    els, w = [], 1 / len(bases)
    for b in bases:
        p = [np.outer(BASES[b][:, x], BASES[b][:, x].conj()) for x in (0, 1)]
        double = np.kron(p[0], p[1]) + np.kron(p[1], p[0])
        for bit in (0, 1):
            click = np.kron(p[bit], p[bit]) + 0.5 * double
            els.append(w * iso.T @ click @ iso)
    return els


def constraint_rank_oracle(problem: SquashProblem) -> int:
    """Complex rank of T -> ((Tr_Q[(F^Q (x) 1) T])^T, Tr_Q T) built from matrix units."""
    dq, df = problem.d_q, problem.d_f
    dim = dq * df
    cols = []
    for a in range(dim):
        for b in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[a, b] = 1
            t4 = unit.reshape(dq, df, dq, df)
            parts = [np.einsum("qr,rfqg->fg", fq, t4).T for fq in problem.target.elements]
            parts.append(np.einsum("qfqg->fg", t4))
            cols.append(np.concatenate([p.ravel() for p in parts]))
    return int(np.linalg.matrix_rank(np.array(cols).T, tol=1e-9))


@pytest.mark.parametrize("kind, bases", [("bb84-active", "ZX"), ("sixstate-active", "ZXY")])
def test_cutoff_one_is_the_qubit_measurement(kind, bases):
    povm = build_multiphoton_povm(kind, 1)
    for got, want in zip(povm.elements, qubit_povm(bases)):
        assert np.allclose(got, want, atol=1e-15)


@pytest.mark.parametrize("kind, bases", [("bb84-active", "ZX"), ("sixstate-active", "ZXY")])
def test_two_photon_block_matches_mode_enumeration(kind, bases):
    povm = build_multiphoton_povm(kind, 2)
    assert povm.dim == 5
    for got, want in zip(povm.elements, two_photon_oracle(bases)):
        assert np.max(np.abs(got[2:, 2:] - want)) < 1e-12
        assert np.max(np.abs(got[:2, 2:])) == 0


@pytest.mark.parametrize("cutoff", [1, 2, 3, 4])
def test_completeness_per_photon_subspace(cutoff):
    povm = build_multiphoton_povm("sixstate-active", cutoff)
    total = sum(povm.elements)
    off = 0
    for n in range(1, cutoff + 1):
        block = total[off:off + n + 1, off:off + n + 1]
        assert np.allclose(block, np.eye(n + 1), atol=1e-12)
        off += n + 1


def test_identity_problem_is_feasible():
    cert = check_feasibility(identity_problem(build_multiphoton_povm("bb84-active", 1)))
    assert cert.verdict == "feasible"
    residual, lam_min = verify_certificate(identity_problem(build_multiphoton_povm("bb84-active", 1)), cert.t)
    assert residual <= 1e-8 and lam_min >= -1e-8


def test_inconsistent_constraints_are_rejected_immediately():
    half = 0.5 * np.eye(2)
    target = Povm((half, half))
    full = Povm((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    problem = SquashProblem(target, full)
    sl = build_constraints(problem)
    assert not sl.consistent and sl.residual > 0.1
    cert = check_feasibility(problem)
    assert cert.verdict == "infeasible" and cert.t is None


@pytest.mark.parametrize("name", ["bb84-active-cutoff2", "sixstate-active-cutoff2", "sixstate-active-cutoff3"])
def test_slice_dimension_matches_rank_oracle(name):
    problem = preset_problem(name)
    sl = build_constraints(problem)
    dim = problem.d_q * problem.d_f
    assert sl.dimension == dim**2 - constraint_rank_oracle(problem)
    rng = np.random.default_rng(0)
    for _ in range(5):
        t = sl.point(rng.normal(size=sl.dimension))
        assert verify_certificate(problem, t)[0] <= 1e-10


def test_bb84_cutoff_two_feasible_and_consistent():
    problem = preset_problem("bb84-active-cutoff2")
    cert = check_feasibility(problem)
    assert cert.verdict == "feasible"
    residual, lam_min = verify_certificate(problem, cert.t)
    assert residual <= 1e-8 and lam_min >= -1e-8
    squash = squash_map(cert, problem.d_q, problem.d_f)
    rng = np.random.default_rng(1)
    for _ in range(50):
        rho = random_density(problem.d_f, rng).matrix
        sq = squash(rho)
        full_probs = [np.real(np.trace(f @ rho)) for f in problem.full.elements]
        target_probs = [np.real(np.trace(f @ sq)) for f in problem.target.elements]
        assert np.allclose(full_probs, target_probs, atol=1e-8)


def test_sixstate_cutoff_two_admits_the_one_photon_marginal():
    """Tracing out one of two photons reproduces every six-state click statistic."""
    problem = preset_problem("sixstate-active-cutoff2")
    iso = np.zeros((4, 3))
    iso[0, 0] = 1
    iso[1, 1] = iso[2, 1] = 1 / math.sqrt(2)
    iso[3, 2] = 1

    def marginal(rho):
        two = (iso @ rho[2:, 2:] @ iso.T).reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
        return rho[:2, :2] + two

    t = np.zeros((10, 10), dtype=complex)
    for i in range(5):
        for j in range(5):
            unit = np.zeros((5, 5))
            unit[i, j] = 1
            t += np.kron(marginal(unit), unit)
    residual, lam_min = verify_certificate(problem, t)
    assert residual < 1e-12 and lam_min > -1e-12
    assert check_feasibility(problem).verdict == "feasible"


def test_sixstate_cutoff_three_infeasible_with_dual_certificate():
    problem = preset_problem("sixstate-active-cutoff3")
    cert = check_feasibility(problem)
    assert cert.verdict == "infeasible"
    assert cert.upper_bound < -1e-6 and cert.delta > 1e-6
    w = cert.dual
    sl = build_constraints(problem)
    assert np.linalg.eigvalsh(w)[0] >= -1e-12
    assert np.real(np.trace(w)) == pytest.approx(1, abs=1e-12)
    if sl.dimension:
        assert np.max(np.abs(np.einsum("jab,ba->j", sl.directions, w))) < 1e-10
    assert np.real(np.trace(w @ sl.t0)) == pytest.approx(cert.upper_bound, abs=1e-12)


def test_noise_search_brackets_the_boundary():
    problem = preset_problem("sixstate-active-cutoff3")
    assert check_feasibility(problem.with_noise(1.0)).verdict == "feasible"
    res = noise_to_feasibility(problem)
    assert 0 < res.lam < 1
    assert res.above.verdict == "feasible"
    assert res.below is not None and res.below.verdict == "infeasible"
    for lam in (res.lam + 0.01, 0.6, 0.9):
        assert check_feasibility(problem.with_noise(lam)).verdict == "feasible"


def test_noise_search_on_feasible_problem_returns_zero():
    res = noise_to_feasibility(preset_problem("bb84-active-cutoff2"))
    assert res.lam == 0 and res.below is None


def test_presets_and_validation():
    with pytest.raises(ValueError):
        preset_problem("bb84-passive-cutoff2")
    with pytest.raises(ValueError):
        build_multiphoton_povm("bb84-active", 0)
    povm = build_multiphoton_povm("bb84-active", 1)
    with pytest.raises(ValueError):
        SquashProblem(povm, Povm((np.eye(2),)))
    with pytest.raises(ValueError):
        SquashProblem(povm, povm, groups=((0, 1), (1, 2, 3)))

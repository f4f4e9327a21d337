from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkdlab.bits import bits_to_int, int_to_bits
from qkdlab.fields import (
    WIDE_TRINOMIALS,
    Gf2nField,
    WideField,
    clmul,
    field_for_bits,
    gf_inv,
    gf_mul,
    gf_mul_array,
    is_irreducible_exhaustive,
    is_irreducible_rabin,
    poly_mod,
    wide_is_irreducible,
    wide_mul,
)
from qkdlab.hashing import (
    PaBudget,
    draw_seed,
    gf_family,
    hash_gf,
    hash_poly,
    leftover_hash_distance,
    max_key_length,
    poly_family,
)


def test_gf8_hand_example():
    f = Gf2nField(3, 0b1011)
    assert gf_mul(f, 0b010, 0b011) == 0b110
    # full table against schoolbook multiplication mod x^3+x+1
    for a in range(8):
        for b in range(8):
            prod = 0
            for i in range(3):
                if b >> i & 1:
                    prod ^= a << i
            for i in (4, 3):
                if prod >> i & 1:
                    prod ^= 0b1011 << (i - 3)
            assert gf_mul(f, a, b) == prod


def test_field_axioms_exhaustive_small():
    for n in range(1, 9):
        f = Gf2nField(n)
        for a in range(f.order):
            assert gf_mul(f, a, 1) == a
            if a:
                assert gf_mul(f, a, gf_inv(f, a)) == 1
    with pytest.raises(ZeroDivisionError):
        gf_inv(Gf2nField(4), 0)
    with pytest.raises(ValueError):
        Gf2nField(4, 0b10101)  # x^4 + x^2 + 1 = (x^2 + x + 1)^2


def test_reduction_table_irreducible():
    for n in range(1, 65):
        f = Gf2nField(n).reduction_poly
        assert is_irreducible_rabin(f)
        if n <= 16:
            assert is_irreducible_exhaustive(f)


@pytest.mark.parametrize("p", [p for p in sorted(WIDE_TRINOMIALS) if p <= 9689])
def test_wide_trinomials_irreducible(p):
    assert wide_is_irreducible(WideField(p))


def test_wide_mul_matches_integer_route():
    rng = np.random.default_rng(1)
    fld = WideField(607)
    poly = (1 << 607) | (1 << 105) | 1
    for _ in range(5):
        a = rng.integers(0, 2, 607, dtype=np.uint8)
        b = rng.integers(0, 2, 607, dtype=np.uint8)
        ai = int("".join(map(str, a[::-1])), 2)
        bi = int("".join(map(str, b[::-1])), 2)
        expected = poly_mod(clmul(ai, bi), poly)
        got = wide_mul(fld, a, b)
        assert int("".join(map(str, got[::-1])), 2) == expected


@settings(max_examples=50)
@given(st.integers(1, 32), st.data())
def test_vectorised_mul_matches_scalar(n, data):
    f = Gf2nField(n)
    a = data.draw(st.lists(st.integers(0, f.order - 1), min_size=1, max_size=20))
    b = data.draw(st.lists(st.integers(0, f.order - 1), min_size=len(a), max_size=len(a)))
    out = gf_mul_array(f, np.array(a), np.array(b))
    assert [int(x) for x in out] == [gf_mul(f, x, y) for x, y in zip(a, b)]


@settings(max_examples=50)
@given(st.integers(2, 64), st.data())
def test_field_distributive_and_associative(n, data):
    f = Gf2nField(n)
    a, b, c = (data.draw(st.integers(0, f.order - 1)) for _ in range(3))
    assert gf_mul(f, a, b ^ c) == gf_mul(f, a, b) ^ gf_mul(f, a, c)
    assert gf_mul(f, gf_mul(f, a, b), c) == gf_mul(f, a, gf_mul(f, b, c))


def test_hash_gf_examples():
    fam = gf_family(8, 3)
    for x in range(256):
        key = int_to_bits(x, 8)
        assert bits_to_int(hash_gf(fam, key, 0)) == 0
        assert bits_to_int(hash_gf(fam, key, 1)) == x % 8


def test_gf_family_two_universal_exhaustive():
    for n, ell in [(4, 2), (6, 3), (8, 2), (8, 5)]:
        f = Gf2nField(n)
        alphas = np.arange(f.order)
        mask = (1 << ell) - 1
        images = np.array([gf_mul_array(f, np.full(f.order, x), alphas) & mask for x in range(f.order)])
        worst = 0
        for x, y in itertools.combinations(range(f.order), 2):
            worst = max(worst, int(np.count_nonzero(images[x] == images[y])))
        assert worst / f.order <= 2.0 ** -ell + 1e-15


def test_hash_poly_examples_and_delta_bound():
    fam1 = poly_family(4, 1)
    assert all(hash_poly(fam1, [x], a) == x for x in range(16) for a in range(16))
    fam = poly_family(4, 3)
    assert all(hash_poly(fam, [0, 0, 0], a) == 0 for a in range(16))
    worst = 0
    blocks = list(itertools.product(range(16), repeat=3))
    table = {b: [hash_poly(fam, list(b), a) for a in range(16)] for b in blocks}
    rng = np.random.default_rng(3)
    for _ in range(3000):
        i, j = rng.choice(len(blocks), 2, replace=False)
        u, v = table[blocks[i]], table[blocks[j]]
        worst = max(worst, sum(p == q for p, q in zip(u, v)))
    assert worst / 16 <= (3 - 1) / 16
    assert fam.collision_bound == pytest.approx(1 / 8)


def test_hash_poly_delta_exhaustive_over_small_field():
    fam = poly_family(3, 3)
    blocks = list(itertools.product(range(8), repeat=3))
    table = np.array([[hash_poly(fam, list(b), a) for a in range(8)] for b in blocks])
    worst = 0
    for i in range(len(blocks)):
        eq = (table[i + 1:] == table[i]).sum(axis=1)
        if len(eq):
            worst = max(worst, int(eq.max()))
    assert worst / 8 <= 2 / 8


def test_wide_hash_padding_and_identity():
    rng = np.random.default_rng(5)
    fam = gf_family(1000, 100)
    assert fam.field.n == 1279
    key = rng.integers(0, 2, 1000, dtype=np.uint8)
    one = np.zeros(1279, dtype=np.uint8)
    one[-1] = 1
    assert np.array_equal(hash_gf(fam, key, one), key[-100:])
    seed = draw_seed(fam, rng)
    out = hash_gf(fam, key, seed)
    assert out.shape == (100,)
    assert np.array_equal(out, hash_gf(fam, key, seed))


def test_field_for_bits():
    assert field_for_bits(64).n == 64
    assert field_for_bits(65).n == 89
    assert field_for_bits(10000).n == 19937


def test_leftover_hash_distance_examples():
    assert leftover_hash_distance(10, 10, 0) == pytest.approx(0.5)
    assert leftover_hash_distance(60, 20, 0) == pytest.approx(2.0 ** -21)
    assert leftover_hash_distance(80, 20, 1e-10) == pytest.approx(1e-10 + 2.0 ** -31)
    assert leftover_hash_distance(80, 20, 1e-10) == pytest.approx(5.66e-10, rel=1e-3)


def _scan(h, eps_pa, eps_s=0.0):
    best = 0
    for ell in range(0, int(h) + 10):
        if leftover_hash_distance(h, ell, eps_s) <= eps_pa:
            best = ell
    return best


def test_max_key_length_examples():
    budget = PaBudget(hmin_bound=100, leak_ir=30, eps_pa=2.0 ** -21)
    assert max_key_length(budget) == _scan(70, 2.0 ** -21) == 30
    assert max_key_length(PaBudget(50, 50, 1e-6)) == 0
    assert max_key_length(PaBudget(40, 60, 1e-6)) == 0


@settings(max_examples=200)
@given(st.floats(0, 2000), st.floats(0, 500), st.floats(1e-15, 0.5))
def test_max_key_length_matches_scan_and_is_monotone(hmin, leak, eps):
    budget = PaBudget(hmin, leak, eps)
    ell = max_key_length(budget)
    assert ell == (_scan(hmin - leak, eps) if hmin > leak else 0)
    assert max_key_length(PaBudget(hmin + 1.0, leak, eps)) >= ell


def _lhl_distance(f, ell, sets):
    """Exact average over seeds of D(F(K) A E, U x A E) for a flat source per e."""
    alphas = np.arange(f.order, dtype=np.uint64)
    mask = np.uint64((1 << ell) - 1)
    total = 0.0
    for members in sets:
        out = gf_mul_array(f, np.asarray(members, dtype=np.uint64)[:, None], alphas[None, :]) & mask
        counts = np.zeros((f.order, 1 << ell))
        for row in out:
            counts[np.arange(f.order), row.astype(np.int64)] += 1
        p = counts / len(members)
        total += 0.5 * np.abs(p - 2.0 ** -ell).sum(axis=1).mean() / len(sets)
    return total


def test_leftover_hash_end_to_end():
    f = Gf2nField(12)
    rng = np.random.default_rng(7)
    sets = [np.arange(64), rng.choice(4096, 64, replace=False)]
    # Hmin(K|E) = 6: each side value leaves K uniform over 64 strings
    for ell in range(1, 7):
        dist = _lhl_distance(f, ell, sets)
        assert dist <= leftover_hash_distance(6, ell, 0.0) + 1e-12

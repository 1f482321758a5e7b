"""Exact field arithmetic and the numeric embeddings."""

import math
import random
from fractions import Fraction

from kol31.cubic import (
    BIT_FREQ,
    CONSTANTS,
    CubicNumber,
    IM_CONJ_SQ,
    MEAN_TILE_LEN,
    ONE,
    T,
    T2,
    TILE_FREQ,
    TILE_LEN,
    cubic_inv,
    cubic_mul,
    embed_internal,
    embed_real,
    embedding_constants,
    internal_decompose,
)

import pytest


def test_mul_examples():
    assert cubic_mul(T, T) == T2
    assert cubic_mul(T, T2) == CubicNumber.of(1, 0, 2)
    assert cubic_mul(T, CubicNumber.of(0, -2, 1)) == ONE


def test_inverse_examples():
    assert cubic_inv(T) == CubicNumber.of(0, -2, 1)
    assert cubic_inv(ONE) == ONE
    # 1/mean length, value frozen from the root oracle
    inv_l = cubic_inv(MEAN_TILE_LEN)
    assert inv_l == CubicNumber.of(
        Fraction(17, 59), Fraction(-2, 59), Fraction(3, 59)
    )
    assert abs(embed_real(inv_l) - 0.4607198419686708) < 1e-12
    with pytest.raises(ZeroDivisionError):
        cubic_inv(CubicNumber.of(0))


def test_field_axioms_random():
    rng = random.Random(20240831)

    def rand():
        return CubicNumber.of(
            Fraction(rng.randint(-99, 99), rng.randint(1, 19)),
            Fraction(rng.randint(-99, 99), rng.randint(1, 19)),
            Fraction(rng.randint(-99, 99), rng.randint(1, 19)),
        )

    for _ in range(10_000):
        a, b, c = rand(), rand(), rand()
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if not a.is_zero():
            assert a * a.inverse() == ONE


def test_integer_subring_closed():
    rng = random.Random(7)
    for _ in range(500):
        a = CubicNumber.of(rng.randint(-50, 50), rng.randint(-50, 50), rng.randint(-50, 50))
        b = CubicNumber.of(rng.randint(-50, 50), rng.randint(-50, 50), rng.randint(-50, 50))
        for v in (a + b, a - b, a * b):
            assert v.c0.denominator == v.c1.denominator == v.c2.denominator == 1


def test_embedding_constants():
    c = CONSTANTS
    assert abs(c.root**3 - 2 * c.root**2 - 1) < 1e-12
    assert 2.205 < c.root < 2.206
    assert abs(c.conj_re - (1 - c.root / 2)) < 1e-15
    assert c.conj_im > 0
    assert abs(math.hypot(c.conj_re, c.conj_im) - math.sqrt(1 / c.root)) < 1e-9
    # closed form for the imaginary part
    closed = (1 / (2 * math.sqrt(59))) * (-8 * c.root**2 + 25 * c.root - 6)
    assert abs(closed - c.conj_im) < 1e-9
    # the exact rational root satisfies the cubic to the stated precision
    hi = embedding_constants(precision=30)
    assert abs(float(hi.root_exact) - c.root) < 1e-14
    r = hi.root_exact
    assert abs(r * r * r - 2 * r * r - 1) < type(r)(1, 10**30)


def test_embed_real_values():
    assert abs(embed_real(T) - 2.2055694304005904) < 1e-12
    assert abs(embed_real(TILE_LEN["A"]) - 2.658967081916994) < 1e-10
    assert abs(embed_real(MEAN_TILE_LEN) - 2.1705164590415027) < 1e-10
    assert abs(embed_real(TILE_FREQ["B"]) - 0.453397651516404) < 1e-10
    assert abs(embed_real(BIT_FREQ[3]) - 0.6027847152002952) < 1e-10


def test_embed_internal_values():
    b = embed_internal(T)
    assert abs(b - complex(-0.1027847152002952, 0.6654569511528134)) < 1e-9
    assert abs(abs(b) ** 2 - embed_real(cubic_inv(T))) < 1e-9
    assert embed_internal(ONE) == 1 + 0j


def test_internal_decompose_examples():
    d = internal_decompose(T)
    assert d.re == CubicNumber.of(1, Fraction(-1, 2), 0)
    assert d.im_s == ONE
    d2 = internal_decompose(T2)
    assert d2.re == CubicNumber.of(2, 0, Fraction(-1, 2))
    assert d2.im_s == CubicNumber.of(2, -1, 0)
    d5 = internal_decompose(CubicNumber.of(5))
    assert d5.re == CubicNumber.of(5) and d5.im_s.is_zero()


def test_embeddings_are_homomorphisms():
    rng = random.Random(99)
    for _ in range(2_000):
        a = CubicNumber.of(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
        b = CubicNumber.of(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
        pr = embed_real(a * b)
        assert abs(pr - embed_real(a) * embed_real(b)) <= 1e-9 * max(1.0, abs(pr))
        pi = embed_internal(a * b)
        ref = embed_internal(a) * embed_internal(b)
        assert abs(pi - ref) <= 1e-9 * max(1.0, abs(ref))


def test_exact_structural_identities():
    # Im(b)^2 as a field element
    assert IM_CONJ_SQ == cubic_inv(T) - (ONE - T * Fraction(1, 2)) ** 2
    # density relation with the common imaginary factor cancelled
    assert (T2 - T) * MEAN_TILE_LEN == CubicNumber.of(0, -4, 3)
    # frequencies are a probability vector and reproduce the mean length
    assert TILE_FREQ["A"] + TILE_FREQ["B"] + TILE_FREQ["C"] == ONE
    acc = CubicNumber.of(0)
    for L in "ABC":
        acc = acc + TILE_FREQ[L] * TILE_LEN[L]
    assert acc == MEAN_TILE_LEN
    assert BIT_FREQ[3] + BIT_FREQ[1] == ONE


def test_internal_point_ring():
    rng = random.Random(4)
    for _ in range(500):
        x = CubicNumber.of(rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(-9, 9))
        y = CubicNumber.of(rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(-9, 9))
        px, py = internal_decompose(x), internal_decompose(y)
        assert internal_decompose(x * y) == px * py
        assert internal_decompose(x + y) == px + py
    z = internal_decompose(T + T2)
    w = z * z.inverse()
    assert w.re == ONE and w.im_s.is_zero()

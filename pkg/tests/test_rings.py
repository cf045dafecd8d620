import random

import pytest

from polarfloer.rings import (
    F2LAU,
    F2T,
    F2Z2,
    GF2,
    GR_IOTA,
    GR_ONE,
    GR_ONE_PLUS_IOTA,
    F2Laurent,
    F2Poly,
    GroupRingElem,
    f2poly_gcd,
    f2poly_gcdex,
    laurent_inverse_series,
    parse_ring_element,
)


def test_f2poly_arithmetic():
    t = F2Poly.monomial(1)
    one = F2Poly(1)
    p = one + t
    assert p * p == one + t * t  # freshman's dream in char 2
    assert (p + p).is_zero()
    q, r = (p * p + t).divmod(p)
    assert q * p + r == p * p + t
    assert r.degree() < p.degree()


def test_f2poly_gcd():
    t = F2Poly.monomial(1)
    one = F2Poly(1)
    a = (one + t) * (one + t + t * t)
    b = (one + t) * t
    g = f2poly_gcd(a, b)
    assert g == one + t
    x, y, g2 = f2poly_gcdex(a, b)
    assert g2 == g
    assert x * a + y * b == g


def test_inverse_series_identity():
    assert laurent_inverse_series(F2Poly(1), 5) == F2Poly(1)


def test_inverse_series_geometric():
    p = F2Poly.from_exponents([0, 1])
    assert laurent_inverse_series(p, 4) == F2Poly.from_exponents([0, 1, 2, 3, 4])


def test_inverse_series_multiply_back():
    p = F2Poly.from_exponents([0, 1, 2])
    q = laurent_inverse_series(p, 3)
    assert q == F2Poly.from_exponents([0, 1, 3])
    prod = p * q
    assert prod.bits & ((1 << 4) - 1) == 1


def test_inverse_series_rejects_even_constant():
    with pytest.raises(ValueError):
        laurent_inverse_series(F2Poly.monomial(1), 3)


def test_inverse_series_random_multiply_back():
    rng = random.Random(0)
    for _ in range(50):
        bits = rng.getrandbits(12) | 1
        order = rng.randrange(1, 40)
        p = F2Poly(bits)
        q = laurent_inverse_series(p, order)
        assert (p * q).bits & ((1 << (order + 1)) - 1) == 1


def test_laurent_canonical_form():
    x = F2Laurent.from_exponents([-2, 1])
    assert x.min_exponent() == -2
    assert x.max_exponent() == 1
    assert x.times_t(2).min_exponent() == 0
    assert (x + x).is_zero()
    assert F2Laurent.monomial(-3) * F2Laurent.monomial(3) == F2Laurent.monomial(0)


def test_laurent_division():
    a = F2Laurent.from_exponents([-1, 2])
    b = F2Laurent.from_exponents([1])
    q, r = F2LAU.divmod(a, b)
    assert F2LAU.add(F2LAU.mul(q, b), r) == a


def test_group_ring_relations():
    iota = GR_IOTA
    one = GR_ONE
    assert iota * iota == one
    nil = GR_ONE_PLUS_IOTA
    assert (nil * nil).is_zero()
    assert iota.is_unit() and one.is_unit() and not nil.is_unit()


def test_parse_ring_elements():
    assert parse_ring_element(GF2, "1") == 1
    assert parse_ring_element(GF2, "0") == 0
    assert parse_ring_element(F2T, "t^0+t^3") == F2Poly.from_exponents([0, 3])
    assert parse_ring_element(F2LAU, "t^-1+1") == F2Laurent.from_exponents([-1, 0])
    assert parse_ring_element(F2Z2, "1+i") == GroupRingElem(1, 1)
    with pytest.raises(ValueError):
        parse_ring_element(F2T, "t^-1")
    with pytest.raises(ValueError):
        parse_ring_element(F2Z2, "t")


def test_element_strings_round_trip():
    for ring, s in [
        (F2T, "1+t+t^4"),
        (F2LAU, "t^-2+t"),
        (F2Z2, "1+i"),
        (F2Z2, "i"),
    ]:
        assert ring.to_str(parse_ring_element(ring, s)) == s

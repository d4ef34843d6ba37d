import pytest
from hypothesis import given, strategies as st
from sympy import isprime

from tatekit import poly
from tatekit.arith import build_ext_field, embed, inv_mod, legendre, sqrt_mod
from tatekit.errors import PreconditionError, ZeroInverseError

PRIMES = [5, 7, 11, 13, 101, 10007]


def test_smallest_modulus():
    F = build_ext_field(5, 2)
    assert tuple(F.modulus) == (2, 0, 1)  # x^2 + 2
    assert poly.is_irreducible(list(F.modulus), 5)


def test_bad_fields():
    with pytest.raises(PreconditionError):
        build_ext_field(9, 1)
    with pytest.raises(PreconditionError):
        build_ext_field(3, 1)
    with pytest.raises(PreconditionError):
        build_ext_field(7, 0)


def test_inverse_of_zero():
    with pytest.raises(ZeroInverseError):
        inv_mod(6, 9)
    F = build_ext_field(7, 1)
    with pytest.raises(ZeroDivisionError):
        F(0).inverse()


@given(st.sampled_from(PRIMES), st.integers())
def test_sqrt_against_brute_force(p, a):
    F = build_ext_field(p, 1)
    x = F(a)
    roots = sqrt_mod(x)
    if p < 200:
        brute = sorted({r for r in range(p) if (r * r - a) % p == 0})
        assert (roots is None) == (not brute)
        if roots:
            assert sorted(int(r) for r in roots) == brute
    if roots:
        assert all(r * r == x for r in roots)
    assert (roots is not None) == (legendre(a, p) >= 0)


@given(st.sampled_from([(5, 2), (7, 3), (11, 2), (13, 4), (5, 6)]), st.data())
def test_field_axioms(pk, data):
    p, k = pk
    F = build_ext_field(p, k)
    el = st.lists(st.integers(0, p - 1), min_size=k, max_size=k).map(lambda c: F(c))
    x, y, z = data.draw(el), data.draw(el), data.draw(el)
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    if x:
        assert x * x.inverse() == F.one
        assert x ** (F.order - 1) == F.one
    assert x.frobenius() == x ** p
    s = (x * x).sqrt()
    assert s is not None and s * s == x * x


@given(st.sampled_from([(7, 1, 2), (5, 2, 4), (7, 2, 6), (5, 3, 6)]), st.data())
def test_embedding_is_a_homomorphism(triple, data):
    p, k, K = triple
    F, G = build_ext_field(p, k), build_ext_field(p, K)
    el = st.lists(st.integers(0, p - 1), min_size=k, max_size=k).map(lambda c: F(c))
    x, y = data.draw(el), data.draw(el)
    assert embed(x + y, G) == embed(x, G) + embed(y, G)
    assert embed(x * y, G) == embed(x, G) * embed(y, G)
    assert embed(x.frobenius(), G) == embed(x, G).frobenius()


def test_field_size_matches_count():
    F = build_ext_field(5, 2)
    assert len(set(F.elements())) == 25
    assert isprime(F.p)

import itertools

import pytest
from hypothesis import given, strategies as st
from sympy.functions.combinatorial.numbers import kronecker_symbol

from tatekit.classfield import (QuadForm, class_group, class_number, compose, coprime_index_element,
                                elt_norm, form_of_ideal, ideal_mul, ideal_of_form, ideals_of_norm,
                                is_fundamental, is_principal, principal_form, principal_ideal,
                                splitting_type, unit_ideal)
from tatekit.errors import PreconditionError

discs = st.integers(3, 400).map(lambda m: -m).filter(lambda D: D % 4 in (0, 1))


def _analytic_class_number(D):
    """Dirichlet's formula h = -(w / |D|) * sum (D/n) n / 2 over 0 < n < |D|, fundamental D."""
    w = {-3: 6, -4: 4}.get(D, 2)
    s = sum(kronecker_symbol(D, n) * n for n in range(1, -D))
    h, r = divmod(-w * s, 2 * -D)
    assert r == 0
    return h


def test_examples():
    assert class_group(-4) == [QuadForm(1, 0, 1)]
    assert class_group(-15) == [QuadForm(1, 1, 4), QuadForm(2, 1, 2)]
    assert class_number(-23) == 3
    with pytest.raises(PreconditionError):
        class_group(-5)
    assert is_fundamental(-15) and not is_fundamental(-16)


@given(discs.filter(is_fundamental))
def test_class_number_formula(D):
    assert class_number(D) == _analytic_class_number(D)


@given(discs, st.data())
def test_composition_is_a_group(D, data):
    G = class_group(D)
    f, g, h = (data.draw(st.sampled_from(G)) for _ in range(3))
    e = principal_form(D).reduce()
    assert compose(f, e) == f
    assert compose(f, f.inverse()) == e
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    assert compose(f, g) == compose(g, f)
    assert compose(f, g) in G


@given(discs, st.data())
def test_form_ideal_roundtrip(D, data):
    f = data.draw(st.sampled_from(class_group(D)))
    I = ideal_of_form(f)
    assert I.norm == f.a
    assert form_of_ideal(I).reduce() == f


def test_splitting_examples():
    assert splitting_type(3, -15).kind == "ramified"
    sp = splitting_type(2, -15)
    assert sp.kind == "split" and len(sp.primes) == 2
    assert splitting_type(7, -15).kind == "inert"


def test_principality_examples():
    D = -15
    one = is_principal(unit_ideal(D))
    assert one.principal and one.generator == (1, 0)
    two = is_principal(principal_ideal(D, (2, 0)))
    assert two.principal and two.generator in [(2, 0), (-2, 0)]
    P2 = splitting_type(2, D).primes[0]
    rep = is_principal(P2)
    assert not rep.principal and rep.form == QuadForm(2, 1, 2)


def test_norm_is_multiplicative_on_ideals():
    D = -23
    for I, J in itertools.product(ideals_of_norm(D, 2) + ideals_of_norm(D, 3), repeat=2):
        assert ideal_mul(I, J).norm == I.norm * J.norm


@pytest.mark.parametrize("ell", [2, 3, 7])
def test_coprime_index_examples(ell):
    D = -15
    r = coprime_index_element(unit_ideal(D), ell)
    assert r.index == 1
    P2 = splitting_type(2, D).primes[0]
    r = coprime_index_element(P2, ell)
    assert P2.contains(r.element)
    assert elt_norm(D, r.element) == r.index * P2.norm
    assert r.index % ell
    if ell == 2:
        assert r.branch == "split" and r.two_prime_index % 2

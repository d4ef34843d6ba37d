import math

import pytest
from hypothesis import given, strategies as st

from tatekit.curve import Curve, TorsionSubgroupDescriptor, enumerate_points, torsion_basis, trace
from tatekit.errors import CapExceeded, PreconditionError
from tatekit.isogeny import (HomElement, HomLattice, RationalMap, coprime_iso_check, crt_combine,
                             cyclic_kernels, galois_stable_kernels, hom_lattice,
                             isogenies_of_degree, kernel_polynomial, kernel_size_on_torsion,
                             torsion_map_check, velu)

from strategies import curves


def _j(E):
    return E.j_invariant


def test_trivial_kernel_is_identity():
    E = Curve(7, 1, 4)
    phi = velu(E, TorsionSubgroupDescriptor(E, 1, (), 1))
    assert phi.degree == 1 and phi.codomain == E
    P = enumerate_points(E)[3]
    assert phi(P) == P


@given(curves([5, 7, 11, 13]), st.integers(2, 5))
def test_velu_is_a_homomorphism_with_the_right_kernel(E, d):
    try:
        isos = isogenies_of_degree(E, d)
    except CapExceeded:
        return
    pts = enumerate_points(E)
    for phi in isos[:3]:
        assert phi.degree == phi.kernel.order == d
        assert trace(phi.codomain) == trace(E)
        assert all(phi(K).is_identity() for K in phi.kernel.elements)
        F = phi.kernel.generators[0].field
        killed = {P for P in pts if phi(P).is_identity()}
        assert killed == {P for P in pts if P.embed(F) in phi.kernel.elements}
        for P, Q in zip(pts, reversed(pts)):
            assert phi(P + Q) == phi(P) + phi(Q)
            assert phi.codomain.contains(phi(P))


def test_dual_of_degree_two():
    E = Curve(7, 1, 4)
    (phi,) = [f for f in isogenies_of_degree(E, 2)]
    B = torsion_basis(E, 2, 6)
    image = TorsionSubgroupDescriptor(phi.codomain, 2, (phi(B.P).embed(B.field), phi(B.Q).embed(B.field)), 6)
    small = [g for g in image.generators if not g.is_identity()]
    K = TorsionSubgroupDescriptor(phi.codomain, 2, tuple(small[:1]), 6)
    psi = velu(phi.codomain, K)
    assert _j(psi.codomain) == _j(E)
    iso = RationalMap.isomorphism(E, psi.codomain)
    pts = enumerate_points(E, 2)
    ok = [all(psi(phi(P)) == s * iso(2 * P) for P in pts) for s in (1, -1)]
    assert any(ok)


def test_full_torsion_kernel_gives_same_j():
    E = Curve(5, 1, 0)  # E[2] rational
    B = torsion_basis(E, 2)
    phi = velu(E, TorsionSubgroupDescriptor(E, 2, (B.P, B.Q), 1))
    assert phi.degree == 4 and _j(phi.codomain) == _j(E)


def test_kernel_polynomial_has_fp_coefficients_and_roots():
    E = Curve(11, 1, 1)
    for K in galois_stable_kernels(E, 3):
        h = kernel_polynomial(K)
        for P in K.elements:
            if not P.is_identity():
                acc = P.x.field.zero
                for c in reversed(h):
                    acc = acc * P.x + c
                assert not acc


def test_cyclic_kernels_by_enumeration():
    E = Curve(7, 3, 4)
    for d in (2, 3, 4):
        ks = cyclic_kernels(E, d)
        for K in ks:
            assert K.order == d
            assert all(P.frobenius() in K.elements for P in K.elements)


def test_coprime_check_examples():
    E = Curve(7, 1, 4)
    (phi,) = isogenies_of_degree(E, 2)
    r3 = coprime_iso_check(phi, 3)
    assert r3.invertible and r3.coprime
    r2 = coprime_iso_check(phi, 2)
    assert not r2.invertible and not r2.coprime
    ident = velu(E, TorsionSubgroupDescriptor(E, 1, (), 1))
    assert coprime_iso_check(ident, 5).invertible
    assert kernel_size_on_torsion(phi, 4) == 2


def test_kernel_route_agrees_with_matrix_route():
    E = Curve(13, 1, 1)
    for d in (2, 3, 4):
        for phi in isogenies_of_degree(E, d):
            for n in range(2, 9):
                try:
                    coprime_iso_check(phi, n)
                except CapExceeded:
                    continue
                assert torsion_map_check(phi, n).invertible == coprime_iso_check(phi, n).invertible


def test_endomorphism_lattice():
    E = Curve(7, 1, 4)
    L = hom_lattice(E, E, 1)
    t, p = trace(E), E.p
    assert L.rank == 2
    assert L.gram_det() == 4 * p - t * t
    one = HomElement(L, (1, 0))
    assert one.degree() == 1
    assert (3 * one).degree() == 9
    frob = HomElement(L, (0, 1))
    assert frob.degree() == p


def test_non_isogenous_pair_has_zero_lattice():
    assert hom_lattice(Curve(7, 1, 4), Curve(7, 1, 3), 3).rank == 0


def test_gram_degree_matches_rational_map_degree():
    E, E2 = Curve(7, 1, 4), Curve(7, 3, 4)
    L = hom_lattice(E, E2, 3)
    assert L.rank == 2
    for c in [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1)]:
        u = L.element(list(c))
        assert u.degree() == u.rational_map().degree()


def test_crt_small_case():
    E, E2 = Curve(7, 1, 4), Curve(7, 3, 4)
    L = hom_lattice(E, E2, 3)
    by_deg = {}
    for i, g in enumerate(L.generators):
        by_deg.setdefault(g.degree(), tuple(int(i == j) for j in range(len(L.generators))))
    v3 = HomElement(L, by_deg[3])
    v2 = HomElement(L, by_deg[2])
    res = crt_combine([(2, v3), (3, v2)], 6)
    assert math.gcd(res.degree, 6) == 1
    assert all(r.holds and r.invertible for r in res.checks.values())
    with pytest.raises(PreconditionError):
        crt_combine([(2, v2), (3, v2)], 6)


def test_index_in_hom():
    from tatekit.galois import end_discriminant
    E, E2 = Curve(7, 1, 4), Curve(7, 3, 4)
    assert end_discriminant(E) == end_discriminant(E2) == -24
    assert hom_lattice(E, E2, 3).index_in_hom() == 1
    assert hom_lattice(E, E, 1).index_in_hom() == 1
    sub = HomLattice(E, E, [2 * RationalMap.identity(E), RationalMap.frobenius(E)])
    assert sub.index_in_hom() == 2
    j0, other = Curve(7, 0, 1), Curve(7, 3, 1)
    assert end_discriminant(j0) == -3 and end_discriminant(other) == -12
    assert hom_lattice(j0, other, 3).index_in_hom() is None

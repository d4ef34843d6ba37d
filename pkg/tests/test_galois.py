import itertools
import math

import pytest
from hypothesis import given, strategies as st

from tatekit import zmod
from tatekit.curve import Curve, enumerate_points, torsion_basis, trace
from tatekit.errors import CapExceeded, PreconditionError
from tatekit.galois import (brute_force_intertwiners, char_poly_ok, frobenius_matrix,
                            frobenius_model, galois_isomorphic, intertwiners,
                            isomorphic_from_matrices, level_tower_stabilization,
                            p_part_isomorphic, unit_root)
from tatekit.explorer import fp_classes

from strategies import curves


def _conjugate(F, G, n):
    for M in itertools.product(range(n), repeat=4):
        W = ((M[0], M[1]), (M[2], M[3]))
        if math.gcd(zmod.det2(W), n) != 1:
            continue
        if [list(r) for r in zmod.matmul(W, F, n)] == [list(r) for r in zmod.matmul(G, W, n)]:
            return True
    return False


def test_rational_torsion_gives_identity():
    E = Curve(5, 1, 0)  # E(F_5) = Z/2 x Z/2
    assert frobenius_matrix(E, 2).entries == ((1, 0), (0, 1))


@given(curves([5, 7, 11, 13]), st.integers(2, 7))
def test_frobenius_char_poly(E, n):
    if math.gcd(n, E.p) != 1:
        return
    try:
        F = frobenius_matrix(E, n)
    except CapExceeded:
        return
    assert char_poly_ok(F)
    assert F.trace() == trace(E) % n and F.det() == E.p % n


def test_frobenius_matrix_moves_points_like_frobenius():
    E = Curve(7, 1, 4)
    B = torsion_basis(E, 3)
    F = frobenius_matrix(E, 3)
    (a, b), (c, d) = F.entries
    for i, j in itertools.product(range(3), repeat=2):
        R = B.combine(i, j)
        assert R.frobenius() == B.combine(a * i + b * j, c * i + d * j)


@pytest.mark.parametrize("p", [19, 23])
def test_model_is_conjugate_to_point_matrix(p):
    seen = 0
    for E, _ in fp_classes(p):
        if not E.is_ordinary():
            continue
        for q in (2, 3, 4, 5):
            if q % p == 0:
                continue
            try:
                F = frobenius_matrix(E, q)
            except CapExceeded:
                continue
            M = frobenius_model(E, q)
            assert _conjugate(F.entries, M.entries, q), (E, q)
            seen += 1
    assert seen > 10


@given(curves([5, 7]), curves([5, 7]), st.sampled_from([2, 3, 4]))
def test_intertwiner_count_matches_scan(E, E2, n):
    if E.p != E2.p or n % E.p == 0:
        return
    try:
        mod = intertwiners(E, E2, n)
    except CapExceeded:
        return
    F, G = mod.F, mod.G
    assert mod.cardinality == brute_force_intertwiners(F, G, n)
    assert all(mod.satisfies(g) for g in mod.generators)
    W = isomorphic_from_matrices(F, G, n)
    assert (W is not None) == _conjugate(F, G, n)


def test_self_isomorphic_and_trace_mismatch():
    E = Curve(7, 1, 4)
    rep = galois_isomorphic(E, E, 3)
    assert rep.isomorphic
    mod = intertwiners(E, E, 3)
    assert mod.contains(((1, 0), (0, 1))) and mod.contains(mod.F)
    E2 = Curve(7, 1, 3)
    assert trace(E) != trace(E2)
    n = 5
    assert (trace(E) - trace(E2)) % n
    assert not galois_isomorphic(E, E2, n, allow_model=True).isomorphic


def test_level_not_prime_to_p():
    with pytest.raises(PreconditionError):
        galois_isomorphic(Curve(7, 1, 4), Curve(7, 3, 4), 14)


def test_unit_root_examples():
    assert unit_root(2, 5, 2) == 12
    assert unit_root(3, 7, 1) == 3
    with pytest.raises(PreconditionError):
        unit_root(0, 5, 2)


@given(st.sampled_from([5, 7, 11, 13]), st.integers(-6, 6), st.integers(1, 3))
def test_unit_root_by_scan(p, t, nu):
    if t % p == 0 or t * t > 4 * p:
        return
    q = p ** nu
    roots = [u for u in range(q) if (u * u - t * u + p) % q == 0 and u % p == t % p]
    assert roots == [unit_root(t, p, nu)]


def test_p_part():
    E, E2, E3 = Curve(7, 1, 4), Curve(7, 3, 4), Curve(7, 1, 3)
    assert p_part_isomorphic(E, E2, 3).isomorphic
    r = p_part_isomorphic(E, E3, 3)
    assert not r.isomorphic and r.unit_roots[0] % 7 != r.unit_roots[1] % 7


def test_tower_against_scan():
    E, E2 = Curve(7, 0, 1), Curve(7, 3, 1)
    R = level_tower_stabilization(E, E2, 2, 3)
    assert R.reductions_are_homomorphisms
    B1, B2 = R.bases
    for q, card in R.cardinalities.items():
        from tatekit.galois import frobenius_in_basis
        F = frobenius_in_basis(B1).reduce(q).entries
        G = frobenius_in_basis(B2).reduce(q).entries
        assert card == brute_force_intertwiners(F, G, q)
    for i, chain in R.chains.items():
        assert all(a >= b for a, b in zip(chain, chain[1:]))

import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from tatekit.arith import build_ext_field
from tatekit.curve import (Curve, TorsionSubgroupDescriptor, count_points, enumerate_points,
                           full_torsion_degree, full_torsion_subgroup, group_structure,
                           is_isomorphic_fp, mult_image_of_torsion, order_over_extension,
                           preimage_image_check, torsion_basis, trace)
from tatekit.errors import CapExceeded, PreconditionError

from strategies import curves

def _brute_count(E, k=1):
    F = build_ext_field(E.p, k)
    n = 1
    for x in F.elements():
        for y in F.elements():
            if y * y == E.rhs(x):
                n += 1
    return n


def _brute_structure(pts, N):
    exp = 1
    for P in pts:
        exp = math.lcm(exp, P.order(N))
    return N // exp, exp


def test_worked_counts():
    assert count_points(Curve(5, 1, 0)) == (4, 2)
    E = Curve(5, 0, 1)
    assert count_points(E) == (6, 0) and not E.is_ordinary()
    assert order_over_extension(2, 5, 2) == 32
    assert order_over_extension(2, 5, 3) == len(enumerate_points(Curve(5, 1, 0), 3))
    assert group_structure(Curve(5, 1, 0)) == (2, 2)


def test_singular_rejected():
    with pytest.raises(PreconditionError):
        Curve(7, 0, 0)


def test_two_torsion_doubles_to_zero():
    E = Curve(5, 1, 0)
    P = E.point(0, 0)
    assert (P + P).is_identity()
    assert (P + E.identity) == P


@given(curves())
def test_count_matches_double_scan_and_hasse(E):
    N, t = count_points(E)
    assert N == _brute_count(E)
    assert t * t <= 4 * E.p


@given(curves([5, 7]), st.integers(2, 3))
def test_extension_count_matches_enumeration(E, k):
    assert order_over_extension(trace(E), E.p, k) == len(enumerate_points(E, k))


@given(curves([5, 7, 11]), st.integers(1, 2))
def test_group_structure_matches_element_orders(E, k):
    pts = enumerate_points(E, k)
    assert group_structure(E, k) == _brute_structure(pts, len(pts))


def test_group_law_against_cayley_table():
    E = Curve(7, 3, 4)
    pts = enumerate_points(E)
    rng = random.Random(1)
    for _ in range(100):
        P, Q, R = (rng.choice(pts) for _ in range(3))
        assert (P + Q) + R == P + (Q + R)
        assert P + Q == Q + P
        assert P + Q in pts
        assert (P - P).is_identity()


@given(curves([5, 7, 11]), st.integers(2, 6))
def test_torsion_basis_spans_n_torsion(E, n):
    if math.gcd(n, E.p) != 1:
        return
    try:
        B = torsion_basis(E, n)
    except CapExceeded:
        return
    pts = set(B.points())
    assert len(pts) == n * n
    assert all((n * P).is_identity() for P in pts)
    m = B.degree
    if E.p ** m <= 20_000:
        all_pts = enumerate_points(E, m)
        assert {P for P in all_pts if (n * P).is_identity()} == pts
        for d in range(1, m):
            if m % d == 0 and E.p ** d <= 20_000:
                small = enumerate_points(E, d)
                assert sum(1 for P in small if (n * P).is_identity()) < n * n


def test_full_torsion_degree_trivial_and_errors():
    E = Curve(5, 1, 0)
    assert full_torsion_degree(E, 1) == 1
    with pytest.raises(PreconditionError):
        full_torsion_degree(E, 10)
    m = full_torsion_degree(E, 4)
    assert group_structure(E, m)[0] % 4 == 0


def test_mult_image_examples():
    E = Curve(7, 3, 4)
    assert mult_image_of_torsion(E, 4, 1).image_order == 16
    r = mult_image_of_torsion(E, 4, 4)
    assert r.image_order == 1 and r.n1 == 1


def test_preimage_examples():
    E = Curve(7, 1, 4)
    B = torsion_basis(E, 3)
    W = TorsionSubgroupDescriptor(E, 3, (B.P,), B.degree)
    rep = preimage_image_check(E, W, 2)
    assert rep.ok and rep.order_preimage == 12
    full = preimage_image_check(E, full_torsion_subgroup(B), 2)
    assert full.ok and full.order_preimage == 36
    zero = preimage_image_check(E, TorsionSubgroupDescriptor(E, 3, (), B.degree), 2)
    assert zero.ok and zero.order_preimage == 4


def test_twist_test():
    E = Curve(7, 1, 4)
    u = 3
    assert is_isomorphic_fp(E, Curve(7, u ** 4, 4 * u ** 6))
    assert not is_isomorphic_fp(E, Curve(7, 3, 4))


def test_dlog_roundtrip():
    E = Curve(11, 1, 1)
    B = torsion_basis(E, 4)
    for i, j in itertools.product(range(4), repeat=2):
        assert B.dlog(B.combine(i, j)) == (i, j)

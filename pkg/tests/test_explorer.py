import json

import pytest

from tatekit.curve import Curve, count_points, group_structure, trace
from tatekit.errors import InternalContradiction, PreconditionError
from tatekit.explorer import (clear_caches, enumerate_curves, find_twin_pair, glue_isogenies,
                              infinite_levels_imply_isogeny_check, verify_certificate,
                              verify_coprime_isogeny)
from tatekit.isogeny import coprime_iso_check


@pytest.mark.parametrize("p", [5, 7, 11])
def test_enumeration_partitions_all_curves(p):
    reports = enumerate_curves(p)
    singular = sum(1 for a in range(p) for b in range(p) if (4 * a ** 3 + 27 * b * b) % p == 0)
    assert sum(sum(r.class_sizes) for r in reports) == p * p - singular
    for r in reports:
        assert r.trace ** 2 <= 4 * p
        for c in r.representatives:
            assert trace(Curve(p, c["a"], c["b"])) == r.trace
    if p == 5:
        assert singular == 5


def test_bad_prime():
    with pytest.raises(PreconditionError):
        enumerate_curves(9)


def test_no_twins_at_five():
    assert find_twin_pair(5) is None


@pytest.fixture(scope="module")
def cert7():
    return find_twin_pair(7, 32, 3)


def test_twin_certificate_at_seven(cert7):
    E, E2 = cert7.curves
    assert E.j_invariant != E2.j_invariant
    assert trace(E) == trace(E2) and E.is_ordinary()
    for k in (1, 2, 3):
        assert group_structure(E, k) == group_structure(E2, k)
    assert [lv["modulus"] for lv in cert7.levels] == [2, 4, 8, 16, 32, 3, 9, 27, 5, 25, 11, 13, 17, 19, 23, 29, 31]


def test_certificate_is_deterministic(cert7):
    first = cert7.to_json()
    clear_caches()
    again = find_twin_pair(7, 32, 3).to_json()
    assert first == again
    d = json.loads(first)
    assert set(d) == {"p", "curves", "trace", "levels", "p_part", "isogenies", "group_structures"}


def test_certificate_reverifies(cert7):
    checks = cert7.verify()
    assert checks and all(checks.values())


def test_tampered_certificate_fails(cert7):
    d = json.loads(cert7.to_json())
    W = d["levels"][1]["witness"]
    W[0][0] += 1
    with pytest.raises(InternalContradiction):
        verify_certificate(d)
    d = json.loads(cert7.to_json())
    d["p_part"]["unit_root"] += 1
    with pytest.raises(InternalContradiction):
        verify_certificate(d)


def test_coprime_isogeny(cert7):
    E, E2 = cert7.curves
    assert verify_coprime_isogeny(E, E, 2, 3).degree == 1
    phi = verify_coprime_isogeny(E, E2, 2, 7)
    assert phi.degree % 2 and coprime_iso_check(phi, 2).invertible


def test_level_scan():
    E, E2, E3 = Curve(7, 1, 4), Curve(7, 3, 4), Curve(7, 1, 3)
    same = infinite_levels_imply_isogeny_check(E, E, 12)
    assert same.traces_equal and len(same.isomorphic_levels) == 10
    twin = infinite_levels_imply_isogeny_check(E, E2, 12)
    assert twin.traces_equal and twin.isomorphic_levels == same.isomorphic_levels
    other = infinite_levels_imply_isogeny_check(E, E3, 40)
    assert not other.traces_equal and not other.forcing_levels
    window = abs(trace(E) - trace(E3))
    assert all(n <= window for n in other.isomorphic_levels)


def test_glue_at_eleven():
    E, E2 = Curve(11, 1, 1), Curve(11, 2, 6)
    res = glue_isogenies(E, E2)
    assert res.degree % 2 and res.degree % 3 and res.degree % 5 and res.degree % 7
    assert all(r.invertible and r.holds for r in res.checks.values())

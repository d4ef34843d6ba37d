import itertools
import random

import pytest
from hypothesis import given, strategies as st

from tatekit import zmod
from tatekit.pairing_model import (SymplecticModule, adjoint_check, four_square_neg_one,
                             graph_isotropy_check, matrix_isotropy_violation, order_condition_check,
                             product_pair, quaternion_matrix, scalar_graph_isotropic, sqrt_minus_one)


def test_sqrt_minus_one_examples():
    assert sqrt_minus_one(1) == 0
    assert sqrt_minus_one(5) == 2
    assert sqrt_minus_one(3) is None


def test_four_square_examples():
    assert four_square_neg_one(2) == (1, 0, 0, 0, 1)
    assert four_square_neg_one(5) == (2, 0, 0, 0, 4)
    assert four_square_neg_one(3) == (1, 1, 0, 0, 2)


@given(st.integers(1, 3000))
def test_four_square_minimal(n):
    a, b, c, d, s = four_square_neg_one(n)
    assert a * a + b * b + c * c + d * d == s
    assert s % n == (n - 1) % n and s > 0
    assert a >= b >= c >= d >= 0
    # every positive integer is a sum of four squares, so the least admissible s wins
    assert s == ((n - 1) % n or n)


def test_quaternion_examples():
    Q = quaternion_matrix(1, 0, 0, 0)
    assert Q.matrix == zmod.identity(4) and Q.s == 1
    J = quaternion_matrix(0, 1, 0, 0)
    assert zmod.matmul(zmod.transpose(J.matrix), J.matrix) == zmod.identity(4)
    sq = zmod.matmul(J.matrix, J.matrix)
    assert sq == [[-int(i == j) for j in range(4)] for i in range(4)]


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
def test_gram_identity(a, b, c, d):
    Q = quaternion_matrix(a, b, c, d)
    G = zmod.matmul(zmod.transpose(Q.matrix), Q.matrix)
    assert G == [[Q.s * int(i == j) for j in range(4)] for i in range(4)]


def test_isotropy_full_enumeration_small():
    K = SymplecticModule(2)
    Q = quaternion_matrix(*four_square_neg_one(2)[:4])
    rep = graph_isotropy_check(Q, K)
    assert rep.exhaustive and rep.isotropic and not rep.adjoint_violations


def test_isotropy_by_plain_loops():
    n = 3
    K = SymplecticModule(n)
    a, b, c, d, _ = four_square_neg_one(n)
    Q = quaternion_matrix(a, b, c, d)
    rng = random.Random(5)
    for _ in range(300):
        x = tuple(tuple(rng.randrange(n) for _ in range(2)) for _ in range(4))
        y = tuple(tuple(rng.randrange(n) for _ in range(2)) for _ in range(4))
        assert (product_pair(K, x, y) + product_pair(K, Q.apply(x, n), Q.apply(y, n))) % n == 0


def test_non_solution_is_caught():
    u = [[1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 3]]
    assert matrix_isotropy_violation(u, SymplecticModule(5)) is not None
    Q = quaternion_matrix(1, 0, 0, 0)  # s = 1 is not -1 mod 7
    assert not graph_isotropy_check(Q, SymplecticModule(7), samples=200).isotropic


def test_adjoint_identity():
    rng = __import__("numpy").random.default_rng(0)
    u = [[1, 2, 3, 4], [0, 1, 5, 6], [2, 0, 1, 1], [3, 3, 0, 1]]
    assert adjoint_check(u, SymplecticModule(6), 500, rng) == []


def test_order_condition():
    rep = order_condition_check(quaternion_matrix(1, 0, 0, 0), SymplecticModule(2))
    assert rep.ok and rep.order_V == 256 and rep.order_V_squared == 4 ** 8
    rep3 = order_condition_check(quaternion_matrix(1, 1, 0, 0), SymplecticModule(3))
    assert rep3.order_V == 3 ** 8


@given(st.integers(2, 30))
def test_scalar_graph_criterion(n):
    K = SymplecticModule(n)
    for a in range(n):
        assert scalar_graph_isotropic(a, K) == ((a * a + 1) % n == 0)


def test_symplectic_form_nondegenerate():
    for n, g in itertools.product((2, 3, 5), (1, 2)):
        assert SymplecticModule(n, g).is_nondegenerate()

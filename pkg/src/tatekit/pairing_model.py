"""A finite symplectic model (Z/n)^(2g) and the quaternion trick inside it.

Pairings take values in Z/n, read as exponents of a fixed n-th root of unity.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

from . import zmod
from .errors import PreconditionError


@dataclass(frozen=True)
class SymplecticModule:
    """(Z/n)^(2g) with e((x, x'), (y, y')) = sum x_i y'_i - x'_i y_i over g blocks."""
    n: int
    g: int = 1

    @property
    def rank(self) -> int:
        return 2 * self.g

    @property
    def order(self) -> int:
        return self.n ** self.rank

    def form_matrix(self):
        r = self.rank
        J = [[0] * r for _ in range(r)]
        for i in range(self.g):
            J[2 * i][2 * i + 1] = 1
            J[2 * i + 1][2 * i] = -1
        return J

    def pair(self, x, y) -> int:
        s = 0
        for i in range(self.g):
            s += x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]
        return s % self.n

    def elements(self):
        return itertools.product(range(self.n), repeat=self.rank)

    def random_element(self, rng: random.Random):
        return tuple(rng.randrange(self.n) for _ in range(self.rank))

    def is_nondegenerate(self) -> bool:
        d = _int_det(self.form_matrix())
        return math.gcd(d, self.n) == 1


def product_pair(K: SymplecticModule, xs, ys) -> int:
    """The m-fold product form on K^m: sum of the pairings of the components."""
    return sum(K.pair(x, y) for x, y in zip(xs, ys)) % K.n


def _int_det(M) -> int:
    from fractions import Fraction
    from .isogeny import _det
    return int(_det([[Fraction(x) for x in r] for r in M]))


# -- square roots of -1 and four squares -------------------------------------------------

def sqrt_minus_one(n: int):
    """Smallest a >= 0 with a^2 = -1 mod n, or None."""
    if n < 1:
        raise PreconditionError("n must be positive")
    for a in range(n):
        if (a * a + 1) % n == 0:
            return a
    return None


def four_square_neg_one(n: int) -> tuple[int, int, int, int, int]:
    """(a, b, c, d, s) with s = a^2+b^2+c^2+d^2 = -1 mod n and s > 0 minimal.

    Among representations of s with a >= b >= c >= d >= 0 the greedy one wins
    (largest a, then largest b, ...), so n = 5 gives (2, 0, 0, 0).
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    s = (n - 1) % n or n
    while True:
        rep = _four_squares(s)
        if rep is not None:
            return (*rep, s)
        s += n


def _four_squares(s: int, parts: int = 4):
    """Greedy representation of s as a sum of `parts` squares in descending order."""
    if parts == 0:
        return () if s == 0 else None
    for a in range(math.isqrt(s), -1, -1):
        if parts * a * a < s:
            return None
        rest = _four_squares(s - a * a, parts - 1)
        if rest is not None and (not rest or rest[0] <= a):
            return (a, *rest)
    return None


# -- the quaternion matrix ----------------------------------------------------------------

@dataclass(frozen=True)
class QuaternionMatrix:
    a: int
    b: int
    c: int
    d: int

    @property
    def s(self) -> int:
        return self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2

    @property
    def matrix(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        # entry (2, 4) is -c: with +c column 4 is not orthogonal to the others
        return [[a, -b, -c, -d],
                [b, a, d, -c],
                [c, -d, a, b],
                [d, c, -b, a]]

    def gram_ok(self) -> bool:
        I = self.matrix
        return zmod.matmul(zmod.transpose(I), I) == [[self.s * (i == j) for j in range(4)] for i in range(4)]

    def apply(self, xs, n: int):
        """I acting on K^4: row i of I combines the four components."""
        M = self.matrix
        k = len(xs[0])
        return tuple(tuple(sum(M[i][j] * xs[j][t] for j in range(4)) % n for t in range(k)) for i in range(4))


def quaternion_matrix(a: int, b: int, c: int, d: int) -> QuaternionMatrix:
    Q = QuaternionMatrix(a, b, c, d)
    if not Q.gram_ok():
        raise AssertionError("I^T I differs from s I")
    return Q


# -- isotropy -------------------------------------------------------------------------------

@dataclass
class IsotropyReport:
    n: int
    g: int
    pairs_checked: int
    exhaustive: bool
    violations: list
    adjoint_violations: list

    @property
    def isotropic(self) -> bool:
        return not self.violations


def _unit(K, i):
    v = [0] * (4 * K.rank)
    v[i] = 1
    return _split(v, K)


def _split(v, K):
    r = K.rank
    return tuple(tuple(v[j * r + t] for t in range(r)) for j in range(4))


def _pair_batch(K: SymplecticModule, X, Y):
    """Product form on K^4 for batches X, Y of shape (N, 4, 2g)."""
    ev, od = X[..., 0::2], X[..., 1::2]
    return (ev * Y[..., 1::2] - od * Y[..., 0::2]).sum(axis=(1, 2)) % K.n


def _apply_batch(M, X, n):
    return np.einsum("ij,njt->nit", np.asarray(M, dtype=np.int64), X) % n


def graph_isotropy_check(Q: QuaternionMatrix, K: SymplecticModule, samples: int = 10_000,
                         exhaustive_limit: int = 2 ** 23, seed: int = 0,
                         adjoint_samples: int = 1000, chunk: int = 2 ** 18) -> IsotropyReport:
    """Check that V = {(x, Ix)} is isotropic in K^4 x K^4.

    Basis pairs always run. When #K^4 <= exhaustive_limit every x in K^4 is
    paired with every basis vector y, which covers all pairs because the form
    is linear in y. Random pairs are sampled on top.
    """
    n = K.n
    dim = 4 * K.rank
    shape = (4, K.rank)
    M = Q.matrix
    violations = []

    def run(X, Y):
        X = X.reshape(-1, *shape)
        Y = Y.reshape(-1, *shape)
        vals = (_pair_batch(K, X, Y) + _pair_batch(K, _apply_batch(M, X, n), _apply_batch(M, Y, n))) % n
        bad = np.nonzero(vals)[0]
        violations.extend((X[i].tolist(), Y[i].tolist()) for i in bad[:20])
        return len(vals)

    eye = np.eye(dim, dtype=np.int64)
    idx = np.array(list(itertools.product(range(dim), repeat=2)))
    checked = run(eye[idx[:, 0]], eye[idx[:, 1]])
    exhaustive = n ** dim <= exhaustive_limit
    if exhaustive:
        # column i of W is the functional x -> e(x, e_i) + e(Ix, I e_i)
        J = np.kron(np.eye(4, dtype=np.int64), np.asarray(K.form_matrix(), dtype=np.int64))
        Qb = np.kron(np.asarray(M, dtype=np.int64), np.eye(K.rank, dtype=np.int64))
        W = (J + Qb.T @ J @ Qb) % n
        powers = n ** np.arange(dim - 1, -1, -1, dtype=np.int64)
        for start in range(0, n ** dim, chunk):
            codes = np.arange(start, min(start + chunk, n ** dim), dtype=np.int64)
            X = (codes[:, None] // powers) % n
            vals = (X @ W) % n
            checked += vals.size
            for r, i in zip(*np.nonzero(vals)):
                if len(violations) < 20:
                    violations.append((X[r].reshape(shape).tolist(), eye[i].reshape(shape).tolist()))
    rng = np.random.default_rng([n, K.g, Q.a, Q.b, Q.c, Q.d, seed])
    checked += run(rng.integers(0, n, size=(samples, dim)), rng.integers(0, n, size=(samples, dim)))
    adj = adjoint_check(M, K, adjoint_samples, rng)
    return IsotropyReport(n, K.g, checked, exhaustive, violations[:20], adj)


def adjoint_check(u, K: SymplecticModule, samples: int, rng) -> list:
    """e(ux, y) = e(x, u^T y) on K^4 for the integer 4x4 matrix u; returns violations."""
    n = K.n
    X = rng.integers(0, n, size=(samples, 4, K.rank))
    Y = rng.integers(0, n, size=(samples, 4, K.rank))
    lhs = _pair_batch(K, _apply_batch(u, X, n), Y)
    rhs = _pair_batch(K, X, _apply_batch(zmod.transpose(u), Y, n))
    bad = np.nonzero(lhs != rhs)[0]
    return [(X[i].tolist(), Y[i].tolist()) for i in bad[:20]]


def matrix_isotropy_violation(u, K: SymplecticModule, tries: int = 2000, seed: int = 0):
    """A pair breaking isotropy of the graph of an arbitrary integer 4x4 matrix, or None."""
    n = K.n
    rng = random.Random(seed)
    dim = 4 * K.rank

    def act(xs):
        k = len(xs[0])
        return tuple(tuple(sum(u[i][j] * xs[j][t] for j in range(4)) % n for t in range(k)) for i in range(4))

    basis = [_unit(K, i) for i in range(dim)]
    cands = list(itertools.product(basis, repeat=2))
    for _ in range(tries):
        cands.append((_split([rng.randrange(n) for _ in range(dim)], K),
                      _split([rng.randrange(n) for _ in range(dim)], K)))
    for x, y in cands:
        if (product_pair(K, x, y) + product_pair(K, act(x), act(y))) % n:
            return x, y
    return None


@dataclass
class OrderReport:
    order_K: int
    order_V: int
    order_V_squared: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.order_V == self.order_K ** 4 and self.order_V_squared == self.expected


def order_condition_check(Q: QuaternionMatrix, K: SymplecticModule, enumerate_limit: int = 2 ** 16) -> OrderReport:
    """#V = #K^4 for the graph V, and #V^2 = #K^8."""
    n = K.n
    if K.order ** 4 <= enumerate_limit:
        vecs = [_split(v, K) for v in itertools.product(range(n), repeat=4 * K.rank)]
        V = {(x, Q.apply(x, n)) for x in vecs}
        size = len(V)
    else:
        size = K.order ** 4  # a graph has as many points as its source
    return OrderReport(K.order, size, size * size, K.order ** 8)


def scalar_graph_isotropic(a: int, K: SymplecticModule) -> bool:
    """Graph of multiplication by a in K x K is isotropic iff a^2 = -1 mod n (checked on
    basis pairs, which suffices by bilinearity)."""
    n = K.n
    basis = [tuple(int(i == j) for j in range(K.rank)) for i in range(K.rank)]
    for x, y in itertools.product(basis, repeat=2):
        ax = tuple(a * t % n for t in x)
        ay = tuple(a * t % n for t in y)
        if (K.pair(x, y) + K.pair(ax, ay)) % n:
            return False
    return True

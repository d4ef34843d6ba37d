"""Integer matrices: Smith and Hermite normal forms, linear systems over Z/n.

Matrices are lists of row lists of Python ints.
"""

from __future__ import annotations

import itertools
import math


def identity(k: int) -> list[list[int]]:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def matmul(A, B, n: int | None = None):
    rows = [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]
    if n is not None:
        rows = [[x % n for x in r] for r in rows]
    return rows


def transpose(A):
    return [list(r) for r in zip(*A)]


def det2(M) -> int:
    return M[0][0] * M[1][1] - M[0][1] * M[1][0]


def smith(A):
    """(U, D, V) with U*A*V = D in Smith form: diagonal, nonnegative, each entry
    dividing the next; U and V unimodular."""
    m, k = len(A), len(A[0])
    D = [list(r) for r in A]
    U, V = identity(m), identity(k)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    for t in range(min(m, k)):
        while True:
            piv = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, k) if D[i][j]]
            if not piv:
                return U, D, V
            _, i, j = min(piv)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, m):
                q = D[i][t] // D[t][t]
                if q:
                    D[i] = [x - q * y for x, y in zip(D[i], D[t])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[t])]
                if D[i][t]:
                    done = False
            for j in range(t + 1, k):
                q = D[t][j] // D[t][t]
                if q:
                    for M in (D, V):
                        for r in M:
                            r[j] -= q * r[t]
                if D[t][j]:
                    done = False
            if not done:
                continue
            # the pivot must divide the rest of the block
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, k) if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            D[t] = [x + y for x, y in zip(D[t], D[bad])]
            U[t] = [x + y for x, y in zip(U[t], U[bad])]
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return U, D, V


def solve_homogeneous(A, n: int):
    """Generators and cardinality of {x in (Z/n)^k : A x = 0 mod n}."""
    k = len(A[0])
    U, D, V = smith(A)
    gens, card = [], 1
    for i in range(k):
        d = D[i][i] if i < len(D) else 0
        g = math.gcd(d, n)
        card *= g
        step = n // g
        if step % n:
            gens.append([(V[r][i] * step) % n for r in range(k)])
    return gens, card


def hnf(rows):
    """Row-style Hermite normal form of the lattice spanned by integer rows.

    Returns (H, T) with H = T * rows, H upper triangular with positive pivots and
    reduced entries above each pivot; zero rows dropped from H and T.
    """
    A = [list(r) for r in rows]
    m = len(A)
    if not m:
        return [], []
    k = len(A[0])
    T = identity(m)
    r = 0
    for c in range(k):
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            i = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[i] = A[i], A[r]
            T[r], T[i] = T[i], T[r]
            clean = True
            for i in range(r + 1, m):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    T[i] = [x - q * y for x, y in zip(T[i], T[r])]
                if A[i][c]:
                    clean = False
            if clean:
                break
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
                T[r] = [-x for x in T[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    T[i] = [x - q * y for x, y in zip(T[i], T[r])]
            r += 1
            if r == m:
                break
    return A[:r], T[:r]


class ModuleModN:
    """A submodule of (Z/n)^k given by generators, kept as a full-rank HNF lattice
    containing n Z^k."""

    def __init__(self, n: int, k: int, gens):
        self.n, self.k = n, k
        rows = [[x % n for x in g] for g in gens]
        rows += [[n * int(i == j) for j in range(k)] for i in range(k)]
        self.basis, _ = hnf(rows)
        self.cardinality = n ** k // math.prod(self.basis[i][i] for i in range(k))

    def generators(self):
        return [[x % self.n for x in r] for r in self.basis if any(x % self.n for x in r)]

    def contains(self, v) -> bool:
        v = [x % self.n for x in v]
        for i in range(self.k):
            q, rem = divmod(v[i], self.basis[i][i])
            if rem:
                return False
            v = [x - q * y for x, y in zip(v, self.basis[i])]
        return True

    def __le__(self, other: "ModuleModN") -> bool:
        return all(other.contains(g) for g in self.generators())

    def __eq__(self, other):
        return isinstance(other, ModuleModN) and self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, tuple(map(tuple, self.basis))))

    def elements(self):
        """All elements; use only for small modules."""
        diag = [self.basis[i][i] for i in range(self.k)]
        for coeffs in itertools.product(*(range(self.n // d) for d in diag)):
            v = [0] * self.k
            for c, row in zip(coeffs, self.basis):
                if c:
                    v = [x + c * y for x, y in zip(v, row)]
            yield tuple(x % self.n for x in v)

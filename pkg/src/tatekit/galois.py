"""Frobenius on torsion as matrices over Z/n, Galois intertwiners, and the
ordinary p-part through the unit root."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

from sympy import factorint

from . import zmod
from .curve import (Curve, MAX_EXT_DEGREE, TorsionBasis, _valuation, full_torsion_degree,
                    torsion_basis, trace)
from .errors import CapExceeded, InternalContradiction, PreconditionError


@dataclass(frozen=True)
class FrobeniusMatrix:
    """Matrix of the p-power Frobenius on E[n]; columns are images of the basis.

    route is "points" when read off a torsion basis and "model" when built from
    the endomorphism-ring model (then basis is None).
    """
    curve: Curve
    n: int
    entries: tuple
    basis: TorsionBasis | None = None
    route: str = "points"

    @property
    def matrix(self):
        return [list(r) for r in self.entries]

    def trace(self) -> int:
        return (self.entries[0][0] + self.entries[1][1]) % self.n

    def det(self) -> int:
        return zmod.det2(self.entries) % self.n

    def order(self) -> int:
        """Order of the matrix in GL_2(Z/n)."""
        I = _mod(((1, 0), (0, 1)), self.n)
        M, k = self.entries, 1
        while M != I:
            M = _mod(zmod.matmul(M, self.entries), self.n)
            k += 1
            if k > self.n ** 4:
                raise InternalContradiction("Frobenius matrix is not invertible")
        return k

    def reduce(self, d: int) -> "FrobeniusMatrix":
        if self.n % d:
            raise PreconditionError(f"{d} does not divide {self.n}")
        basis = self.basis.reduce(d) if self.basis is not None else None
        return FrobeniusMatrix(self.curve, d, _mod(self.entries, d), basis, self.route)


def _mod(M, n):
    return tuple(tuple(x % n for x in r) for r in M)


def char_poly_ok(F: FrobeniusMatrix) -> bool:
    """F^2 - a_p F + p I = 0 mod n."""
    t, p, n = trace(F.curve), F.curve.p, F.n
    M = F.matrix
    M2 = zmod.matmul(M, M)
    return all((M2[i][j] - t * M[i][j] + p * (i == j)) % n == 0 for i in range(2) for j in range(2))


@lru_cache(maxsize=None)
def frobenius_matrix(E: Curve, n: int, max_degree: int = MAX_EXT_DEGREE) -> FrobeniusMatrix:
    """Frobenius on E[n] in the basis from torsion_basis."""
    B = torsion_basis(E, n, max_degree=max_degree)
    return frobenius_in_basis(B)


def frobenius_in_basis(B: TorsionBasis) -> FrobeniusMatrix:
    a, c = B.dlog(B.P.frobenius())
    b, d = B.dlog(B.Q.frobenius())
    F = FrobeniusMatrix(B.curve, B.n, ((a, b), (c, d)), B)
    if F.n > 1 and not char_poly_ok(F):
        raise InternalContradiction(f"Frobenius matrix on E[{B.n}] violates its characteristic polynomial")
    return F


# -- the endomorphism-ring model of T_ell -----------------------------------------

def _scalar_on(E: Curve, m: int):
    """s if Frobenius acts on E[m] as the scalar s, else None."""
    if m == 1:
        return 0
    try:
        F = frobenius_matrix(E, m)
    except CapExceeded:
        # a scalar action s would put E[m] over F_{p^ord(s)}, ord(s) <= phi(m)
        if _totient(m) <= MAX_EXT_DEGREE:
            return None
        raise
    (a, b), (c, d) = F.entries
    if b == 0 and c == 0 and a == d:
        return a
    return None


def _totient(m: int) -> int:
    return math.prod((l - 1) * l ** (e - 1) for l, e in factorint(m).items())


@lru_cache(maxsize=None)
def endomorphism_level(E: Curve, ell: int) -> tuple[int, int]:
    """(c, s): the largest c with (pi - s)/ell^c an endomorphism, i.e. Frobenius
    acts as the scalar s on E[ell^c]. Ordinary curves only."""
    if not E.is_ordinary():
        raise PreconditionError("endomorphism level is only computed for ordinary curves")
    if ell == E.p:
        raise PreconditionError("ell must differ from p")
    t, p = trace(E), E.p
    disc = t * t - 4 * p
    cmax = _valuation(-disc, ell) // 2
    best = (0, 0)
    for c in range(1, cmax + 1):
        s = _scalar_on(E, ell ** c)
        if s is None:
            break
        best = (c, s)
    return best


def end_discriminant(E: Curve) -> int:
    """disc End(E) = (t^2 - 4p) / prod ell^(2c) over the primes of the Frobenius discriminant."""
    t, p = trace(E), E.p
    d = t * t - 4 * p
    for ell in factorint(-d):
        c, _ = endomorphism_level(E, ell)
        d //= ell ** (2 * c)
    return d


def frobenius_model(E: Curve, n: int) -> FrobeniusMatrix:
    """Frobenius on T_ell / n for n = ell^k, from T_ell free of rank one over
    End(E) tensor Z_ell = Z_ell[(pi - s)/ell^c]."""
    f = factorint(n)
    if len(f) != 1:
        raise PreconditionError("the model is built one prime power at a time")
    (ell, _), = f.items()
    t, p = trace(E), E.p
    c, s = endomorphism_level(E, ell)
    lc = ell ** c
    T = (t - 2 * s) // lc
    N = (s * s - t * s + p) // (lc * lc)
    if (t - 2 * s) % lc or (s * s - t * s + p) % (lc * lc):
        raise InternalContradiction("scalar Frobenius level inconsistent with the trace")
    M = ((s, -lc * N), (lc, s + lc * T))
    F = FrobeniusMatrix(E, n, _mod(M, n), None, "model")
    if not char_poly_ok(F):
        raise InternalContradiction("model matrix violates the characteristic polynomial")
    return F


def frobenius_any(E: Curve, n: int) -> FrobeniusMatrix:
    """Point-based matrix when E[n] is within the cap, otherwise the model
    (ordinary curves, prime-power n)."""
    try:
        return frobenius_matrix(E, n)
    except CapExceeded:
        return frobenius_model(E, n)


# -- intertwiners ----------------------------------------------------------------

def _flatten(M):
    return [M[0][0], M[0][1], M[1][0], M[1][1]]


def _unflatten(v):
    return ((v[0], v[1]), (v[2], v[3]))


def _system(F, G):
    """Rows of the linear map M -> M F - G M on flattened 2x2 matrices."""
    rows = []
    for i in range(2):
        for j in range(2):
            row = [0] * 4
            for k in range(2):
                row[2 * i + k] += F[k][j]
                row[2 * k + j] -= G[i][k]
            rows.append(row)
    return rows


@dataclass
class IntertwinerModule:
    """{M : M F_E = F_E' M} over Z/n."""
    n: int
    F: tuple
    G: tuple
    generators: list
    cardinality: int
    module: zmod.ModuleModN = field(repr=False)

    def contains(self, M) -> bool:
        return self.module.contains(_flatten(M))

    def satisfies(self, M) -> bool:
        return is_intertwiner(M, self.F, self.G, self.n)


def is_intertwiner(M, F, G, n) -> bool:
    return zmod.matmul(M, F, n) == zmod.matmul(G, M, n)


def intertwiner_module(F, G, n: int) -> IntertwinerModule:
    F, G = _mod(F, n), _mod(G, n)
    gens, card = zmod.solve_homogeneous(_system(F, G), n)
    mats = [_unflatten(g) for g in gens]
    for M in mats:
        if not is_intertwiner(M, F, G, n):
            raise InternalContradiction("solver returned a non-intertwiner")
    module = zmod.ModuleModN(n, 4, gens)
    if module.cardinality != card:
        raise InternalContradiction("intertwiner count disagrees with its span")
    return IntertwinerModule(n, F, G, [_unflatten(g) for g in module.generators()], card, module)


def intertwiners(E: Curve, E2: Curve, n: int) -> IntertwinerModule:
    """Galois-equivariant maps E[n] -> E2[n] as matrices."""
    return intertwiner_module(frobenius_matrix(E, n).entries, frobenius_matrix(E2, n).entries, n)


def brute_force_intertwiners(F, G, n: int) -> int:
    """Count intertwiners by scanning all n^4 matrices."""
    count = 0
    for v in itertools.product(range(n), repeat=4):
        if is_intertwiner(_unflatten(v), F, G, n):
            count += 1
    return count


def _invertible_in(module: IntertwinerModule, ell: int, k: int):
    """An element of a module over Z/ell^k with unit determinant, or None.

    Invertibility only depends on the reduction mod ell, so it suffices to scan
    the F_ell-span of the generators.
    """
    n = ell ** k
    gens = [_flatten(g) for g in module.generators]
    red, lifts = [], []
    for g, v in zip(gens, gens):
        gm = [x % ell for x in g]
        if any(gm):
            red.append(gm)
            lifts.append(v)
    # a basis of the reduced span over F_ell, tracking lifts
    basis, blifts = [], []
    for g, v in zip(red, lifts):
        trial = basis + [g]
        if _rank_mod(trial, ell) > len(basis):
            basis.append(g)
            blifts.append(v)
    for coeffs in itertools.product(range(ell), repeat=len(basis)):
        w = [sum(c * b[i] for c, b in zip(coeffs, blifts)) % n for i in range(4)]
        if math.gcd(zmod.det2(_unflatten(w)), ell) == 1:
            return _unflatten(w)
    return None


def _rank_mod(rows, ell):
    A = [[x % ell for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(A[0]) if A else 0
    while rank < len(A) and col < ncols:
        piv = next((i for i in range(rank, len(A)) if A[i][col]), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][col], -1, ell)
        A[rank] = [x * inv % ell for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][col]:
                f = A[i][col]
                A[i] = [(x - f * y) % ell for x, y in zip(A[i], A[rank])]
        rank += 1
        col += 1
    return rank


@dataclass
class IsomorphismReport:
    n: int
    isomorphic: bool
    witness: tuple | None
    F: tuple
    G: tuple
    routes: tuple


def isomorphic_from_matrices(F, G, n: int):
    """Witness M in GL_2(Z/n) with M F = G M, or None."""
    parts = []
    for ell, k in factorint(n).items():
        q = ell ** k
        mod = intertwiner_module(F, G, q)
        w = _invertible_in(mod, ell, k)
        if w is None:
            return None
        parts.append((q, w))
    M = _crt_matrices(parts, n) if n > 1 else ((0, 0), (0, 0))
    if n > 1 and (not is_intertwiner(M, F, G, n) or math.gcd(zmod.det2(M), n) != 1):
        raise InternalContradiction("glued witness fails")
    return M


def _crt_matrices(parts, n):
    M = [[0, 0], [0, 0]]
    for q, w in parts:
        e = (n // q) * pow(n // q, -1, q)
        for i in range(2):
            for j in range(2):
                M[i][j] = (M[i][j] + e * w[i][j]) % n
    return _mod(M, n)


def galois_isomorphic(E: Curve, E2: Curve, n: int, allow_model: bool = False) -> IsomorphismReport:
    """Is E[n] isomorphic to E2[n] as a Galois module?

    With allow_model the level is split into prime powers, each handled by
    points when within the cap and by the endomorphism-ring model otherwise;
    the pieces are glued by CRT.
    """
    if math.gcd(n, E.p) != 1:
        raise PreconditionError(f"level {n} is not prime to p = {E.p}")
    zero = ((0, 0), (0, 0))
    if n == 1:
        return IsomorphismReport(1, True, zero, zero, zero, ())
    if not allow_model:
        FE, FE2 = frobenius_matrix(E, n), frobenius_matrix(E2, n)
        W = isomorphic_from_matrices(FE.entries, FE2.entries, n)
        return IsomorphismReport(n, W is not None, W, FE.entries, FE2.entries, (FE.route, FE2.route))
    Fs, Gs, Ws, routes = [], [], [], []
    ok = True
    for ell, k in sorted(factorint(n).items()):
        q = ell ** k
        FE, FE2 = frobenius_any(E, q), frobenius_any(E2, q)
        W = isomorphic_from_matrices(FE.entries, FE2.entries, q)
        Fs.append((q, FE.entries))
        Gs.append((q, FE2.entries))
        routes.append((q, FE.route, FE2.route))
        if W is None:
            ok = False
        else:
            Ws.append((q, W))
    W = _crt_matrices(Ws, n) if ok else None
    return IsomorphismReport(n, ok, W, _crt_matrices(Fs, n), _crt_matrices(Gs, n), tuple(routes))


# -- towers -----------------------------------------------------------------------

@dataclass
class TowerReport:
    ell: int
    depth: int
    cardinalities: dict
    chains: dict
    stabilized: dict
    offsets: dict
    reductions_are_homomorphisms: bool
    bases: tuple = ()

    def contains_actions(self, matrices_top) -> dict:
        """For matrices on the top level (in the tower's own bases), whether each
        reduction mod ell^i lies in the stabilized image at level i."""
        out = {}
        for i, mod in self.stabilized.items():
            q = self.ell ** i
            out[q] = all(mod.contains([x % q for x in _flatten(M)]) for M in matrices_top)
        return out


def _reduce_module(mod: IntertwinerModule, d: int) -> zmod.ModuleModN:
    return zmod.ModuleModN(d, 4, [[x % d for x in _flatten(g)] for g in mod.generators])


def level_tower_stabilization(E: Curve, E2: Curve, ell: int, depth: int) -> TowerReport:
    """Intertwiner modules at ell, ..., ell^depth and the images of higher levels
    inside each lower one.

    Bases are compatible: the level ell^i basis is ell^(depth-i) times the top one.
    """
    if ell == E.p:
        raise PreconditionError("ell must differ from p")
    top = ell ** depth
    m = math.lcm(full_torsion_degree(E, top), full_torsion_degree(E2, top))
    B1, B2 = torsion_basis(E, top, m), torsion_basis(E2, top, m)
    F1, F2 = frobenius_in_basis(B1), frobenius_in_basis(B2)
    mods = {}
    for i in range(1, depth + 1):
        q = ell ** i
        mods[i] = intertwiner_module(F1.reduce(q).entries, F2.reduce(q).entries, q)
    chains, stabilized, offsets = {}, {}, {}
    for i in range(1, depth + 1):
        q = ell ** i
        chain = [_reduce_module(mods[j], q) for j in range(i, depth + 1)]
        chains[i] = [c.cardinality for c in chain]
        stabilized[i] = chain[-1]
        off = 0
        for j, c in enumerate(chain):
            if c == chain[-1]:
                off = j
                break
        offsets[i] = off
    homs = True
    if depth >= 2:
        for i in range(2, depth + 1):
            q = ell ** (i - 1)
            gens = mods[i].generators
            for a, b in itertools.product(gens, repeat=2):
                s = [x + y for x, y in zip(_flatten(a), _flatten(b))]
                lhs = [x % q for x in s]
                rhs = [(x % q + y % q) % q for x, y in zip(_flatten(a), _flatten(b))]
                if lhs != rhs or not mods[i - 1].module.contains(lhs):
                    homs = False
    return TowerReport(ell, depth, {ell ** i: mods[i].cardinality for i in mods},
                       chains, stabilized, offsets, homs, (B1, B2))


# -- the p-part -------------------------------------------------------------------

def unit_root(a_p: int, p: int, nu: int) -> int:
    """The root of T^2 - a_p T + p mod p^nu congruent to a_p mod p."""
    if a_p % p == 0:
        raise PreconditionError("unit root needs an ordinary trace (p does not divide a_p)")
    u, prec = a_p % p, 1
    while prec < nu:
        prec = min(2 * prec, nu)
        q = p ** prec
        f = (u * u - a_p * u + p) % q
        df = (2 * u - a_p) % q
        u = (u - f * pow(df, -1, q)) % q
    q = p ** nu
    if (u * u - a_p * u + p) % q:
        raise InternalContradiction("Hensel lift failed")
    return u % q


@dataclass
class PPartReport:
    isomorphic: bool
    precision: int
    unit_roots: tuple


def p_part_isomorphic(E: Curve, E2: Curve, nu: int) -> PPartReport:
    if not (E.is_ordinary() and E2.is_ordinary()):
        raise PreconditionError("both curves must be ordinary")
    if E.p != E2.p:
        raise PreconditionError("curves over different fields")
    u1, u2 = unit_root(trace(E), E.p, nu), unit_root(trace(E2), E.p, nu)
    return PPartReport(trace(E) == trace(E2), nu, (u1, u2))

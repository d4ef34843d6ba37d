"""Separable isogenies from enumerated kernels (Velu), rational maps between
curves, and the lattice they span inside Hom(E, E')."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from sympy import factorint

from . import zmod
from .arith import build_ext_field
from .curve import (Curve, MAX_EXT_DEGREE, Point, TorsionBasis, TorsionSubgroupDescriptor,
                    closure, full_torsion_degree, isomorphism_scale, sylow_basis, torsion_basis,
                    trace)
from .errors import CapExceeded, InternalContradiction, PreconditionError
from .poly import RatFunc


# -- rational maps ------------------------------------------------------------------

class RationalMap:
    """A morphism E -> E' fixing O, written (x, y) -> (X(x), y R(x)); zero if X is None."""

    __slots__ = ("domain", "codomain", "X", "R")

    def __init__(self, domain: Curve, codomain: Curve, X: RatFunc | None, R: RatFunc | None):
        self.domain, self.codomain, self.X, self.R = domain, codomain, X, R

    @classmethod
    def zero(cls, E: Curve, E2: Curve):
        return cls(E, E2, None, None)

    @classmethod
    def identity(cls, E: Curve):
        p = E.p
        return cls(E, E, RatFunc([0, 1], [1], p), RatFunc.const(1, p))

    @classmethod
    def frobenius(cls, E: Curve):
        p = E.p
        return cls(E, E, RatFunc([0, 1], [1], p).frobenius(), _rhs(E) ** ((p - 1) // 2))

    @classmethod
    def isomorphism(cls, E: Curve, E2: Curve):
        """(x, y) -> (u^2 x, u^3 y) with E2 = (u^4 a, u^6 b)."""
        u = isomorphism_scale(E, E2)
        if u is None:
            raise PreconditionError(f"{E} and {E2} are not isomorphic over F_{E.p}")
        p = E.p
        return cls(E, E2, RatFunc([0, u * u % p], [1], p), RatFunc.const(pow(u, 3, p), p))

    def is_zero(self) -> bool:
        return self.X is None

    def degree(self) -> int:
        return 0 if self.X is None else self.X.degree()

    def __call__(self, P: Point) -> Point:
        E2 = self.codomain
        if P.is_identity() or self.X is None:
            return E2.identity
        x = P.x
        from .poly import evaluate
        d = evaluate(self.X.den, x)
        if not d:
            return E2.identity
        X = evaluate(self.X.num, x) / d
        Y = P.y * (evaluate(self.R.num, x) / evaluate(self.R.den, x))
        return Point(E2, X, Y)

    def __neg__(self):
        if self.X is None:
            return self
        return RationalMap(self.domain, self.codomain, self.X, -self.R)

    def __add__(self, other: "RationalMap") -> "RationalMap":
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            raise PreconditionError("maps between different curves")
        if self.X is None:
            return other
        if other.X is None:
            return self
        f = _rhs(self.domain)
        a2 = self.codomain.a
        X1, R1, X2, R2 = self.X, self.R, other.X, other.R
        if X1 == X2:
            if (R1 + R2).is_zero():
                return RationalMap.zero(self.domain, self.codomain)
            lam = (X1 * X1 * 3 + a2) / (f * R1 * 2)
            X3 = lam * lam * f - X1 * 2
        else:
            lam = (R2 - R1) / (X2 - X1)
            X3 = lam * lam * f - X1 - X2
        R3 = lam * (X1 - X3) - R1
        return RationalMap(self.domain, self.codomain, X3, R3)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, m: int) -> "RationalMap":
        out = RationalMap.zero(self.domain, self.codomain)
        base = self if m >= 0 else -self
        m = abs(m)
        while m:
            if m & 1:
                out = out + base
            base = base + base
            m >>= 1
        return out

    def after(self, inner: "RationalMap") -> "RationalMap":
        """self o inner."""
        if inner.codomain != self.domain:
            raise PreconditionError("maps do not compose")
        if self.X is None or inner.X is None:
            return RationalMap.zero(inner.domain, self.codomain)
        return RationalMap(inner.domain, self.codomain, self.X.compose(inner.X),
                           self.R.compose(inner.X) * inner.R)

    def frobenius_after(self) -> "RationalMap":
        """pi_{E'} o self, which equals self o pi_E."""
        if self.X is None:
            return self
        p = self.domain.p
        return RationalMap(self.domain, self.codomain, self.X.frobenius(),
                           self.R.frobenius() * _rhs(self.domain) ** ((p - 1) // 2))

    def __eq__(self, other):
        return (isinstance(other, RationalMap) and (self.domain, self.codomain) == (other.domain, other.codomain)
                and self.X == other.X and self.R == other.R)

    def __hash__(self):
        return hash((self.domain, self.codomain, self.X, self.R))

    def __repr__(self):
        return f"RationalMap({self.domain} -> {self.codomain}, deg {self.degree()})"


def _rhs(E: Curve) -> RatFunc:
    return _PowRat([E.b, E.a, 0, 1], E.p)


class _PowRat(RatFunc):
    """RatFunc with integer powers."""

    def __init__(self, num, p, den=(1,)):
        super().__init__(list(num), list(den), p)

    def __pow__(self, e: int):
        out = RatFunc.const(1, self.p)
        base = RatFunc(self.num, self.den, self.p)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out


# -- kernels ------------------------------------------------------------------------

def _carmichael(d: int) -> int:
    lam = 1
    for ell, e in factorint(d).items():
        if ell == 2 and e >= 3:
            v = 2 ** (e - 2)
        else:
            v = (ell - 1) * ell ** (e - 1)
        lam = math.lcm(lam, v)
    return lam


def _torsion_of_group(E: Curve, k: int, d: int):
    """Generators (G1, o1, G2, o2) of E(F_{p^k})[d], the group being <G1> + <G2>."""
    O = E.identity
    G1, o1, G2, o2 = O, 1, O, 1
    for ell, e in factorint(d).items():
        P1, e1, P2, e2 = sylow_basis(E, k, ell)
        a1, a2 = min(e1, e), min(e2, e)
        G1 = G1 + ell ** (e1 - a1) * P1
        G2 = G2 + ell ** (e2 - a2) * P2
        o1 *= ell ** a1
        o2 *= ell ** a2
    return G1, o1, G2, o2


def _multiples(P: Point) -> list:
    out, R = [P.curve.identity], P
    while not R.is_identity():
        out.append(R)
        R = R + P
    return out


def _is_galois_stable(points) -> bool:
    s = set(points)
    return all(P.frobenius() in s for P in s)


def cyclic_kernels(E: Curve, d: int, max_degree: int = MAX_EXT_DEGREE) -> list[TorsionSubgroupDescriptor]:
    """All Galois-stable cyclic subgroups of order d.

    Frobenius acts on such a subgroup through (Z/d)^*, so its points lie in
    E(F_{p^k}) for k the exponent of that group.
    """
    if d == 1:
        return [TorsionSubgroupDescriptor(E, 1, (), 1)]
    k = _carmichael(d)
    if k > max_degree:
        raise CapExceeded(f"cyclic kernels of order {d} need degree {k}")
    G1, o1, G2, o2 = _torsion_of_group(E, k, d)
    if o1 * o2 % d and o1 < d:
        return []
    seen, out = set(), []
    for i in range(o1):
        for j in range(o2):
            if math.lcm(o1 // math.gcd(i, o1), o2 // math.gcd(j, o2)) != d:
                continue
            P = i * G1 + j * G2
            pts = _multiples(P)
            key = frozenset(pts)
            if key in seen:
                continue
            seen.add(key)
            if _is_galois_stable(pts):
                out.append(TorsionSubgroupDescriptor(E, d, (P,), k))
    return _sorted_kernels(out)


def _aut_exponent(d1: int, d2: int) -> int:
    """Exponent of Aut(Z/d1 x Z/d2), by scanning images of the generators."""
    G = [(i, j) for i in range(d1) for j in range(d2)]

    def order(g):
        return math.lcm(d1 // math.gcd(g[0], d1), d2 // math.gcd(g[1], d2))

    exp = 1
    for u in G:
        if order(u) != d1:
            continue
        for v in G:
            if order(v) != d2:
                continue
            # the map e1 -> u, e2 -> v; an automorphism iff it is injective
            img = {((a * u[0] + b * v[0]) % d1, (a * u[1] + b * v[1]) % d2) for a in range(d1) for b in range(d2)}
            if len(img) != d1 * d2:
                continue
            k, x = 1, (u, v)
            while x != ((1, 0), (0, 1)):
                (a, b), (c, e) = x
                x = (((a * u[0] + b * v[0]) % d1, (a * u[1] + b * v[1]) % d2),
                     ((c * u[0] + e * v[0]) % d1, (c * u[1] + e * v[1]) % d2))
                k += 1
            exp = math.lcm(exp, k)
    return exp


def noncyclic_kernels(E: Curve, d1: int, d2: int, max_degree: int = MAX_EXT_DEGREE):
    """Galois-stable subgroups isomorphic to Z/d1 x Z/d2 with 1 < d1 | d2."""
    if d2 % d1 or d1 == 1:
        raise PreconditionError("need 1 < d1 dividing d2")
    if d1 == d2:
        B = torsion_basis(E, d1, max_degree=max_degree)
        return [TorsionSubgroupDescriptor(E, d1, (B.P, B.Q), B.degree)]
    m1 = full_torsion_degree(E, d1, max_degree)
    k = _aut_exponent(d1, d2)
    if k % m1:
        return []
    if k > max_degree:
        raise CapExceeded(f"subgroups of type ({d1}, {d2}) need degree {k}")
    G1, o1, G2, o2 = _torsion_of_group(E, k, d2)
    Ed1 = torsion_basis(E, d1, k, max_degree)
    seen, out = set(), []
    for i in range(o1):
        for j in range(o2):
            if math.lcm(o1 // math.gcd(i, o1), o2 // math.gcd(j, o2)) != d2:
                continue
            P = i * G1 + j * G2
            H = frozenset(closure([Ed1.P, Ed1.Q, P], E.identity))
            if H in seen or len(H) != d1 * d2:
                continue
            seen.add(H)
            if _is_galois_stable(H):
                out.append(TorsionSubgroupDescriptor(E, d2, (Ed1.P, Ed1.Q, P), k))
    return _sorted_kernels(out)


def kernel_polynomial(K: TorsionSubgroupDescriptor) -> list[int]:
    """prod (x - x_Q) over Q != O in K up to sign, coefficients in F_p."""
    xs = {Q.x for Q in K.elements if not Q.is_identity()}
    F = K.generators[0].x.field if K.generators and not K.generators[0].is_identity() else None
    h = [1]
    if F is None:
        return h
    h = [F.one]
    for x0 in sorted(xs, key=lambda z: z.c):
        h = _pmul(h, [-x0, F.one])
    return _to_fp(h, K.curve.p)


def _sorted_kernels(ks):
    return sorted(ks, key=lambda K: kernel_polynomial(K))


def galois_stable_kernels(E: Curve, d: int, max_degree: int = MAX_EXT_DEGREE):
    """All Galois-stable subgroups of order d (cyclic first)."""
    out = list(cyclic_kernels(E, d, max_degree))
    for d1 in range(2, math.isqrt(d) + 1):
        if d % (d1 * d1) == 0:
            d2 = d // d1
            if d2 % d1 == 0:
                out.extend(noncyclic_kernels(E, d1, d2, max_degree))
    return out


# -- Velu -----------------------------------------------------------------------------

def _pmul(f, g):
    out = [f[0] * 0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


def _padd(f, g):
    if len(f) < len(g):
        f, g = g, f
    return [a + b for a, b in zip(f, g)] + list(f[len(g):])


def _to_fp(f, p):
    out = []
    for c in f:
        if not c.in_prime_field():
            raise PreconditionError("kernel is not Galois stable: coefficients leave F_p")
        out.append(int(c))
    return out


@dataclass(frozen=True, eq=False)
class Isogeny:
    domain: Curve
    codomain: Curve
    kernel: TorsionSubgroupDescriptor
    degree: int
    map: RationalMap

    def __call__(self, P: Point) -> Point:
        return self.map(P)

    def then_isomorphism(self, E2: Curve) -> "Isogeny":
        iso = RationalMap.isomorphism(self.codomain, E2)
        return Isogeny(self.domain, E2, self.kernel, self.degree, iso.after(self.map))


def velu(E: Curve, kernel: TorsionSubgroupDescriptor) -> Isogeny:
    """The separable isogeny with the given kernel, normalized so that it pulls
    back the invariant differential."""
    pts = kernel.elements
    if not _is_galois_stable(pts):
        raise PreconditionError("kernel is not Galois stable")
    p = E.p
    if len(pts) == 1:
        return Isogeny(E, E, kernel, 1, RationalMap.identity(E))
    F = next(P for P in pts if not P.is_identity()).x.field
    pts = [P.embed(F) for P in pts]
    S, seen = [], set()
    for Q in sorted((P for P in pts if not P.is_identity()), key=lambda P: (P.x.c, P.y.c)):
        if Q in seen:
            continue
        seen.add(Q)
        seen.add(-Q)
        S.append(Q)
    a = F(E.a)
    v = w = F.zero
    h = [F.one]
    for Q in S:
        h = _pmul(h, [-Q.x, F.one])
    N = _pmul([F.zero, F.one], _pmul(h, h))
    for Q in S:
        gx = 3 * Q.x * Q.x + a
        vQ = gx if not Q.y else 2 * gx
        uQ = 4 * Q.y * Q.y
        v = v + vQ
        w = w + uQ + Q.x * vQ
        hq = _pdiv_linear(h, Q.x)
        term = _pmul([uQ - vQ * Q.x, vQ], _pmul(hq, hq))
        N = _padd(N, term)
    A2 = _to_fp([a - 5 * v], p)[0]
    B2 = _to_fp([F(E.b) - 7 * w], p)[0]
    hp = _to_fp(h, p)
    X = RatFunc(_to_fp(N, p), _polysq(hp, p), p)
    codomain = Curve(p, A2, B2)
    phi = RationalMap(E, codomain, X, X.derivative())
    if X.degree() != len(pts):
        raise InternalContradiction("Velu map degree differs from the kernel order")
    return Isogeny(E, codomain, kernel, len(pts), phi)


def _polysq(f, p):
    from .poly import mul
    return mul(f, f, p)


def _pdiv_linear(f, r):
    """f / (x - r) for a root r (synthetic division)."""
    out = [None] * (len(f) - 1)
    acc = f[-1] * 0
    for i in range(len(f) - 1, 0, -1):
        acc = acc * r + f[i]
        out[i - 1] = acc
    return out


@lru_cache(maxsize=None)
def isogenies_of_degree(E: Curve, d: int, cyclic_only: bool = False,
                        max_degree: int = MAX_EXT_DEGREE) -> tuple:
    ks = cyclic_kernels(E, d, max_degree) if cyclic_only else galois_stable_kernels(E, d, max_degree)
    return tuple(velu(E, K) for K in ks)


def find_isogenies(E: Curve, E2: Curve, degree_bound: int, coprime_to: int = 1,
                   max_degree: int = MAX_EXT_DEGREE) -> list[Isogeny]:
    """Cyclic-kernel isogenies E -> E2 of degree <= bound, prime to coprime_to,
    composed with an isomorphism onto E2. Degrees whose kernels exceed the cap
    are skipped."""
    out = []
    for d in range(1, degree_bound + 1):
        if math.gcd(d, coprime_to) != 1:
            continue
        try:
            isos = isogenies_of_degree(E, d, True, max_degree)
        except CapExceeded:
            continue
        for phi in isos:
            if isomorphism_scale(phi.codomain, E2) is not None:
                out.append(phi.then_isomorphism(E2))
    return out


# -- action on torsion ------------------------------------------------------------------

def common_bases(E: Curve, E2: Curve, n: int, max_degree: int = MAX_EXT_DEGREE):
    m = math.lcm(full_torsion_degree(E, n, max_degree), full_torsion_degree(E2, n, max_degree))
    if m > max_degree:
        raise CapExceeded(f"E[{n}] and E'[{n}] need a common degree {m}")
    return torsion_basis(E, n, m, max_degree), torsion_basis(E2, n, m, max_degree)


def action_matrix(f, B1: TorsionBasis, B2: TorsionBasis):
    """Matrix over Z/n of a map f: E -> E' on n-torsion; columns are images of the basis."""
    a, c = B2.dlog(f(B1.P))
    b, d = B2.dlog(f(B1.Q))
    return ((a, b), (c, d))


@dataclass
class CoprimeReport:
    n: int
    degree: int
    matrix: tuple
    invertible: bool
    coprime: bool

    @property
    def holds(self) -> bool:
        return self.invertible == self.coprime


def coprime_iso_check(u, n: int, max_degree: int = MAX_EXT_DEGREE) -> CoprimeReport:
    """Matrix of u on E[n] -> E'[n]; invertible iff gcd(deg u, n) = 1."""
    if isinstance(u, HomElement):
        E, E2, deg = u.lattice.domain, u.lattice.codomain, u.degree()
    else:
        E, E2, deg = u.domain, u.codomain, u.degree
    if math.gcd(n, E.p) != 1:
        raise PreconditionError(f"level {n} is not prime to p")
    B1, B2 = common_bases(E, E2, n, max_degree)
    M = u.action(B1, B2) if isinstance(u, HomElement) else action_matrix(u, B1, B2)
    inv = math.gcd(zmod.det2(M), n) == 1
    return CoprimeReport(n, deg, M, inv, math.gcd(deg, n) == 1)


@dataclass
class TorsionMapReport:
    n: int
    degree: int
    route: str
    invertible: bool
    coprime: bool

    @property
    def holds(self) -> bool:
        return self.invertible == self.coprime


def torsion_map_check(phi: Isogeny, n: int, max_degree: int = MAX_EXT_DEGREE) -> TorsionMapReport:
    """Is phi: E[n] -> E'[n] bijective? By the action matrix when both torsion
    groups fit under the cap, otherwise by whether ker(phi) meets E[n] (the two
    groups have the same order, so injective is enough)."""
    try:
        rep = coprime_iso_check(phi, n, max_degree)
        return TorsionMapReport(n, phi.degree, "matrix", rep.invertible, rep.coprime)
    except CapExceeded:
        pass
    meets = any(not P.is_identity() and (n * P).is_identity() for P in phi.kernel.elements)
    return TorsionMapReport(n, phi.degree, "kernel", not meets, math.gcd(phi.degree, n) == 1)


# -- Hom lattices ---------------------------------------------------------------------------

class HomLattice:
    """The subgroup of Hom(E, E') spanned by a list of rational maps.

    The pairing is <f, g> = deg(f + g) - deg f - deg g, so <f, f> = 2 deg f.
    """

    def __init__(self, domain: Curve, codomain: Curve, generators: list, labels: list | None = None):
        self.domain, self.codomain = domain, codomain
        self.generators = list(generators)
        self.labels = labels or [f"g{i}" for i in range(len(self.generators))]
        k = len(self.generators)
        deg = [g.degree() for g in self.generators]
        G = [[0] * k for _ in range(k)]
        for i in range(k):
            G[i][i] = 2 * deg[i]
            for j in range(i + 1, k):
                s = (self.generators[i] + self.generators[j]).degree()
                G[i][j] = G[j][i] = s - deg[i] - deg[j]
        self.gram_all = G
        self._reduce()

    def _reduce(self):
        """Pick a Z-basis via Gram coordinates and an HNF."""
        G, k = self.gram_all, len(self.generators)
        idx = []
        for i in range(k):
            trial = idx + [i]
            sub = [[Fraction(G[a][b]) for b in trial] for a in trial]
            if _det(sub) != 0:
                idx = trial
        self.rank = len(idx)
        if not idx:
            self.coords, self.basis_combos, self.basis_gram = [], [], []
            return
        Gbb = [[Fraction(G[a][b]) for b in idx] for a in idx]
        Ginv = _inverse(Gbb)
        coords = []
        for i in range(k):
            rhs = [Fraction(G[i][b]) for b in idx]
            x = [sum(Ginv[r][c] * rhs[c] for c in range(len(idx))) for r in range(len(idx))]
            # residual norm must vanish: the lattice is definite
            res = Fraction(G[i][i]) - 2 * sum(x[r] * rhs[r] for r in range(len(idx))) + \
                sum(x[r] * Gbb[r][c] * x[c] for r in range(len(idx)) for c in range(len(idx)))
            if res != 0:
                raise InternalContradiction("generators span more than the detected rank")
            coords.append(x)
        L = math.lcm(*[c.denominator for x in coords for c in x]) if coords else 1
        rows = [[int(c * L) for c in x] for x in coords]
        H, T = zmod.hnf(rows)
        self.coords = coords
        self.scale = L
        self.basis_combos = [tuple(t) for t in T]
        Hb = [[Fraction(h, L) for h in row] for row in H]
        self.basis_gram = [[int(sum(a[r] * Gbb[r][c] * b[c] for r in range(len(idx)) for c in range(len(idx))))
                            for b in Hb] for a in Hb]
        self._basis_coords = Hb
        self._Gbb = Gbb

    @property
    def basis(self) -> list["HomElement"]:
        return [HomElement(self, c) for c in self.basis_combos]

    def gram(self):
        return self.basis_gram

    def gram_det(self) -> int:
        return int(_det([[Fraction(x) for x in r] for r in self.basis_gram])) if self.rank else 1

    def element(self, basis_coeffs) -> "HomElement":
        combo = [0] * len(self.generators)
        for c, b in zip(basis_coeffs, self.basis_combos):
            for i, x in enumerate(b):
                combo[i] += c * x
        return HomElement(self, tuple(combo))

    def basis_coordinates(self, u: "HomElement") -> list[int]:
        """Integer coordinates of u in the lattice basis."""
        x = [sum(c * self.coords[i][r] for i, c in enumerate(u.coeffs)) for r in range(self.rank)]
        B = self._basis_coords
        # solve y B = x, B upper triangular
        y = []
        for r in range(self.rank):
            acc = x[r] - sum(y[s] * B[s][r] for s in range(r))
            q = acc / B[r][r]
            if q.denominator != 1:
                raise InternalContradiction("element is not in the lattice")
            y.append(int(q))
        return y

    def index_in_hom(self):
        """[Hom(E, E') : lattice] when both curves have the same endomorphism ring,
        where Hom is an invertible End-module of Gram determinant |disc End|;
        None when the rings differ or the lattice is not of full rank 2."""
        from .galois import end_discriminant
        if self.rank != 2 or not self.domain.is_ordinary():
            return None
        d1, d2 = end_discriminant(self.domain), end_discriminant(self.codomain)
        if d1 != d2:
            return None
        q, r = divmod(self.gram_det(), -d1)
        k = math.isqrt(q)
        if r or k * k != q:
            raise InternalContradiction("Gram determinant is not |disc End| times a square")
        return k

    @lru_cache(maxsize=None)
    def _generator_matrices(self, n: int, B1: TorsionBasis, B2: TorsionBasis):
        return [action_matrix(g, B1, B2) for g in self.generators]

    def saturation_report(self, primes=(2, 3, 5, 7), max_degree: int = MAX_EXT_DEGREE) -> dict:
        """For each prime ell: how many nonzero classes mod ell of the lattice kill E[ell]
        (each one shows the lattice is not saturated at ell); None beyond the cap."""
        out = {}
        for ell in primes:
            if ell == self.domain.p or not self.rank:
                continue
            try:
                B1, B2 = common_bases(self.domain, self.codomain, ell, max_degree)
            except CapExceeded:
                out[ell] = None
                continue
            mats = [self.element(e).action(B1, B2) for e in zmod.identity(self.rank)]
            count = 0
            for c in itertools.product(range(ell), repeat=self.rank):
                if any(c):
                    M = [[sum(ci * m[i][j] for ci, m in zip(c, mats)) % ell for j in range(2)] for i in range(2)]
                    if not any(map(any, M)):
                        count += 1
            out[ell] = count
        return out


def _det(M):
    n = len(M)
    if n == 0:
        return Fraction(1)
    M = [list(r) for r in M]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def _inverse(M):
    n = len(M)
    A = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        f = A[c][c]
        A[c] = [x / f for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                g = A[r][c]
                A[r] = [x - g * y for x, y in zip(A[r], A[c])]
    return [r[n:] for r in A]


@dataclass(frozen=True)
class HomElement:
    """sum coeffs[i] * lattice.generators[i], evaluated pointwise."""
    lattice: HomLattice = field(hash=False, compare=False)
    coeffs: tuple

    def __call__(self, P: Point) -> Point:
        out = self.lattice.codomain.identity
        for c, g in zip(self.coeffs, self.lattice.generators):
            if c:
                out = out + c * g(P)
        return out

    def __add__(self, other):
        return HomElement(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return HomElement(self.lattice, tuple(-a for a in self.coeffs))

    def __rmul__(self, m: int):
        return HomElement(self.lattice, tuple(m * a for a in self.coeffs))

    def degree(self) -> int:
        return degree_of_hom(self)

    def action(self, B1: TorsionBasis, B2: TorsionBasis):
        mats = self.lattice._generator_matrices(B1.n, B1, B2)
        n = B1.n
        return tuple(tuple(sum(c * m[i][j] for c, m in zip(self.coeffs, mats)) % n for j in range(2))
                     for i in range(2))

    def rational_map(self) -> RationalMap:
        """Explicit map; only sensible for small coefficients."""
        out = RationalMap.zero(self.lattice.domain, self.lattice.codomain)
        for c, g in zip(self.coeffs, self.lattice.generators):
            if c:
                out = out + c * g
        return out


def degree_of_hom(u: HomElement) -> int:
    """deg u from the Gram form on the generators."""
    G, c = u.lattice.gram_all, u.coeffs
    q = sum(c[i] * G[i][j] * c[j] for i in range(len(c)) for j in range(len(c)))
    if q % 2 or q < 0:
        raise InternalContradiction("degree form is not even and nonnegative")
    return q // 2


def kernel_size_on_torsion(u, n: int, max_degree: int = MAX_EXT_DEGREE) -> int:
    """#(ker u intersected with E[n]), read off the action matrix."""
    if isinstance(u, HomElement):
        E, E2 = u.lattice.domain, u.lattice.codomain
    else:
        E, E2 = u.domain, u.codomain
    B1, B2 = common_bases(E, E2, n, max_degree)
    M = u.action(B1, B2) if isinstance(u, HomElement) else action_matrix(u, B1, B2)
    _, D, _ = zmod.smith([list(r) for r in M])
    return math.prod(math.gcd(D[i][i], n) for i in range(2))


def hom_lattice(E: Curve, E2: Curve, degree_bound: int, max_degree: int = MAX_EXT_DEGREE) -> HomLattice:
    """Lattice spanned by the cyclic-kernel isogenies E -> E2 of degree <= bound and
    their composites with Frobenius."""
    gens, labels = [], []
    if trace(E) == trace(E2):
        for phi in find_isogenies(E, E2, degree_bound, max_degree=max_degree):
            gens.append(phi.map)
            labels.append(f"velu[{phi.degree}]")
            gens.append(phi.map.frobenius_after())
            labels.append(f"frob*velu[{phi.degree}]")
    return HomLattice(E, E2, gens, labels)


@dataclass
class CRTResult:
    element: HomElement
    n: int
    basis_coeffs: list
    degree: int
    checks: dict


def crt_combine(candidates, n: int, max_degree: int = MAX_EXT_DEGREE) -> CRTResult:
    """u with u = v_ell mod ell * lattice for each prime ell | n (coordinatewise CRT)."""
    primes = sorted(factorint(n))
    by_ell = {ell: v for ell, v in candidates}
    missing = [ell for ell in primes if ell not in by_ell]
    if missing:
        raise PreconditionError(f"no candidate for primes {missing}")
    lattices = {id(v.lattice) for v in by_ell.values()}
    if len(lattices) != 1:
        raise PreconditionError("candidates live in different lattices")
    lat = by_ell[primes[0]].lattice
    for ell in primes:
        if math.gcd(by_ell[ell].degree(), ell) != 1:
            raise PreconditionError(f"candidate for {ell} has degree divisible by {ell}")
    rad = math.prod(primes)
    coords = {ell: lat.basis_coordinates(by_ell[ell]) for ell in primes}
    y = []
    for r in range(lat.rank):
        acc = 0
        for ell in primes:
            m = rad // ell
            acc += coords[ell][r] * m * pow(m, -1, ell)
        acc %= rad
        if acc > rad // 2:
            acc -= rad
        y.append(acc)
    u = lat.element(y)
    deg = u.degree()
    if math.gcd(deg, n) != 1:
        raise InternalContradiction(f"combined degree {deg} is not prime to {n}")
    checks = {}
    for ell in primes:
        try:
            rep = coprime_iso_check(u, ell, max_degree)
        except CapExceeded:
            checks[ell] = None
            continue
        if not (rep.invertible and rep.holds):
            raise InternalContradiction(f"combined map is not an isomorphism on E[{ell}]")
        checks[ell] = rep
    return CRTResult(u, n, y, deg, checks)

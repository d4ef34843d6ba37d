"""Short Weierstrass curves y^2 = x^3 + a x + b over F_p.

Curves are always defined over the prime field; points may live in any
extension F_{p^m}, obtained from :func:`tatekit.arith.build_ext_field`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from sympy import factorint

from .arith import FiniteField, build_ext_field, embed, legendre
from .errors import CapExceeded, InternalContradiction, PreconditionError

MAX_EXT_DEGREE = 12
MAX_ENUMERATION = 10 ** 8


@dataclass(frozen=True)
class Curve:
    p: int
    a: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        build_ext_field(self.p)  # validates p
        if self.discriminant == 0:
            raise PreconditionError(f"singular curve: 4a^3 + 27b^2 = 0 for {self}")

    def __str__(self):
        return f"y^2 = x^3 + {self.a}x + {self.b} over F_{self.p}"

    @property
    def discriminant(self) -> int:
        return (4 * self.a ** 3 + 27 * self.b ** 2) % self.p

    @property
    def j_invariant(self) -> int:
        p = self.p
        a3 = 4 * self.a ** 3
        return 1728 * a3 * pow(a3 + 27 * self.b ** 2, -1, p) % p

    @property
    def field(self) -> FiniteField:
        return build_ext_field(self.p)

    @property
    def identity(self) -> "Point":
        return Point(self, None, None)

    def point(self, x, y, degree: int = 1) -> "Point":
        F = build_ext_field(self.p, degree)
        P = Point(self, F(x), F(y))
        if not self.contains(P):
            raise PreconditionError(f"({x}, {y}) is not on {self}")
        return P

    def rhs(self, x):
        return (x * x + self.a) * x + self.b

    def contains(self, P: "Point") -> bool:
        if P.x is None:
            return True
        return P.y * P.y == self.rhs(P.x)

    def random_point(self, F: FiniteField, rng: random.Random) -> "Point":
        while True:
            x = F.random(rng)
            r = self.rhs(x).sqrt()
            if r is not None:
                if rng.random() < 0.5:
                    r = -r
                return Point(self, x, r)

    def is_ordinary(self) -> bool:
        return trace(self) % self.p != 0


class Point:
    """A point of a curve over some F_{p^m}; x is None for the identity."""

    __slots__ = ("curve", "x", "y")

    def __init__(self, curve: Curve, x, y):
        self.curve = curve
        self.x = x
        self.y = y

    def is_identity(self) -> bool:
        return self.x is None

    @property
    def field(self):
        return None if self.x is None else self.x.field

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if self.x is None or other.x is None:
            return self.x is None and other.x is None
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        if self.x is None:
            return 0
        return hash((self.x.c, self.y.c))

    def __repr__(self):
        if self.x is None:
            return "O"
        return f"({self.x!r}, {self.y!r})"

    def __neg__(self):
        if self.x is None:
            return self
        return Point(self.curve, self.x, -self.y)

    def __add__(self, other: "Point") -> "Point":
        if other.curve != self.curve:
            raise PreconditionError("points lie on different curves")
        if self.x is None:
            return other
        if other.x is None:
            return self
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        if x1 == x2:
            if y1 != y2 or not y1:
                return Point(self.curve, None, None)
            lam = (x1 * x1 * 3 + self.curve.a) / (y1 * 2)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        return Point(self.curve, x3, lam * (x1 - x3) - y1)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int) -> "Point":
        if n < 0:
            return (-n) * (-self)
        if n == 0 or self.x is None:
            return Point(self.curve, None, None)
        if n == 1:
            return self
        a = self.curve.a
        x, y = self.x, self.y
        J = (x, y, x.field.one)
        for bit in bin(n)[3:]:
            J = _jac_double(J, a)
            if bit == "1":
                J = _jac_add_affine(J, x, y, a)
        return _jac_to_affine(self.curve, J)

    def frobenius(self) -> "Point":
        if self.x is None:
            return self
        return Point(self.curve, self.x.frobenius(), self.y.frobenius())

    def embed(self, F: FiniteField) -> "Point":
        if self.x is None or self.x.field is F:
            return self
        return Point(self.curve, embed(self.x, F), embed(self.y, F))

    def order(self, multiple: int | None = None) -> int:
        """Exact order; ``multiple`` is any known multiple of it."""
        if multiple is None:
            multiple = order_over_extension(trace(self.curve), self.curve.p, self.field.k) \
                if self.x is not None else 1
        n = multiple
        for ell in factorint(multiple):
            while n % ell == 0 and ((n // ell) * self).is_identity():
                n //= ell
        return n


# -- Jacobian coordinates: x = X/Z^2, y = Y/Z^3; None is the identity ----------

def _jac_double(J, a):
    if J is None:
        return None
    X, Y, Z = J
    if not Y:
        return None
    YY = Y * Y
    S = X * YY * 4
    ZZ = Z * Z
    M = X * X * 3 + ZZ * ZZ * a
    X3 = M * M - S * 2
    Y3 = M * (S - X3) - YY * YY * 8
    return X3, Y3, Y * Z * 2


def _jac_add_affine(J, x2, y2, a):
    if J is None:
        return x2, y2, x2.field.one
    X1, Y1, Z1 = J
    Z1Z1 = Z1 * Z1
    H = x2 * Z1Z1 - X1
    r = y2 * Z1 * Z1Z1 - Y1
    if not H:
        if not r:
            return _jac_double(J, a)
        return None
    HH = H * H
    HHH = H * HH
    V = X1 * HH
    X3 = r * r - HHH - V * 2
    return X3, r * (V - X3) - Y1 * HHH, Z1 * H


def _jac_to_affine(curve, J):
    if J is None:
        return Point(curve, None, None)
    X, Y, Z = J
    zi = Z.inverse()
    zi2 = zi * zi
    return Point(curve, X * zi2, Y * zi2 * zi)


def batch_to_affine(curve, Js):
    """Normalize many Jacobian points with a single field inversion."""
    idx = [i for i, J in enumerate(Js) if J is not None]
    out = [Point(curve, None, None)] * len(Js)
    if not idx:
        return out
    prefix = []
    acc = None
    for i in idx:
        Z = Js[i][2]
        acc = Z if acc is None else acc * Z
        prefix.append(acc)
    inv = acc.inverse()
    for pos in range(len(idx) - 1, -1, -1):
        i = idx[pos]
        X, Y, Z = Js[i]
        zi = inv * prefix[pos - 1] if pos else inv
        inv = inv * Z
        zi2 = zi * zi
        out[i] = Point(curve, X * zi2, Y * zi2 * zi)
    return out


def add(P: Point, Q: Point) -> Point:
    return P + Q


# -- counting ----------------------------------------------------------------

@lru_cache(maxsize=None)
def count_points(E: Curve) -> tuple[int, int]:
    """(#E(F_p), a_p) by a full x-scan."""
    p = E.p
    n = 1
    for x in range(p):
        n += 1 + legendre(x * x * x + E.a * x + E.b, p)
    return n, p + 1 - n


def trace(E: Curve) -> int:
    return count_points(E)[1]


def order_over_extension(trace_: int, p: int, k: int) -> int:
    t_prev, t = 2, trace_
    for _ in range(k - 1):
        t_prev, t = t, trace_ * t - p * t_prev
    return p ** k + 1 - t


def enumerate_points(E: Curve, degree: int = 1, cap: int = MAX_ENUMERATION) -> list[Point]:
    F = build_ext_field(E.p, degree)
    if F.order > cap:
        raise CapExceeded(f"enumerating E(F_{E.p}^{degree}) exceeds the cap {cap}")
    pts = [E.identity]
    for x in F.elements():
        r = E.rhs(x).sqrt()
        if r is None:
            continue
        pts.append(Point(E, x, r))
        if r:
            pts.append(Point(E, x, -r))
    return pts


def isomorphism_scale(E1: Curve, E2: Curve):
    """u in F_p^* with (a2, b2) = (u^4 a1, u^6 b1), or None."""
    if E1.p != E2.p:
        return None
    p = E1.p
    for u in range(1, p):
        if (pow(u, 4, p) * E1.a - E2.a) % p == 0 and (pow(u, 6, p) * E1.b - E2.b) % p == 0:
            return u
    return None


def is_isomorphic_fp(E1: Curve, E2: Curve) -> bool:
    return isomorphism_scale(E1, E2) is not None


# -- group structure -----------------------------------------------------------

def _valuation(n: int, ell: int) -> int:
    v = 0
    while n and n % ell == 0:
        n //= ell
        v += 1
    return v


def _small_log(gamma: Point, h: Point, ell: int):
    """d in [0, ell) with d*gamma = h, gamma of order ell; None if h not in <gamma>."""
    if ell <= 64:
        R = gamma.curve.identity
        for d in range(ell):
            if R == h:
                return d
            R = R + gamma
        return None
    m = math.isqrt(ell) + 1
    table = {}
    R = gamma.curve.identity
    for j in range(m):
        table.setdefault(R, j)
        R = R + gamma
    step = -(m * gamma)
    R = h
    for i in range(m + 1):
        if R in table:
            return (i * m + table[R]) % ell
        R = R + step
    return None


def cyclic_log(G: Point, e: int, R: Point, ell: int):
    """c with c*G = R where G has order ell^e; None if R is not in <G>."""
    if not (ell ** e * R).is_identity():
        return None
    if e == 0:
        return 0 if R.is_identity() else None
    gamma = ell ** (e - 1) * G
    x = 0
    for i in range(e):
        h = ell ** (e - 1 - i) * (R - x * G)
        d = _small_log(gamma, h, ell)
        if d is None:
            return None
        x += d * ell ** i
    return x


def _exponent(T: Point, ell: int) -> int:
    e = 0
    while not T.is_identity():
        T = ell * T
        e += 1
    return e


@lru_cache(maxsize=None)
def sylow_basis(E: Curve, degree: int, ell: int):
    """(P1, e1, P2, e2): the ell-Sylow subgroup of E(F_{p^degree}) is <P1> (+) <P2>,
    with P1 of order ell^e1, P2 of order ell^e2 and e1 >= e2."""
    F = build_ext_field(E.p, degree)
    N = order_over_extension(trace(E), E.p, degree)
    v = _valuation(N, ell)
    O = E.identity
    if v == 0:
        return O, 0, O, 0
    cof = N // ell ** v
    rng = random.Random(f"sylow-{E.p}-{E.a}-{E.b}-{degree}-{ell}")
    P1, e1, P2, e2 = O, 0, O, 0
    while e1 + e2 < v:
        T = cof * E.random_point(F, rng)
        eT = _exponent(T, ell)
        if eT > e1:
            P1, e1, P2, e2 = T, eT, O, 0
            continue
        j, R = 0, T
        while True:
            c = cyclic_log(P1, e1, R, ell)
            if c is not None:
                break
            R = ell * R
            j += 1
        if j == 0:
            continue
        if j > e2:
            P2, e2 = T - (c // ell ** j) * P1, j
    if e2 > e1:
        P1, e1, P2, e2 = P2, e2, P1, e1
    return P1, e1, P2, e2


def _check_degree(degree: int, max_degree: int):
    if degree > max_degree:
        raise CapExceeded(f"extension degree {degree} exceeds the cap {max_degree}")


@lru_cache(maxsize=None)
def group_structure(E: Curve, degree: int = 1, max_degree: int = MAX_EXT_DEGREE) -> tuple[int, int]:
    """Invariant factors (d1, d2) of E(F_{p^degree}), d1 | d2."""
    _check_degree(degree, max_degree)
    q = E.p ** degree
    N = order_over_extension(trace(E), E.p, degree)
    d1 = 1
    for ell in factorint(math.gcd(N, q - 1)):
        if N % (ell * ell) == 0:
            d1 *= ell ** sylow_basis(E, degree, ell)[3]
    return d1, N // d1


def _torsion_contained(E: Curve, n: int, degree: int) -> bool:
    q = E.p ** degree
    N = order_over_extension(trace(E), E.p, degree)
    if N % (n * n) or (q - 1) % n:
        return False
    return all(sylow_basis(E, degree, ell)[3] >= e for ell, e in factorint(n).items())


@lru_cache(maxsize=None)
def full_torsion_degree(E: Curve, n: int, max_degree: int = MAX_EXT_DEGREE) -> int:
    """Smallest m with E[n] contained in E(F_{p^m})."""
    if math.gcd(n, E.p) != 1:
        raise PreconditionError(f"level {n} is not prime to p = {E.p}")
    if n == 1:
        return 1
    for m in range(1, max_degree + 1):
        if _torsion_contained(E, n, m):
            return m
    raise CapExceeded(f"E[{n}] is not defined over F_{E.p}^m for m <= {max_degree}")


# -- torsion bases and subgroups ---------------------------------------------

@dataclass(frozen=True, eq=False)
class TorsionBasis:
    curve: Curve
    n: int
    degree: int
    P: Point
    Q: Point

    @property
    def field(self) -> FiniteField:
        return build_ext_field(self.curve.p, self.degree)

    @cached_property
    def _table(self) -> dict:
        a = self.curve.a
        Js, coords = [], []
        rows = [self.curve.identity]
        for _ in range(self.n - 1):
            rows.append(rows[-1] + self.P)
        qx, qy = self.Q.x, self.Q.y
        for i, R in enumerate(rows):
            J = None if R.is_identity() else (R.x, R.y, R.x.field.one)
            for j in range(self.n):
                Js.append(J)
                coords.append((i, j))
                if qx is not None:
                    J = _jac_add_affine(J, qx, qy, a)
        table = dict(zip(batch_to_affine(self.curve, Js), coords))
        if len(table) != self.n ** 2:
            raise InternalContradiction(f"basis of E[{self.n}] is not independent")
        return table

    def points(self) -> list[Point]:
        return list(self._table)

    @cached_property
    def multiples(self) -> dict:
        """x -> [O, x, 2x, ..., (n-1)x] for every x in E[n], by repeated addition."""
        out = {}
        for x in self._table:
            row = [self.curve.identity]
            for _ in range(self.n - 1):
                row.append(row[-1] + x)
            if not (row[-1] + x).is_identity():
                raise InternalContradiction(f"{x} is not killed by {self.n}")
            out[x] = row
        return out

    def combine(self, i: int, j: int) -> Point:
        return i * self.P + j * self.Q

    def dlog(self, R: Point) -> tuple[int, int]:
        R = R.embed(self.field)
        try:
            return self._table[R]
        except KeyError:
            raise InternalContradiction(f"{R} is not in E[{self.n}]") from None

    def reduce(self, d: int) -> "TorsionBasis":
        """Basis (n/d)P, (n/d)Q of E[d] in the same field."""
        if self.n % d:
            raise PreconditionError(f"{d} does not divide {self.n}")
        k = self.n // d
        return TorsionBasis(self.curve, d, self.degree, k * self.P, k * self.Q)


@lru_cache(maxsize=None)
def torsion_basis(E: Curve, n: int, degree: int | None = None,
                  max_degree: int = MAX_EXT_DEGREE) -> TorsionBasis:
    """A basis of E[n] over F_{p^degree}; degree defaults to the minimal one."""
    m = full_torsion_degree(E, n, max_degree)
    if degree is None:
        degree = m
    elif degree % m:
        raise PreconditionError(f"E[{n}] is not defined over F_{E.p}^{degree}")
    _check_degree(degree, max_degree)
    P, Q = E.identity, E.identity
    for ell, e in factorint(n).items():
        P1, e1, P2, e2 = sylow_basis(E, degree, ell)
        if e2 < e:
            raise InternalContradiction("Sylow subgroup too small for the requested level")
        P = P + ell ** (e1 - e) * P1
        Q = Q + ell ** (e2 - e) * P2
    return TorsionBasis(E, n, degree, P, Q)


def closure(generators, identity: Point) -> set:
    """The subgroup generated by the given points."""
    elems = {identity}
    frontier = [identity]
    gens = [g for g in generators if not g.is_identity()]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y not in elems:
                    elems.add(y)
                    new.append(y)
        frontier = new
    return elems


@dataclass(frozen=True)
class TorsionSubgroupDescriptor:
    curve: Curve
    level: int
    generators: tuple
    degree: int

    def __post_init__(self):
        for g in self.generators:
            if not (self.level * g).is_identity():
                raise PreconditionError(f"generator {g} is not killed by {self.level}")

    @cached_property
    def elements(self) -> frozenset:
        return frozenset(closure(self.generators, self.curve.identity))

    @property
    def order(self) -> int:
        return len(self.elements)


def full_torsion_subgroup(basis: TorsionBasis) -> TorsionSubgroupDescriptor:
    return TorsionSubgroupDescriptor(basis.curve, basis.n, (basis.P, basis.Q), basis.degree)


@dataclass
class ImageReport:
    n: int
    r: int
    n1: int
    image: TorsionSubgroupDescriptor
    image_order: int
    matches: bool


def mult_image_of_torsion(E: Curve, n: int, r: int, basis: TorsionBasis | None = None) -> ImageReport:
    """r * E[n], compared point by point with E[n / gcd(n, r)]."""
    basis = basis or torsion_basis(E, n)
    n1 = n // math.gcd(n, r)
    mult = basis.multiples
    image = {row[r % n] for row in mult.values()}
    target = {x for x, row in mult.items() if row[n1 % n].is_identity()}
    desc = TorsionSubgroupDescriptor(E, n1, (r * basis.P, r * basis.Q), basis.degree)
    matches = image == target and len(target) == n1 * n1 and set(desc.elements) == image
    return ImageReport(n, r, n1, desc, len(image), matches)


@dataclass
class PreimageReport:
    level: int
    m: int
    order_W: int
    order_preimage: int
    expected_order: int
    image_is_W: bool
    contains_E_m: bool

    @property
    def ok(self) -> bool:
        return self.order_preimage == self.expected_order and self.image_is_W and self.contains_E_m


def preimage_image_check(E: Curve, W: TorsionSubgroupDescriptor, m: int) -> PreimageReport:
    """Build m^{-1}W inside E[nm] and check its order, its image under m, and E[m] in it."""
    n = W.level
    M = math.lcm(full_torsion_degree(E, n * m), W.degree)
    big = torsion_basis(E, n * m, M)
    F = big.field
    W_set = closure([g.embed(F) for g in W.generators], E.identity)
    pts = big.points()
    pre = [x for x in pts if m * x in W_set]
    image = {m * x for x in pre}
    E_m = [x for x in pts if (m * x).is_identity()]
    return PreimageReport(
        level=n, m=m, order_W=len(W_set), order_preimage=len(pre),
        expected_order=len(W_set) * m * m, image_is_W=image == W_set,
        contains_E_m=set(E_m) <= set(pre) and len(E_m) == m * m,
    )

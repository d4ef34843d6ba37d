"""Binary quadratic forms and ideals of imaginary quadratic orders.

Elements of the order of discriminant D are pairs (x, y) meaning x + y*w with
w = (D + sqrt(D))/2, so w^2 = D*w - (D^2 - D)/4. An ideal is stored by its
Hermite basis {n1, m + n2*w} with 0 <= m < n1; its norm is n1*n2.

Forms and ideals correspond via (a, b, c) <-> [a, (-b + sqrt(D))/2], and an
ideal [alpha, beta] gives the form N(x*alpha - y*beta)/N(I).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from sympy import factorint

from . import zmod
from .errors import InternalContradiction, PreconditionError


def check_discriminant(D: int):
    if D >= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"{D} is not a negative discriminant")


def is_fundamental(D: int) -> bool:
    check_discriminant(D)
    if D % 4 == 1:
        return all(e == 1 for e in factorint(-D).values())
    m = D // 4
    if m % 4 not in (2, 3):
        return False
    return all(e == 1 for e in factorint(-m).values())


# -- forms ----------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if b < 0 and (abs(b) == a or a == c):
            return False
        return True

    def reduce(self) -> "QuadForm":
        a, b, c = self.a, self.b, self.c
        if a <= 0 or self.disc >= 0:
            raise PreconditionError("only positive definite forms are reduced")
        while True:
            if b > a or b <= -a:
                # translate b into (-a, a]
                k = (a - b) // (2 * a)
                c = a * k * k + b * k + c
                b = b + 2 * a * k
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return QuadForm(a, b, c)

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduce()


def principal_form(D: int) -> QuadForm:
    check_discriminant(D)
    b = D % 2
    return QuadForm(1, b, (b * b - D) // 4)


def class_group(D: int) -> list[QuadForm]:
    """Reduced primitive forms of discriminant D, sorted; the class number is the length."""
    check_discriminant(D)
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadForm(a, b, c)
            if c >= a and f.is_reduced() and f.is_primitive():
                out.append(f)
        a += 1
    return sorted(out)


def class_number(D: int) -> int:
    return len(class_group(D))


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Composition via the product of the corresponding ideals."""
    if f.disc != g.disc:
        raise PreconditionError("forms of different discriminants")
    return form_of_ideal(ideal_mul(ideal_of_form(f), ideal_of_form(g))).reduce()


# -- elements and ideals ---------------------------------------------------------------------

def elt_mul(D: int, u, v):
    x1, y1 = u
    x2, y2 = v
    k = (D * D - D) // 4
    return (x1 * x2 - k * y1 * y2, x1 * y2 + x2 * y1 + D * y1 * y2)


def elt_norm(D: int, u) -> int:
    x, y = u
    return x * x + D * x * y + y * y * (D * D - D) // 4


def elt_trace(D: int, u) -> int:
    return 2 * u[0] + D * u[1]


@dataclass(frozen=True)
class QuadIdeal:
    D: int
    n1: int
    m: int
    n2: int

    @property
    def norm(self) -> int:
        return self.n1 * self.n2

    @property
    def basis(self):
        return (self.n1, 0), (self.m, self.n2)

    def contains(self, u) -> bool:
        x, y = u
        if y % self.n2:
            return False
        return (x - (y // self.n2) * self.m) % self.n1 == 0

    def __str__(self):
        return f"[{self.n1}, {self.m} + {self.n2}w] (D = {self.D})"


def ideal_from_generators(D: int, gens) -> QuadIdeal:
    """The ideal generated by the given elements."""
    check_discriminant(D)
    rows = []
    for g in gens:
        for t in ((1, 0), (0, 1)):
            x, y = elt_mul(D, g, t)
            rows.append([y, x])
    H, _ = zmod.hnf(rows)
    if len(H) != 2:
        raise PreconditionError("generators do not span a full-rank ideal")
    (n2, m), (_, n1) = H
    I = QuadIdeal(D, n1, m % n1, n2)
    if not _is_ideal(I):
        raise InternalContradiction("lattice generated by an ideal's generators is not an ideal")
    return I


def _is_ideal(I: QuadIdeal) -> bool:
    return all(I.contains(elt_mul(I.D, b, (0, 1))) for b in I.basis)


def unit_ideal(D: int) -> QuadIdeal:
    check_discriminant(D)
    return QuadIdeal(D, 1, 0, 1)


def principal_ideal(D: int, u) -> QuadIdeal:
    return ideal_from_generators(D, [u])


def ideal_mul(I: QuadIdeal, J: QuadIdeal) -> QuadIdeal:
    if I.D != J.D:
        raise PreconditionError("ideals of different orders")
    gens = [elt_mul(I.D, a, b) for a in I.basis for b in J.basis]
    return ideal_from_generators(I.D, gens)


def ideal_norm(I: QuadIdeal) -> int:
    return I.norm


def ideals_of_norm(D: int, N: int) -> list[QuadIdeal]:
    check_discriminant(D)
    out = []
    for n2 in range(1, N + 1):
        if N % n2:
            continue
        n1 = N // n2
        for m in range(n1):
            I = QuadIdeal(D, n1, m, n2)
            if _is_ideal(I):
                out.append(I)
    return out


def ideal_of_form(f: QuadForm) -> QuadIdeal:
    D = f.disc
    return ideal_from_generators(D, [(f.a, 0), (-(f.b + D) // 2, 1)])


def form_of_ideal(I: QuadIdeal) -> QuadForm:
    D, n1, m, n2 = I.D, I.n1, I.m, I.n2
    N = I.norm
    alpha, beta = (n1, 0), (m, n2)
    a = elt_norm(D, alpha) // N
    # Tr(alpha * conj(beta)) = n1 * Tr(beta)
    b = -(n1 * elt_trace(D, beta)) // N
    c = elt_norm(D, beta) // N
    f = QuadForm(a, b, c)
    if f.disc != D:
        raise InternalContradiction("form of an ideal has the wrong discriminant")
    return f


# -- splitting ----------------------------------------------------------------------------------

def kronecker(D: int, ell: int) -> int:
    if ell == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = D % ell
    if r == 0:
        return 0
    return 1 if pow(r, (ell - 1) // 2, ell) == 1 else -1


@dataclass
class Splitting:
    ell: int
    kind: str
    primes: list


def splitting_type(ell: int, D: int) -> Splitting:
    check_discriminant(D)
    k = kronecker(D, ell)
    kind = {-1: "inert", 0: "ramified", 1: "split"}[k]
    primes = [] if k == -1 else ideals_of_norm(D, ell)
    return Splitting(ell, kind, primes)


# -- principality and small elements --------------------------------------------------------------

def elements_by_norm(I: QuadIdeal, bound: int):
    """Nonzero elements of I with norm <= bound, smallest norm first, then
    nonnegative and small coordinates first."""
    D = I.D
    (n1, _), (m, n2) = I.basis
    out = []
    N = I.norm
    f = form_of_ideal(I)
    # f(u, v) = N(u*alpha - v*beta)/N(I) <= bound/N(I)
    B = bound // N
    disc = -D
    vmax = math.isqrt(4 * f.a * B // disc) + 1
    for v in range(-vmax, vmax + 1):
        # a u^2 + b v u + c v^2 - B <= 0
        A, Bc, C = f.a, f.b * v, f.c * v * v - B
        dd = Bc * Bc - 4 * A * C
        if dd < 0:
            continue
        r = math.isqrt(dd)
        lo = (-Bc - r) // (2 * A) - 1
        hi = (-Bc + r) // (2 * A) + 1
        for u in range(lo, hi + 1):
            val = f(u, v)
            if 0 < val <= B:
                e = (u * n1 - v * m, -v * n2)
                out.append((val * N, e))
    out.sort(key=lambda t: (t[0], t[1][0] < 0, abs(t[1][0]), t[1][1] < 0, abs(t[1][1])))
    return [(e, nrm) for nrm, e in out]


@dataclass
class PrincipalReport:
    principal: bool
    generator: tuple | None
    form: QuadForm


def is_principal(I: QuadIdeal) -> PrincipalReport:
    f = form_of_ideal(I).reduce()
    principal = f == principal_form(I.D)
    gen = None
    if principal:
        for e, nrm in elements_by_norm(I, I.norm):
            if nrm == I.norm:
                gen = e
                break
        if gen is None or principal_ideal(I.D, gen) != I:
            raise InternalContradiction("principal class without a generator")
    return PrincipalReport(principal, gen, f)


# -- coprime index elements -----------------------------------------------------------------------

@dataclass
class CoprimeIndexReport:
    element: tuple
    index: int
    branch: str
    two_prime_element: tuple | None = None
    two_prime_index: int | None = None


def _first_outside(I: QuadIdeal, avoid, extra=lambda e: True):
    bound = max(4 * I.norm, 16)
    while True:
        for e, nrm in elements_by_norm(I, bound):
            if extra(e) and not any(J.contains(e) for J in avoid):
                return e
        bound *= 2
        if bound > 10 ** 9:
            raise InternalContradiction("no element found outside the given ideals")


def coprime_index_element(b: QuadIdeal, ell: int) -> CoprimeIndexReport:
    """c in b with [b : c O] = N(c)/N(b) prime to ell.

    The scan avoids every L*b for the primes L above ell. In the split case the
    two-prime construction c1 + c2 is carried out as well and reported.
    """
    D = b.D
    sp = splitting_type(ell, D)
    if sp.kind == "inert":
        avoid = [ideal_mul(principal_ideal(D, (ell, 0)), b)]
    else:
        avoid = [ideal_mul(L, b) for L in sp.primes]
    c = _first_outside(b, avoid)
    index = _index(b, c)
    report = CoprimeIndexReport(c, index, sp.kind)
    if sp.kind == "split":
        L1, L2 = sp.primes
        L1b, L2b = ideal_mul(L1, b), ideal_mul(L2, b)
        c1 = _first_outside(L2b, [L1b])
        c2 = _first_outside(L1b, [L2b])
        cc = (c1[0] + c2[0], c1[1] + c2[1])
        if not b.contains(cc) or L1b.contains(cc) or L2b.contains(cc):
            raise InternalContradiction("two-prime construction left b or hit L*b")
        report.two_prime_element, report.two_prime_index = cc, _index(b, cc)
        if report.two_prime_index % ell == 0:
            raise InternalContradiction("two-prime construction has index divisible by ell")
    if index % ell == 0:
        raise InternalContradiction("coprime index element has index divisible by ell")
    return report


def _index(b: QuadIdeal, c) -> int:
    if not b.contains(c):
        raise InternalContradiction("element is not in the ideal")
    n = elt_norm(b.D, c)
    if n % b.norm:
        raise InternalContradiction("norm of an element is not divisible by the ideal norm")
    return n // b.norm

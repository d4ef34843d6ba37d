"""Dense univariate polynomials over F_p.

Polynomials are lists of ints, lowest degree first, with no trailing zeros.
The zero polynomial is ``[]``.
"""

from __future__ import annotations


def trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def normalize(f, p):
    return trim([c % p for c in f])


def degree(f):
    return len(f) - 1


def add(f, g, p):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p
                 for i in range(n)])


def neg(f, p):
    return [(-c) % p for c in f]


def sub(f, g, p):
    return add(f, neg(g, p), p)


def scale(f, c, p):
    return trim([(a * c) % p for a in f])


def mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim([c % p for c in out])


def divmod_(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    inv = pow(g[-1], -1, p)
    dg = len(g) - 1
    q = [0] * max(len(f) - dg, 0)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv % p
        if c:
            q[i - dg] = c
            for j, b in enumerate(g):
                f[i - dg + j] = (f[i - dg + j] - c * b) % p
    return trim(q), trim(f[:dg])


def mod(f, g, p):
    return divmod_(f, g, p)[1]


def monic(f, p):
    if not f:
        return []
    return scale(f, pow(f[-1], -1, p), p)


def gcd(f, g, p):
    f, g = trim(f), trim(g)
    while g:
        f, g = g, mod(f, g, p)
    return monic(f, p)


def powmod(f, e, m, p):
    result = [1]
    base = mod(f, m, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), m, p)
        base = mod(mul(base, base, p), m, p)
        e >>= 1
    return result


def deriv(f, p):
    return trim([(i * c) % p for i, c in enumerate(f)][1:])


def evaluate(f, x):
    """Horner evaluation; ``x`` may be an int or a field element."""
    acc = 0 * x
    for c in reversed(f):
        acc = acc * x + c
    return acc


def is_irreducible(f, p):
    """Rabin-style test: no factor of degree <= deg(f)/2."""
    k = degree(f)
    if k <= 0:
        return False
    if k == 1:
        return True
    f = monic(f, p)
    x = [0, 1]
    xp = x
    for _ in range(k // 2):
        xp = powmod(xp, p, f, p)
        if degree(gcd(f, sub(xp, x, p), p)) > 0:
            return False
    return True


class RatFunc:
    """Reduced quotient num/den of F_p polynomials, den monic."""

    __slots__ = ("num", "den", "p")

    def __init__(self, num, den, p):
        num, den = normalize(num, p), normalize(den, p)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        g = gcd(num, den, p) if num else list(den)
        num = divmod_(num, g, p)[0]
        den = divmod_(den, g, p)[0]
        lead = pow(den[-1], -1, p)
        self.num = scale(num, lead, p)
        self.den = scale(den, lead, p)
        self.p = p

    @classmethod
    def const(cls, c, p):
        return cls([c], [1], p)

    def __add__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(other, self.p)
        p = self.p
        return RatFunc(add(mul(self.num, other.den, p), mul(other.num, self.den, p), p),
                       mul(self.den, other.den, p), p)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(neg(self.num, self.p), self.den, self.p)

    def __sub__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(other, self.p)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(other, self.p)
        p = self.p
        return RatFunc(mul(self.num, other.num, p), mul(self.den, other.den, p), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = RatFunc.const(other, self.p)
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        p = self.p
        return RatFunc(mul(self.num, other.den, p), mul(self.den, other.num, p), p)

    def __eq__(self, other):
        return isinstance(other, RatFunc) and (self.num, self.den) == (other.num, other.den)

    def __hash__(self):
        return hash((tuple(self.num), tuple(self.den)))

    def is_zero(self):
        return not self.num

    def compose(self, inner):
        """self(inner(x))."""
        p = self.p

        def horner(f):
            acc = RatFunc([], [1], p)
            for c in reversed(f):
                acc = acc * inner + c
            return acc

        return horner(self.num) / horner(self.den)

    def degree(self):
        return max(len(self.num), len(self.den)) - 1

    def derivative(self):
        p = self.p
        return RatFunc(sub(mul(deriv(self.num, p), self.den, p), mul(self.num, deriv(self.den, p), p), p),
                       mul(self.den, self.den, p), p)

    def frobenius(self):
        """f(x)^p = f(x^p), coefficients being fixed by Frobenius."""
        def spread(f):
            out = [0] * (self.p * (len(f) - 1) + 1) if f else []
            for i, c in enumerate(f):
                out[self.p * i] = c
            return out
        return RatFunc(spread(self.num), spread(self.den), self.p)

    def __call__(self, x):
        d = evaluate(self.den, x)
        return evaluate(self.num, x) / d

    def __repr__(self):
        return f"RatFunc({self.num}, {self.den}, p={self.p})"

"""Exact arithmetic in F_p and F_{p^k}.

Elements of F_{p^k} are residues of polynomials modulo a fixed monic
irreducible of degree k.  The modulus is the lexicographically smallest
irreducible (comparing coefficients from x^{k-1} down to the constant term),
so the same (p, k) always yields the same field and the same coordinates.
"""

from __future__ import annotations

import random
import operator
import struct
from functools import lru_cache
from itertools import product

from sympy import isprime

from . import poly
from .errors import PreconditionError, ZeroInverseError


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


class FiniteField:
    """F_{p^k}; construct through :func:`build_ext_field` to share instances."""

    def __init__(self, p: int, k: int, modulus):
        self.p = p
        self.k = k
        self.modulus = tuple(modulus)  # low -> high, monic, length k + 1
        self.order = p ** k
        self._rmod = p.__rmod__
        # x^(k+i) mod f for fast reduction of products
        self._reductions = []
        r = [(-c) % p for c in self.modulus[:k]]
        for _ in range(k - 1):
            self._reductions.append(r)
            r = [0] + r
            top = r.pop()
            if top:
                r = [(a + top * b) % p for a, b in zip(r, self._reductions[0])]
        self._setup_packing()
        self.zero = FieldElement(self, (0,) * k)
        self.one = FieldElement(self, (1,) + (0,) * (k - 1))
        self._frob_images = None
        self._nonresidue = None

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (build_ext_field, (self.p, self.k))

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise PreconditionError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FieldElement(self, (value % self.p,) + (0,) * (self.k - 1))
        coeffs = [c % self.p for c in value]
        if len(coeffs) > self.k:
            coeffs = poly.mod(coeffs, list(self.modulus), self.p)
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    @property
    def gen(self) -> "FieldElement":
        if self.k == 1:
            return self.one
        return self([0, 1])

    def from_int(self, n: int) -> "FieldElement":
        """Element whose coefficients are the base-p digits of n."""
        coeffs = []
        for _ in range(self.k):
            n, r = divmod(n, self.p)
            coeffs.append(r)
        return FieldElement(self, tuple(coeffs))

    def elements(self):
        for c in product(range(self.p), repeat=self.k):
            yield FieldElement(self, tuple(reversed(c)))

    def random(self, rng: random.Random) -> "FieldElement":
        return FieldElement(self, tuple(rng.randrange(self.p) for _ in range(self.k)))

    def nonresidue(self) -> "FieldElement":
        if self._nonresidue is None:
            e = (self.order - 1) // 2
            n = 2
            while True:
                z = self.from_int(n)
                if z and z ** e != self.one:
                    self._nonresidue = z
                    break
                n += 1
        return self._nonresidue

    def _setup_packing(self):
        # Kronecker substitution: coefficient vectors packed into one integer,
        # reduction by x^k = r(x) folded in with big-integer products.
        p, k = self.p, self.k
        self._packed = False
        if k == 1:
            return
        r = [(-c) % p for c in self.modulus[:k]]
        while r and r[-1] == 0:
            r.pop()
        deg_r = len(r) - 1
        terms = sum(1 for c in r if c)
        rounds = -(-(k - 1) // (k - deg_r)) if deg_r >= 0 else 0
        bound = k * (p - 1) ** 2
        for _ in range(rounds):
            bound = bound + bound * (p - 1) * terms
        if bound.bit_length() > 63:
            return
        self._packed = True
        self._fmt = f"<{k}Q"
        self._fmt2 = f"<{2 * k - 1}Q"
        self._shift = 64 * k
        self._mask = (1 << self._shift) - 1
        self._r_packed = int.from_bytes(struct.pack(f"<{len(r)}Q", *r), "little") if r else 0

    def _mul(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return (a[0] * b[0] % p,)
        if self._packed:
            fmt = self._fmt
            C = int.from_bytes(struct.pack(fmt, *a), "little") * \
                int.from_bytes(struct.pack(fmt, *b), "little")
            shift, mask, R = self._shift, self._mask, self._r_packed
            high = C >> shift
            while high:
                C = (C & mask) + high * R
                high = C >> shift
            return tuple(map(self._rmod, struct.unpack(fmt, C.to_bytes(8 * k, "little"))))
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        low = prod[:k]
        for i, c in enumerate(prod[k:]):
            if c:
                red = self._reductions[i]
                for j in range(k):
                    low[j] += c * red[j]
        return tuple(c % p for c in low)

    def _inv(self, a):
        p = self.p
        if self.k == 1:
            return (pow(a[0], -1, p),)
        # extended Euclid in F_p[x]
        r0, r1 = list(self.modulus), poly.trim(a)
        s0, s1 = [], [1]
        while len(r1) > 1:
            q, r = poly.divmod_(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, poly.sub(s0, poly.mul(q, s1, p), p)
        c = pow(r1[0], -1, p)
        s = poly.scale(s1, c, p)
        return tuple(s + [0] * (self.k - len(s)))

    def frobenius_images(self):
        """(x^i)^p mod f for i < k; Frobenius is F_p-linear in these."""
        if self._frob_images is None:
            xp = self.gen ** self.p
            imgs = [self.one]
            for _ in range(1, self.k):
                imgs.append(imgs[-1] * xp)
            self._frob_images = [e.c for e in imgs]
        return self._frob_images


class FieldElement:
    __slots__ = ("field", "c")

    def __init__(self, field: FiniteField, c: tuple):
        self.field = field
        self.c = c

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise PreconditionError("mixing elements of different fields")
            return other.c
        if isinstance(other, int):
            return (other % self.field.p,) + (0,) * (self.field.k - 1)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, tuple(map(self.field._rmod, map(operator.add, self.c, o))))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, tuple(map(self.field._rmod, map(operator.sub, self.c, o))))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple((-a) % p for a in self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement(self.field, tuple(map(self.field._rmod, map(other.__mul__, self.c))))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._mul(self.c, o))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if not any(self.c):
            raise ZeroInverseError("zero has no inverse")
        return FieldElement(self.field, self.field._inv(self.c))

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if self.field.k == 1:
            return FieldElement(self.field, (pow(self.c[0], e, self.field.p),))
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.c == other.c
        if isinstance(other, int):
            return self.c == self.field(other).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def __int__(self):
        if any(self.c[1:]):
            raise PreconditionError("element is not in the prime field")
        return self.c[0]

    def __repr__(self):
        if self.field.k == 1:
            return str(self.c[0])
        terms = []
        for i, a in reversed(list(enumerate(self.c))):
            if a:
                terms.append(str(a) if i == 0 else (f"{a}*" if a != 1 else "") + ("x" if i == 1 else f"x^{i}"))
        return " + ".join(terms) or "0"

    def in_prime_field(self) -> bool:
        return not any(self.c[1:])

    def frobenius(self) -> "FieldElement":
        if self.field.k == 1:
            return self
        p = self.field.p
        out = [0] * self.field.k
        for a, img in zip(self.c, self.field.frobenius_images()):
            if a:
                for j, b in enumerate(img):
                    out[j] += a * b
        return FieldElement(self.field, tuple(v % p for v in out))

    def is_square(self) -> bool:
        if not self:
            return True
        return self ** ((self.field.order - 1) // 2) == self.field.one

    def sqrt(self):
        """A square root, or None.  Tonelli-Shanks over F_q."""
        F = self.field
        if not self:
            return self
        if not self.is_square():
            return None
        q = F.order
        if q % 4 == 3:
            return self ** ((q + 1) // 4)
        s, t = 0, q - 1
        while t % 2 == 0:
            s, t = s + 1, t // 2
        z = F.nonresidue() ** t
        x = self ** ((t + 1) // 2)
        b = self ** t
        m = s
        while b != F.one:
            i, b2 = 0, b
            while b2 != F.one:
                b2 = b2 * b2
                i += 1
            w = z ** (1 << (m - i - 1))
            x, z = x * w, w * w
            b, m = b * z, i
        return x


@lru_cache(maxsize=None)
def build_ext_field(p: int, k: int = 1) -> FiniteField:
    if k < 1:
        raise PreconditionError("extension degree must be >= 1")
    if p <= 3 or not is_prime(p):
        raise PreconditionError(f"characteristic must be a prime > 3, got {p}")
    if k == 1:
        return FiniteField(p, 1, (0, 1))
    for tail in product(range(p), repeat=k):
        # tail = (c_{k-1}, ..., c_0); lexicographic scan, highest coefficient major
        f = list(reversed(tail)) + [1]
        if f[0] and poly.is_irreducible(f, p):
            return FiniteField(p, k, f)
    raise AssertionError("no irreducible polynomial found")  # unreachable


def prime_field(p: int) -> FiniteField:
    return build_ext_field(p, 1)


def fp_inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def inv_mod(a: int, n: int) -> int:
    try:
        return pow(a, -1, n)
    except ValueError:
        raise ZeroInverseError(f"{a} is not invertible modulo {n}") from None


def sqrt_mod(x: FieldElement):
    """Both square roots of x in F_p as a sorted tuple, (0,) for zero, None otherwise."""
    if x.field.k != 1:
        raise PreconditionError("sqrt_mod expects a prime-field element")
    r = x.sqrt()
    if r is None:
        return None
    roots = {int(r), int(-r)}
    return tuple(x.field(v) for v in sorted(roots))


def frobenius_endo(x: FieldElement) -> FieldElement:
    return x.frobenius()


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# -- embeddings between extensions -------------------------------------------

def _pmul(f, g, F):
    if not f or not g:
        return []
    out = [F.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = out[i + j] + a * b
    return _ptrim(out)


def _ptrim(f):
    f = list(f)
    while f and not f[-1]:
        f.pop()
    return f


def _pmod(f, g):
    f = list(f)
    inv = g[-1].inverse()
    dg = len(g) - 1
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv
        if c:
            for j, b in enumerate(g):
                f[i - dg + j] = f[i - dg + j] - c * b
    return _ptrim(f[:dg])


def _pgcd(f, g):
    f, g = _ptrim(f), _ptrim(g)
    while g:
        f, g = g, _pmod(f, g)
    inv = f[-1].inverse()
    return [c * inv for c in f]


def _ppowmod(f, e, m, F):
    result = [F.one]
    base = _pmod(f, m)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, F), m)
        base = _pmod(_pmul(base, base, F), m)
        e >>= 1
    return result


def _one_root(f, F, rng):
    """A root in F of a squarefree f splitting into linear factors over F."""
    while len(f) > 2:
        delta = F.random(rng)
        h = _ppowmod([delta, F.one], (F.order - 1) // 2, f, F)
        h = list(h) or [F.zero]
        h[0] = h[0] - 1
        h = _ptrim(h)
        if not h:
            continue
        g = _pgcd(f, h)
        if 1 < len(g) < len(f):
            rest = _pdiv_exact(f, g, F)
            f = g if len(g) <= len(rest) else rest
    return -f[0] / f[1]


def _pdiv_exact(f, g, F):
    f = list(f)
    inv = g[-1].inverse()
    dg = len(g) - 1
    q = [F.zero] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv
        q[i - dg] = c
        if c:
            for j, b in enumerate(g):
                f[i - dg + j] = f[i - dg + j] - c * b
    return _ptrim(q)


@lru_cache(maxsize=None)
def _embedding_root(p: int, k: int, K: int) -> FieldElement:
    small, big = build_ext_field(p, k), build_ext_field(p, K)
    rng = random.Random(f"embed-{p}-{k}-{K}")
    f = [big(c) for c in small.modulus]
    return _one_root(f, big, rng)


def embed(x: FieldElement, target: FiniteField) -> FieldElement:
    """Image of x under the fixed embedding F_{p^k} -> F_{p^K} (k | K)."""
    src = x.field
    if src is target:
        return x
    if src.p != target.p or target.k % src.k:
        raise PreconditionError(f"cannot embed {src} into {target}")
    if src.k == 1:
        return target(x.c[0])
    alpha = _embedding_root(src.p, src.k, target.k)
    acc = target.zero
    for a in reversed(x.c):
        acc = acc * alpha + a
    return acc

"""Search over F_p for non-isomorphic ordinary curves whose torsion agrees as a
Galois module at every tested level, and certificates for such pairs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from sympy import factorint, primerange

from . import curve as _curve
from . import galois as _galois
from . import isogeny as _isogeny
from .curve import Curve, count_points, group_structure, is_isomorphic_fp, trace
from .errors import CapExceeded, InternalContradiction, PreconditionError, SearchExhausted
from .galois import galois_isomorphic, is_intertwiner, p_part_isomorphic, unit_root
from .isogeny import Isogeny, find_isogenies, kernel_polynomial, velu

MAX_PRIME = 10 ** 4


def clear_caches():
    """Drop memoized curve data so a verification recomputes everything."""
    for fn in (_curve.count_points, _curve.sylow_basis, _curve.group_structure,
               _curve.full_torsion_degree, _curve.torsion_basis, _galois.frobenius_matrix,
               _galois.endomorphism_level, _isogeny.isogenies_of_degree):
        fn.cache_clear()


# -- isogeny classes ---------------------------------------------------------------------

@dataclass
class IsogenyClassReport:
    p: int
    trace: int
    ordinary: bool
    representatives: list  # dicts with a, b, j, class_id, size

    @property
    def class_sizes(self) -> list[int]:
        return [r["size"] for r in self.representatives]


def _check_prime(p: int):
    if p < 5 or p > MAX_PRIME:
        raise PreconditionError(f"p = {p} outside 5 <= p <= {MAX_PRIME}")
    from .arith import is_prime
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")


def fp_classes(p: int) -> list[tuple[Curve, int]]:
    """One representative per F_p-isomorphism class with the class size, in
    order of the smallest (a, b) in the class."""
    _check_prime(p)
    seen = set()
    out = []
    units = [(pow(u, 4, p), pow(u, 6, p)) for u in range(1, p)]
    for a in range(p):
        for b in range(p):
            if (4 * a ** 3 + 27 * b * b) % p == 0 or (a, b) in seen:
                continue
            orbit = {(u4 * a % p, u6 * b % p) for u4, u6 in units}
            seen |= orbit
            out.append((Curve(p, a, b), len(orbit)))
    return out


def enumerate_curves(p: int) -> list[IsogenyClassReport]:
    """F_p-isomorphism classes of curves grouped by trace, ascending trace."""
    groups = {}
    for i, (E, size) in enumerate(fp_classes(p)):
        t = trace(E)
        groups.setdefault(t, []).append({"a": E.a, "b": E.b, "j": E.j_invariant, "class_id": i, "size": size})
    return [IsogenyClassReport(p, t, t % p != 0, reps) for t, reps in sorted(groups.items())]


# -- certificates --------------------------------------------------------------------------

def prime_powers(bound: int, p: int) -> list[int]:
    """Prime powers ell^k <= bound with ell != p, ordered by (ell, k)."""
    out = []
    for ell in primerange(2, bound + 1):
        if ell == p:
            continue
        q = ell
        while q <= bound:
            out.append(q)
            q *= ell
    return out


@dataclass
class TwinCertificate:
    p: int
    curves: tuple
    trace: int
    levels: list
    p_part: dict
    isogenies: list
    group_structures: dict
    search: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        E, E2 = self.curves
        return {
            "p": self.p,
            "curves": [{"a": c.a, "b": c.b, "j": c.j_invariant} for c in (E, E2)],
            "trace": self.trace,
            "levels": self.levels,
            "p_part": self.p_part,
            "isogenies": self.isogenies,
            "group_structures": self.group_structures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def verify(self, fresh: bool = True) -> dict:
        return verify_certificate(self.to_dict(), fresh=fresh)


def _matrix(M):
    return [list(r) for r in M]


def _level_entry(E, E2, q):
    rep = galois_isomorphic(E, E2, q, allow_model=True)
    if not rep.isomorphic:
        return None
    (_, r1, r2), = rep.routes
    return {"modulus": q, "frobenius": [_matrix(rep.F), _matrix(rep.G)],
            "witness": _matrix(rep.witness), "route": [r1, r2]}


def _isogeny_entry(phi: Isogeny, ell: int) -> dict:
    return {"ell": ell, "degree": phi.degree, "kernel": kernel_polynomial(phi.kernel)}


def verify_coprime_isogeny(E: Curve, E2: Curve, ell: int, degree_bound: int) -> Isogeny:
    """An isogeny E -> E2 of degree <= bound prime to ell, with kernel search
    over Galois-stable cyclic subgroups; smallest degree first."""
    if trace(E) != trace(E2):
        raise PreconditionError("curves with different traces are not isogenous")
    if not (E.is_ordinary() and E2.is_ordinary()):
        raise PreconditionError("both curves must be ordinary")
    for phi in find_isogenies(E, E2, degree_bound, coprime_to=ell):
        return phi
    raise SearchExhausted(f"no isogeny of degree <= {degree_bound} prime to {ell}")


def certify_pair(E: Curve, E2: Curve, level_bound: int, p_precision: int,
                 isogeny_bound: int = 7):
    """A TwinCertificate for the pair, or (None, reason) at the first failed test."""
    p = E.p
    if E.j_invariant == E2.j_invariant or is_isomorphic_fp(E, E2):
        return None, "j-invariants agree"
    if trace(E) != trace(E2):
        return None, "traces differ"
    if not (E.is_ordinary() and E2.is_ordinary()):
        return None, "supersingular"
    levels = []
    for q in prime_powers(level_bound, p):
        entry = _level_entry(E, E2, q)
        if entry is None:
            return None, f"torsion differs at level {q}"
        levels.append(entry)
    pp = p_part_isomorphic(E, E2, p_precision)
    if not pp.isomorphic or pp.unit_roots[0] != pp.unit_roots[1]:
        return None, "p-parts differ"
    structures = {}
    for k in (1, 2, 3):
        s1, s2 = group_structure(E, k), group_structure(E2, k)
        if s1 != s2:
            return None, f"group structures differ over F_p^{k}"
        structures[str(k)] = [list(s1), list(s2)]
    isos = []
    for ell in sorted({q for q in primerange(2, level_bound + 1) if q != p}):
        try:
            phi = verify_coprime_isogeny(E, E2, ell, isogeny_bound)
        except SearchExhausted:
            return None, f"no isogeny prime to {ell}"
        isos.append(_isogeny_entry(phi, ell))
    cert = TwinCertificate(
        p=p, curves=(E, E2), trace=trace(E), levels=levels,
        p_part={"precision": p_precision, "unit_root": pp.unit_roots[0]},
        isogenies=isos, group_structures=structures,
    )
    return cert, "certified"


def twin_candidates(p: int):
    """Same-trace ordinary pairs with distinct j, in class order."""
    for rep in enumerate_curves(p):
        if not rep.ordinary:
            continue
        reps = rep.representatives
        for i in range(len(reps)):
            for k in range(i + 1, len(reps)):
                r1, r2 = reps[i], reps[k]
                if r1["j"] != r2["j"]:
                    yield Curve(p, r1["a"], r1["b"]), Curve(p, r2["a"], r2["b"])


def find_twin_pair(p: int, level_bound: int = 32, p_precision: int = 3,
                   isogeny_bound: int = 7) -> TwinCertificate | None:
    """First certified twin pair over F_p (tests in increasing level order)."""
    tried = 0
    for E, E2 in twin_candidates(p):
        tried += 1
        cert, _ = certify_pair(E, E2, level_bound, p_precision, isogeny_bound)
        if cert is not None:
            cert.search = {"pairs_tried": tried}
            return cert
    return None


def smallest_twin_prime(p_max: int = 100, level_bound: int = 32, p_precision: int = 3):
    for p in primerange(5, p_max + 1):
        cert = find_twin_pair(p, level_bound, p_precision)
        if cert is not None:
            return cert
    raise SearchExhausted(f"no twin pair for p <= {p_max}")


# -- verification from scratch ---------------------------------------------------------------

def _count_by_scan(p, a, b, k=1) -> int:
    """#E(F_p) by a Legendre-symbol scan, independent of the cached counter."""
    if k != 1:
        raise PreconditionError("scan counter only for the prime field")
    n = 1
    for x in range(p):
        r = (x ** 3 + a * x + b) % p
        n += 1 if r == 0 else (2 if pow(r, (p - 1) // 2, p) == 1 else 0)
    return n


def verify_certificate(cert: dict, fresh: bool = True) -> dict:
    """Recheck every claim of a certificate dictionary; raises on failure."""
    if fresh:
        clear_caches()
    p = cert["p"]
    (c1, c2) = cert["curves"]
    E, E2 = Curve(p, c1["a"], c1["b"]), Curve(p, c2["a"], c2["b"])
    checks = {}

    def need(cond, what):
        checks[what] = bool(cond)
        if not cond:
            raise InternalContradiction(f"certificate check failed: {what}")

    need(E.j_invariant == c1["j"] and E2.j_invariant == c2["j"], "j-invariants recorded correctly")
    need(E.j_invariant != E2.j_invariant, "j-invariants differ")
    need(not is_isomorphic_fp(E, E2), "not isomorphic over F_p")
    t1, t2 = p + 1 - _count_by_scan(p, E.a, E.b), p + 1 - _count_by_scan(p, E2.a, E2.b)
    need(t1 == t2 == cert["trace"], "traces equal the recorded trace")
    need(t1 % p != 0, "ordinary")
    for lv in cert["levels"]:
        q = lv["modulus"]
        F, G = lv["frobenius"]
        W = lv["witness"]
        need(is_intertwiner(W, F, G, q), f"witness intertwines at {q}")
        need(math.gcd((W[0][0] * W[1][1] - W[0][1] * W[1][0]), q) == 1, f"witness invertible at {q}")
        for M, C in ((F, E), (G, E2)):
            need((M[0][0] + M[1][1] - t1) % q == 0 and (M[0][0] * M[1][1] - M[0][1] * M[1][0] - p) % q == 0,
                 f"Frobenius characteristic polynomial at {q}")
            fresh_F = _galois.frobenius_any(C, q).entries
            need(_galois.isomorphic_from_matrices(fresh_F, M, q) is not None,
                 f"recorded Frobenius at {q} matches a recomputation")
    nu = cert["p_part"]["precision"]
    u = cert["p_part"]["unit_root"]
    need((u * u - t1 * u + p) % p ** nu == 0 and u % p == t1 % p, "unit root")
    need(unit_root(t2, p, nu) == u, "unit roots agree")
    for k, (s1, s2) in cert["group_structures"].items():
        k = int(k)
        r1, r2 = group_structure(E, k), group_structure(E2, k)
        need(list(r1) == s1 and list(r2) == s2 and s1 == s2, f"group structures over F_p^{k}")
        if p ** k <= 20_000:
            for C, s in ((E, s1), (E2, s2)):
                need(_brute_structure(C, k) == tuple(s), f"group structure by enumeration over F_p^{k}")
    for iso in cert["isogenies"]:
        ell, d, h = iso["ell"], iso["degree"], iso["kernel"]
        need(d % ell != 0, f"isogeny degree prime to {ell}")
        match = None
        for K in _isogeny.cyclic_kernels(E, d):
            if kernel_polynomial(K) == h:
                match = K
                break
        need(match is not None, f"kernel of degree {d} recovered")
        phi = velu(E, match)
        need(is_isomorphic_fp(phi.codomain, E2), f"degree-{d} isogeny lands on E'")
        need(all(phi(P).is_identity() for P in match.elements), f"degree-{d} isogeny kills its kernel")
    return checks


def _brute_structure(E: Curve, k: int):
    """Invariant factors of E(F_{p^k}) from the full point list and element orders."""
    pts = _curve.enumerate_points(E, k)
    N = len(pts)
    exponent = 1
    for P in pts:
        exponent = math.lcm(exponent, P.order(N))
    return (N // exponent, exponent)


# -- the finite shadow of "infinitely many levels" ----------------------------------------------

@dataclass
class LevelScanReport:
    bound: int
    traces: tuple
    isomorphic_levels: list
    skipped_levels: list
    forcing_levels: list
    traces_equal: bool

    @property
    def consistent(self) -> bool:
        return self.traces_equal or not self.forcing_levels


def infinite_levels_imply_isogeny_check(E: Curve, E2: Curve, bound: int) -> LevelScanReport:
    """List levels n <= bound with isomorphic torsion; any such n > 4 sqrt(p)
    forces equal traces."""
    p = E.p
    iso, skipped = [], []
    ordinary = E.is_ordinary() and E2.is_ordinary()
    for n in range(2, bound + 1):
        if math.gcd(n, p) != 1:
            continue
        try:
            rep = galois_isomorphic(E, E2, n, allow_model=ordinary)
        except CapExceeded:
            skipped.append(n)
            continue
        if rep.isomorphic:
            iso.append(n)
    forcing = [n for n in iso if n * n > 16 * p]
    t1, t2 = trace(E), trace(E2)
    report = LevelScanReport(bound, (t1, t2), iso, skipped, forcing, t1 == t2)
    if not report.consistent:
        raise InternalContradiction("isomorphic torsion at a forcing level with different traces")
    return report


# -- gluing per-prime isogenies -----------------------------------------------------------------

def coprime_candidates(L, primes, box: int = 3) -> list:
    """For each ell, the lattice element of smallest degree (small coordinates
    first) whose degree is prime to ell."""
    import itertools
    from .isogeny import HomLattice  # noqa: F401  (type only)
    if not L.rank:
        raise SearchExhausted("the Hom lattice is zero")
    combos = [c for c in itertools.product(range(-box, box + 1), repeat=L.rank) if any(c)]
    elems = sorted(((L.element(list(c)).degree(), c) for c in combos),
                   key=lambda t: (t[0], [abs(x) for x in t[1]], t[1]))
    out = []
    for ell in primes:
        for deg, c in elems:
            if deg % ell:
                out.append((ell, L.element(list(c))))
                break
        else:
            raise SearchExhausted(f"no element of degree prime to {ell} in the box")
    return out


def glue_isogenies(E: Curve, E2: Curve, primes=(2, 3, 5, 7), degree_bound: int = 7):
    """CRT-combine per-ell elements of Hom(E, E2) into one of degree prime to all ell."""
    from .isogeny import crt_combine, hom_lattice
    L = hom_lattice(E, E2, degree_bound)
    cands = coprime_candidates(L, primes)
    return crt_combine(cands, math.prod(primes))

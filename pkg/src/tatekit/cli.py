"""Command line front end; every subcommand prints JSON."""

from __future__ import annotations

import argparse
import json
import sys

from . import classfield, explorer, galois, isogeny, pairing_model
from .curve import Curve, full_torsion_degree, group_structure, torsion_basis, trace
from .errors import PreconditionError, TatekitError


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b but got {text!r}") from None
    return a, b


def _triple(text: str) -> tuple[int, int, int]:
    try:
        x, y, z = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three integers but got {text!r}") from None
    return x, y, z


def _point(P):
    if P.is_identity():
        return None
    return {"x": list(P.x.c), "y": list(P.y.c)}


def _curve(E: Curve) -> dict:
    return {"a": E.a, "b": E.b, "j": E.j_invariant}


def cmd_count(args) -> dict:
    reports = explorer.enumerate_curves(args.p)
    sizes = [s for r in reports for s in r.class_sizes]
    return {
        "p": args.p,
        "nonsingular_pairs": sum(sizes),
        "classes": len(sizes),
        "traces": [{"trace": r.trace, "ordinary": r.ordinary, "points": args.p + 1 - r.trace,
                    "curves": r.representatives} for r in reports],
    }


def cmd_torsion(args) -> dict:
    E = Curve(args.p, args.a, args.b)
    m = full_torsion_degree(E, args.n)
    B = torsion_basis(E, args.n, m)
    return {"curve": _curve(E), "n": args.n, "degree": m,
            "modulus": list(B.field.modulus) if B.field.k > 1 else None,
            "basis": [_point(B.P), _point(B.Q)],
            "group_structure": list(group_structure(E, m))}


def cmd_frobenius(args) -> dict:
    E = Curve(args.p, args.a, args.b)
    F = galois.frobenius_any(E, args.n) if E.is_ordinary() else galois.frobenius_matrix(E, args.n)
    return {"curve": _curve(E), "n": args.n, "matrix": [list(r) for r in F.entries],
            "trace": F.trace(), "det": F.det(), "order": F.order(), "route": F.route,
            "trace_of_curve": trace(E)}


def cmd_homspace(args) -> dict:
    E, E2 = Curve(args.p, *args.curve1), Curve(args.p, *args.curve2)
    mod = galois.intertwiners(E, E2, args.n)
    rep = galois.galois_isomorphic(E, E2, args.n)
    L = isogeny.hom_lattice(E, E2, args.degree_bound)
    return {"curves": [_curve(E), _curve(E2)], "n": args.n,
            "intertwiners": {"cardinality": mod.cardinality,
                             "generators": [[list(r) for r in g] for g in mod.generators]},
            "isomorphic": rep.isomorphic,
            "witness": [list(r) for r in rep.witness] if rep.witness else None,
            "hom_lattice": {"rank": L.rank, "gram": [[int(x) for x in r] for r in L.gram()],
                            "degree_bound": args.degree_bound, "index_in_hom": L.index_in_hom()}}


def cmd_isogeny(args) -> dict:
    E = Curve(args.p, *args.curve)
    out = []
    for phi in isogeny.isogenies_of_degree(E, args.kernel_order):
        out.append({"degree": phi.degree, "kernel": isogeny.kernel_polynomial(phi.kernel),
                    "kernel_order": phi.kernel.order, "codomain": _curve(phi.codomain)})
    return {"curve": _curve(E), "kernel_order": args.kernel_order, "isogenies": out}


def cmd_quaternion(args) -> dict:
    a, b, c, d, s = pairing_model.four_square_neg_one(args.n)
    Q = pairing_model.quaternion_matrix(a, b, c, d)
    rep = pairing_model.graph_isotropy_check(Q, pairing_model.SymplecticModule(args.n), samples=args.samples)
    return {"n": args.n, "squares": [a, b, c, d], "s": s, "matrix": Q.matrix,
            "gram_ok": Q.gram_ok(), "isotropic": rep.isotropic,
            "pairs_checked": rep.pairs_checked, "exhaustive": rep.exhaustive}


def cmd_classgroup(args) -> dict:
    forms = classfield.class_group(args.disc)
    return {"disc": args.disc, "fundamental": classfield.is_fundamental(args.disc),
            "class_number": len(forms), "forms": [[f.a, f.b, f.c] for f in forms]}


def cmd_coprime_index(args) -> dict:
    n1, m, n2 = args.ideal
    I = classfield.QuadIdeal(args.disc, n1, m, n2)
    classfield.check_discriminant(args.disc)
    if n1 < 1 or n2 < 1 or not 0 <= m < n1 or not classfield._is_ideal(I):
        raise PreconditionError(f"[{n1}, {m} + {n2}w] is not an ideal of discriminant {args.disc}")
    rep = classfield.coprime_index_element(I, args.ell)
    pr = classfield.is_principal(I)
    return {"disc": args.disc, "ideal": [n1, m, n2], "norm": I.norm, "ell": args.ell,
            "principal": pr.principal, "element": list(rep.element), "index": rep.index,
            "branch": rep.branch,
            "two_prime_element": list(rep.two_prime_element) if rep.two_prime_element else None,
            "two_prime_index": rep.two_prime_index}


def cmd_twins(args) -> dict:
    cert = explorer.find_twin_pair(args.p, args.level_bound, args.p_precision, args.isogeny_bound)
    if cert is None:
        from .errors import SearchExhausted
        raise SearchExhausted(f"no twin pair over F_{args.p} passes every level <= {args.level_bound}")
    return cert.to_dict()


def cmd_report(args) -> dict:
    from . import report
    return report.write_report(args.out, args.primes, args.level_bound)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tatekit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("count", help="isomorphism classes grouped by trace")
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_count)

    for name, fn, h in (("torsion", cmd_torsion, "basis of E[n]"),
                        ("frobenius", cmd_frobenius, "Frobenius on E[n]")):
        s = sub.add_parser(name, help=h)
        s.add_argument("--p", type=int, required=True)
        s.add_argument("--a", type=int, required=True)
        s.add_argument("--b", type=int, required=True)
        s.add_argument("--n", type=int, required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("homspace", help="Galois-equivariant maps E[n] -> E'[n]")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--curve1", type=_pair, required=True, metavar="A,B")
    s.add_argument("--curve2", type=_pair, required=True, metavar="A,B")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--degree-bound", type=int, default=5)
    s.set_defaults(func=cmd_homspace)

    s = sub.add_parser("isogeny", help="Velu isogenies with kernels of a given order")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--curve", type=_pair, required=True, metavar="A,B")
    s.add_argument("--kernel-order", type=int, required=True)
    s.set_defaults(func=cmd_isogeny)

    s = sub.add_parser("quaternion", help="four-square matrix and graph isotropy mod n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_quaternion)

    s = sub.add_parser("classgroup", help="reduced forms of a negative discriminant")
    s.add_argument("--disc", type=int, required=True)
    s.set_defaults(func=cmd_classgroup)

    s = sub.add_parser("coprime-index", help="element of an ideal with index prime to ell")
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--ideal", type=_triple, required=True, metavar="N1,M,N2",
                   help="Hermite basis [N1, M + N2*w]")
    s.add_argument("--ell", type=int, required=True)
    s.set_defaults(func=cmd_coprime_index)

    s = sub.add_parser("twins", help="search and certify a twin pair over F_p")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--level-bound", type=int, default=32)
    s.add_argument("--p-precision", type=int, default=3)
    s.add_argument("--isogeny-bound", type=int, default=7)
    s.set_defaults(func=cmd_twins)

    s = sub.add_parser("report", help="CSV tables and figures")
    s.add_argument("--out", default="report")
    s.add_argument("--primes", type=int, nargs="+", default=[5, 7, 11, 13, 17, 19, 23])
    s.add_argument("--level-bound", type=int, default=16)
    s.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except TatekitError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}, sort_keys=True))
        return e.exit_code
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())

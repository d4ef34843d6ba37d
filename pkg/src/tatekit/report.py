"""CSV tables and matplotlib figures summarizing trace statistics and twin pairs."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import explorer, galois  # noqa: E402
from .errors import CapExceeded  # noqa: E402


def trace_rows(primes):
    rows = []
    for p in primes:
        for rep in explorer.enumerate_curves(p):
            rows.append({"p": p, "trace": rep.trace, "ordinary": int(rep.ordinary),
                         "classes": len(rep.representatives), "curves": sum(rep.class_sizes),
                         "j_values": len({r["j"] for r in rep.representatives})})
    return rows


def twin_rows(primes, level_bound):
    rows, certs = [], {}
    for p in primes:
        cert = explorer.find_twin_pair(p, level_bound, 3)
        if cert is None:
            rows.append({"p": p, "found": 0, "a1": "", "b1": "", "a2": "", "b2": "", "trace": "",
                         "levels": 0, "isogeny_degrees": ""})
            continue
        certs[p] = cert
        E, E2 = cert.curves
        rows.append({"p": p, "found": 1, "a1": E.a, "b1": E.b, "a2": E2.a, "b2": E2.b,
                     "trace": cert.trace, "levels": len(cert.levels),
                     "isogeny_degrees": " ".join(str(i["degree"]) for i in cert.isogenies)})
    return rows, certs


def intertwiner_rows(cert, level_bound):
    """Intertwiner counts at each level for the twin pair and for E against itself."""
    E, E2 = cert.curves
    rows = []
    for n in range(2, level_bound + 1):
        if math.gcd(n, cert.p) != 1:
            continue
        try:
            c12 = galois.intertwiners(E, E2, n).cardinality
            c11 = galois.intertwiners(E, E, n).cardinality
        except CapExceeded:
            continue
        rows.append({"n": n, "pair": c12, "self": c11})
    return rows


def _write_csv(path: Path, rows):
    if not rows:
        path.write_text("")
        return
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _plot_traces(rows, path: Path):
    primes = sorted({r["p"] for r in rows})
    fig, axes = plt.subplots(len(primes), 1, figsize=(6, 1.6 * len(primes)), sharex=True)
    if len(primes) == 1:
        axes = [axes]
    for ax, p in zip(axes, primes):
        sub = [r for r in rows if r["p"] == p]
        xs = [r["trace"] / (2 * math.sqrt(p)) for r in sub]
        ax.bar(xs, [r["curves"] for r in sub], width=0.6 / math.sqrt(p), color="tab:blue")
        ax.set_ylabel(f"p={p}")
    axes[-1].set_xlabel("trace / 2 sqrt(p)")
    fig.suptitle("curves per trace")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_intertwiners(rows, p, path: Path):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ns = [r["n"] for r in rows]
    ax.semilogy(ns, [r["pair"] for r in rows], "o-", label="Hom_G(E[n], E'[n])")
    ax.semilogy(ns, [r["self"] for r in rows], "x--", label="End_G(E[n])")
    ax.semilogy(ns, [n * n for n in ns], ":", color="gray", label="n^2")
    ax.set_xlabel("n")
    ax.set_ylabel("count")
    ax.set_title(f"equivariant maps, twin pair over F_{p}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(out, primes=(5, 7, 11, 13), level_bound: int = 16) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    tr = trace_rows(primes)
    _write_csv(out / "traces.csv", tr)
    _plot_traces(tr, out / "traces.png")
    files += ["traces.csv", "traces.png"]
    tw, certs = twin_rows(primes, level_bound)
    _write_csv(out / "twins.csv", tw)
    files.append("twins.csv")
    if certs:
        p = min(certs)
        ir = intertwiner_rows(certs[p], level_bound)
        _write_csv(out / "intertwiners.csv", ir)
        _plot_intertwiners(ir, p, out / "intertwiners.png")
        files += ["intertwiners.csv", "intertwiners.png"]
    return {"out": str(out), "files": files, "twin_primes": sorted(certs)}


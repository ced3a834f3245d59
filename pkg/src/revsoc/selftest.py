"""A compact, deterministic run of the main property checks."""

from __future__ import annotations

import itertools
from typing import Any, Callable

from .arrowcheck import enumerate_arrovian_swfs, naive_recount
from .order import enumerate_weak_orders
from .reversal import build_gadget, phi_report, toy_tables
from .setalg import finite_cofinite_algebra, powerset_algebra
from .society import canonical_society, finite_society
from .swf import (
    check_independence,
    check_unanimity,
    dictator_swf,
    find_dictator,
    ks_extract,
    nondictatoriality_suite,
    sample_probe_pairs,
    swf_from_ultrafilter,
)
from .ultra import check_ultrafilter_axioms, frechet_ultrafilter, principal_ultrafilter, uf_basic_properties

FUBINI = [1, 1, 3, 13, 75, 541]


def _orders() -> dict:
    counts = [len(enumerate_weak_orders(range(k))) for k in range(1, 5)]
    return {"ok": counts == FUBINI[1:5], "counts": counts}


def _axioms() -> dict:
    a = powerset_algebra(range(3))
    idx = [i for _, i in a.subsets()]
    failures = []
    for d in range(3):
        u = principal_ultrafilter(a, d)
        triples = list(itertools.product(idx, repeat=3))
        for rep in (check_ultrafilter_axioms(u, triples), uf_basic_properties(u, triples)):
            failures += [[d, k, w] for k, w in rep.failures()]
    return {"ok": not failures, "failures": failures}


def _ks() -> dict:
    out = []
    for nv in (2, 3):
        soc = finite_society(nv)
        for d in soc.voters():
            got = find_dictator(dictator_swf(soc, d))
            u = principal_ultrafilter(soc.algebra, d)
            back = find_dictator(swf_from_ultrafilter(soc, u))
            out.append({"voters": nv, "d": d, "dictator": got, "from_ultrafilter": back})
    return {"ok": all(e["d"] == e["dictator"] == e["from_ultrafilter"] for e in out), "runs": out}


def _arrow() -> dict:
    res = enumerate_arrovian_swfs(2, (0, 1, 2), "linear")
    recount = naive_recount(2, (0, 1, 2), "linear")
    codes = {s.code for s in res.survivors}
    ok = bool(codes) and not res.non_dictatorial and codes == recount
    return {"ok": ok, **res.summary(), "recount": len(recount)}


def _fishburn() -> dict:
    soc = canonical_society(finite_cofinite_algebra())
    s = swf_from_ultrafilter(soc, frechet_ultrafilter(soc.algebra))
    reps = [
        check_unanimity(s),
        check_independence(s, sample_probe_pairs(soc, 100)),
        nondictatoriality_suite(s, k=3, bound=20),
    ]
    return {
        "ok": all(r.ok for r in reps),
        "checked": {k: c.checked for r in reps for k, c in sorted(r.clauses.items())},
    }


def _reversal() -> dict:
    bad = []
    for t, h in enumerate(toy_tables()):
        rep = phi_report(build_gadget(h), range(50), 100)
        bad += [[t, e["n"]] for e in rep["results"] if not e["agrees"]]
    return {"ok": not bad, "disagreements": bad}


CHECKS: dict[str, Callable[[], dict[str, Any]]] = {
    "orders": _orders,
    "ultrafilter_axioms": _axioms,
    "kirman_sondermann": _ks,
    "arrow_linear": _arrow,
    "fishburn": _fishburn,
    "reversal": _reversal,
}


def run_selftest() -> dict:
    results = {name: fn() for name, fn in CHECKS.items()}
    return {"ok": all(r["ok"] for r in results.values()), "checks": results}

"""Command-line interface. JSON goes to stdout, logs to stderr.

Exit codes: 0 success, 1 verification failure (with witnesses), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .arrowcheck import ArrowProblem, enumerate_arrovian_swfs, naive_recount, verify_against_ks
from .order import enumerate_weak_orders
from .reversal import Enumerator, build_gadget, phi_report, toy_machine_enumerator
from .setalg import finite_cofinite_algebra
from .society import Society, canonical_society, finite_society
from .swf import (
    AxiomViolation,
    Swf,
    SwfError,
    describe_profile,
    dictator_swf,
    ks_extract,
    nondictatoriality_suite,
    swf_from_ultrafilter,
)
from .ultra import UndecidedError, frechet_ultrafilter, principal_ultrafilter

LOG = logging.getLogger("revsoc")

SCHEMAS: dict[str, Any] = {
    "orders enum": {"type": "array", "items": "int (weak-order code)"},
    "society build": {"V": "list[int] | null", "X": "list[int]", "W": "list[int]", "default_order": "int", "algebra": "object"},
    "swf eval": {"swf": "object", "profile_index": "int", "profile": "object", "social": "weak order object"},
    "ks extract": {"ultrafilter": "object", "decisive_coalitions": "list[list[int]] (finite only)", "atoms_in": "list[int]"},
    "arrow search": {
        "summary": "object",
        "survivors": "list[{code, dictators}]",
        "recount": "int (linear only)",
        "ks": "list[{code, brute_force_dictator, extracted_dictator, match}]",
        "ok": "bool",
    },
    "fishburn demo": {"report": "clause report", "ok": "bool"},
    "reversal": {"gadget": "object", "stage_bound": "int", "results": "list[{n, result, stage|bound, direct_witness, agrees}]", "ok": "bool", "note": "str"},
    "selftest": {"ok": "bool", "checks": "object"},
}


class UsageError(Exception):
    pass


def _emit(obj: Any) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _write(path: str | None, obj: Any) -> None:
    if path:
        Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _alts(n: int) -> tuple[int, ...]:
    if n < 1:
        raise UsageError("--alts must be positive")
    return tuple(range(n))


def _society(args: argparse.Namespace) -> Society:
    if args.kind == "finite":
        try:
            return finite_society(args.voters, _alts(args.alts))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.kind == "finite-cofinite":
        return canonical_society(finite_cofinite_algebra(), _alts(args.alts))
    return build_gadget(_enumerator(args)).society


def _enumerator(args: argparse.Namespace) -> Enumerator:
    if getattr(args, "toy", None) is not None:
        return toy_machine_enumerator(args.toy)
    if not getattr(args, "h", None):
        raise UsageError("give --h TABLE.json or --toy K")
    try:
        return Enumerator.load(args.h)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.h}: {exc}") from exc


def _swf(soc: Society, provenance: str, stage_bound: int | None) -> Swf:
    kind, _, arg = provenance.partition(":")
    try:
        if kind == "dictator":
            return dictator_swf(soc, int(arg))
        if kind == "principal":
            return swf_from_ultrafilter(soc, principal_ultrafilter(soc.algebra, int(arg)))
        if kind == "frechet":
            return swf_from_ultrafilter(soc, frechet_ultrafilter(soc.algebra, stage_bound))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown provenance {provenance!r}")


# -- verbs -----------------------------------------------------------------------


def cmd_orders(args: argparse.Namespace) -> int:
    try:
        W = enumerate_weak_orders(_alts(args.alts))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit([r.to_json() for r in W] if args.full else [r.code for r in W])
    return 0


def cmd_society(args: argparse.Namespace) -> int:
    _emit(_society(args).to_json())
    return 0


def cmd_swf(args: argparse.Namespace) -> int:
    soc = _society(args)
    s = _swf(soc, args.provenance, args.stage_bound)
    try:
        out = s.sigma(args.profile_index)
    except UndecidedError as exc:
        _emit({"swf": s.provenance, "profile_index": args.profile_index, "undecided": {"index": exc.index, "stage": exc.stage}})
        return 1
    _emit(
        {
            "swf": s.provenance,
            "profile_index": args.profile_index,
            "profile": describe_profile(soc, args.profile_index, args.stage_bound),
            "social": out.to_json(),
        }
    )
    return 0


def cmd_ks(args: argparse.Namespace) -> int:
    soc = _society(args)
    s = _swf(soc, args.provenance, args.stage_bound)
    try:
        u = ks_extract(s)
    except AxiomViolation as exc:
        _emit({"error": str(exc), "reports": [r.to_json() for r in exc.reports]})
        return 1
    except SwfError as exc:
        _emit({"error": str(exc)})
        return 1
    out: dict[str, Any] = {"ultrafilter": u.describe()}
    bound = len(soc.voters()) if soc.finite else args.bound
    out["atoms_in"] = [v for v in range(bound) if u.member(soc.algebra.atom_index(v))]
    if soc.finite:
        out["decisive_coalitions"] = [sorted(sub) for sub, i in soc.algebra.subsets() if u.member(i)]
    _emit(out)
    return 0


def cmd_arrow(args: argparse.Namespace) -> int:
    try:
        problem = ArrowProblem(args.voters, _alts(args.alts), args.domain)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = enumerate_arrovian_swfs(args.voters, problem.alts, args.domain, jobs=args.jobs)
    out: dict[str, Any] = {
        "summary": res.summary(),
        "survivors": [{"code": s.code, "dictators": s.dictators} for s in res.survivors],
    }
    ok = bool(res.survivors) and not res.non_dictatorial
    if args.domain == "linear":
        recount = naive_recount(args.voters, problem.alts, "linear")
        out["recount"] = len(recount)
        ok = ok and recount == {s.code for s in res.survivors}
    if args.verify_ks:
        checks = [verify_against_ks(s, problem) for s in res.survivors]
        out["ks"] = checks
        ok = ok and all(c["match"] for c in checks)
    if res.non_dictatorial:
        out["witnesses"] = [s.to_json() for s in res.non_dictatorial]
    out["ok"] = ok
    _emit(out)
    _write(args.emit, {**out, "survivors": [s.to_json() for s in res.survivors]})
    return 0 if ok else 1


def cmd_fishburn(args: argparse.Namespace) -> int:
    soc = canonical_society(finite_cofinite_algebra())
    s = swf_from_ultrafilter(soc, frechet_ultrafilter(soc.algebra))
    rep = nondictatoriality_suite(s, k=args.k, bound=args.bound, seed=args.seed)
    _emit({"report": rep.to_json(), "ok": rep.ok})
    return 0 if rep.ok else 1


def cmd_reversal(args: argparse.Namespace) -> int:
    if args.stage_bound < 0:
        raise UsageError("--stage-bound must be non-negative")
    gs = build_gadget(_enumerator(args))
    ns = args.n if args.n else list(range(args.upto))
    rep = phi_report(gs, ns, args.stage_bound)
    _emit(rep)
    _write(args.emit, rep)
    return 0 if rep["ok"] else 1


def cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    out = run_selftest()
    _emit(out)
    return 0 if out["ok"] else 1


# -- parser ---------------------------------------------------------------------------


def _society_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=["finite", "finite-cofinite", "gadget"], default="finite")
    p.add_argument("--voters", type=int, default=3, help="number of voters (finite kind)")
    p.add_argument("--alts", type=int, default=3)
    p.add_argument("--h", help="enumeration table JSON (gadget kind)")
    p.add_argument("--toy", type=int, help="toy machine family (gadget kind)")


def _arrow_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--voters", type=int, default=2)
    p.add_argument("--alts", type=int, default=3)
    p.add_argument("--domain", choices=["linear", "weak"], default="linear")
    p.add_argument("--emit", help="write survivors with full aggregator tables to this file")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--verify-ks", action="store_true", help="run the ultrafilter extraction on every survivor")
    p.set_defaults(func=cmd_arrow)


def _reversal_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h", help="enumeration table JSON")
    p.add_argument("--toy", type=int, help="use toy machine family K instead of a table")
    p.add_argument("--n", type=int, action="append", help="query n (repeatable)")
    p.add_argument("--upto", type=int, default=50, help="query every n below this when --n is absent")
    p.add_argument("--stage-bound", type=int, default=100)
    p.add_argument("--emit", help="also write the report to this file")
    p.set_defaults(func=cmd_reversal)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revsoc", description="Computable social choice on countable societies.")
    parser.add_argument("--schema", action="store_true", help="print the JSON output schemas and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb")

    orders = sub.add_parser("orders").add_subparsers(dest="action", required=True)
    p = orders.add_parser("enum")
    p.add_argument("--alts", type=int, default=3)
    p.add_argument("--full", action="store_true", help="emit order objects instead of codes")
    p.set_defaults(func=cmd_orders)

    society = sub.add_parser("society").add_subparsers(dest="action", required=True)
    p = society.add_parser("build")
    _society_args(p)
    p.set_defaults(func=cmd_society)

    swf = sub.add_parser("swf").add_subparsers(dest="action", required=True)
    p = swf.add_parser("eval")
    _society_args(p)
    p.add_argument("--provenance", default="dictator:0", help="dictator:D, principal:D or frechet")
    p.add_argument("--profile-index", type=int, required=True)
    p.add_argument("--stage-bound", type=int)
    p.set_defaults(func=cmd_swf)

    ks = sub.add_parser("ks").add_subparsers(dest="action", required=True)
    p = ks.add_parser("extract")
    _society_args(p)
    p.add_argument("--provenance", default="dictator:0")
    p.add_argument("--stage-bound", type=int)
    p.add_argument("--bound", type=int, default=50, help="atoms to test on infinite societies")
    p.set_defaults(func=cmd_ks)

    arrow = sub.add_parser("arrow").add_subparsers(dest="action", required=True)
    _arrow_args(arrow.add_parser("search"))

    fishburn = sub.add_parser("fishburn").add_subparsers(dest="action", required=True)
    p = fishburn.add_parser("demo")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--bound", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fishburn)

    _reversal_args(sub.add_parser("reversal"))
    sub.add_parser("selftest").set_defaults(func=cmd_selftest)
    return parser


def _dispatch(parser: argparse.ArgumentParser, argv: Sequence[str] | None) -> int:
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING, stream=sys.stderr)
    if getattr(args, "schema", False):
        _emit(SCHEMAS)
        return 0
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def run(argv: Sequence[str] | None = None) -> int:
    return _dispatch(build_parser(), argv)


def arrowcheck_main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="arrowcheck", description="Exhaustive Arrow check on a tiny society.")
    parser.add_argument("-v", "--verbose", action="store_true")
    _arrow_args(parser)
    return _dispatch(parser, argv)


def reversal_main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="reversal", description="Stage-bounded range gadget.")
    parser.add_argument("-v", "--verbose", action="store_true")
    _reversal_args(parser)
    return _dispatch(parser, argv)


def main() -> None:
    sys.exit(run())


def arrowcheck_entry() -> None:
    sys.exit(arrowcheck_main())


def reversal_entry() -> None:
    sys.exit(reversal_main())

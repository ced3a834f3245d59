"""Ultrafilters on countable algebras, given by membership procedures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence, Union

from .setalg import Algebra, Cofinite, Finite, Unknown

Decision = Union[bool, Unknown]


class UndecidedError(RuntimeError):
    """Raised when membership cannot be settled within the stage bound."""

    def __init__(self, index: int, stage: int) -> None:
        super().__init__("ultrafilter undecided at stage bound")
        self.index = index
        self.stage = stage


@dataclass
class Ultrafilter:
    algebra: Algebra
    decide: Callable[[int], Decision] = field(repr=False)
    kind: str
    point: int | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def member(self, i: int) -> bool:
        d = self.decide(i)
        if isinstance(d, Unknown):
            raise UndecidedError(i, d.stage)
        return d

    def __contains__(self, i: int) -> bool:
        return self.member(i)

    def describe(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.point is not None:
            out["point"] = self.point
        out.update(self.meta)
        return out


def principal_ultrafilter(a: Algebra, d: int) -> Ultrafilter:
    if not a.in_universe(d):
        raise ValueError(f"{d} is not a voter")
    return Ultrafilter(a, lambda i: a.contains(i, d), "principal", point=d)


def frechet_ultrafilter(a: Algebra, stage_bound: int | None = None) -> Ultrafilter:
    """The ultrafilter of cofinite sets on a finite-cofinite (sub)algebra.

    Algebras with oracle-backed generators need a stage bound; membership of a
    set whose normal form is still open at that stage is ``Unknown``.
    """
    if a.finite:
        raise ValueError("the Frechet ultrafilter needs an infinite set of voters")
    if not a.exact and stage_bound is None:
        raise ValueError(f"algebra {a.name} has no exact normal forms; a stage bound is required")

    def decide(i: int) -> Decision:
        nf = a.normal_form(i, stage_bound)
        if isinstance(nf, Unknown):
            return nf
        return isinstance(nf, Cofinite)

    meta = {} if stage_bound is None else {"stage_bound": stage_bound}
    return Ultrafilter(a, decide, "frechet", meta=meta)


# -- probe-based checks -------------------------------------------------------


@dataclass
class ClauseResult:
    checked: int = 0
    undecided: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, witness: Any) -> None:
        self.failures.append(witness)


@dataclass
class Report:
    name: str
    clauses: dict[str, ClauseResult] = field(default_factory=dict)
    notes: dict[str, Any] = field(default_factory=dict)

    def clause(self, key: str) -> ClauseResult:
        return self.clauses.setdefault(key, ClauseResult())

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses.values())

    def failures(self) -> list:
        return [(k, w) for k, c in self.clauses.items() for w in c.failures]

    def to_json(self) -> dict:
        return {
            "report": self.name,
            "ok": self.ok,
            "clauses": {
                k: {"checked": c.checked, "undecided": c.undecided, "ok": c.ok, "failures": c.failures}
                for k, c in sorted(self.clauses.items())
            },
            **({"notes": self.notes} if self.notes else {}),
        }


class _Probe:
    """Caches relation queries and membership decisions for a check run."""

    def __init__(self, u: Ultrafilter) -> None:
        self.u = u
        self.a = u.algebra
        self._dec: dict[int, Decision] = {}
        self._compl: dict[int, int] = {}

    def mem(self, i: int) -> Decision:
        if i not in self._dec:
            self._dec[i] = self.u.decide(i)
        return self._dec[i]

    def compl(self, i: int) -> int:
        if i not in self._compl:
            self._compl[i] = self.a.complement_index(i)
        return self._compl[i]

    def is_full(self, i: int) -> bool | None:
        return self.a.is_empty(self.compl(i), self._stage())

    def is_empty(self, i: int) -> bool | None:
        return self.a.is_empty(i, self._stage())

    def subset(self, i: int, j: int) -> bool | None:
        return self.a.subset(i, j, self._stage())

    def equal(self, i: int, j: int) -> bool | None:
        ij, ji = self.subset(i, j), self.subset(j, i)
        if ij is False or ji is False:
            return False
        if ij is None or ji is None:
            return None
        return True

    def _stage(self) -> int | None:
        return self.u.meta.get("stage_bound")


def _known(*ds: Decision) -> bool:
    return not any(isinstance(d, Unknown) for d in ds)


def check_ultrafilter_axioms(u: Ultrafilter, probe: Iterable[Sequence[int]]) -> Report:
    """Check non-emptiness, properness, upwards closure, intersections and
    maximality on every probe tuple ``(i, j, k)``."""
    p = _Probe(u)
    rep = Report("ultrafilter_axioms")
    for i, j, k in probe:
        for x in {i, j, k}:
            _clause_nonempty(p, rep, x)
            _clause_proper(p, rep, x)
        # upwards closure
        c = rep.clause("upwards_closure")
        mi, mj = p.mem(i), p.mem(j)
        sub = p.subset(i, j)
        if sub is None or not _known(mi, mj):
            c.undecided += 1
        else:
            c.checked += 1
            if mi is True and sub and mj is not True:
                c.fail([i, j])
        # intersections
        c = rep.clause("intersections")
        mk = p.mem(k)
        eq = p.equal(k, u.algebra.intersect_index(i, j))
        if eq is None or not _known(mi, mj, mk):
            c.undecided += 1
        else:
            c.checked += 1
            if mi is True and mj is True and eq and mk is not True:
                c.fail([i, j, k])
        # maximality
        c = rep.clause("maximality")
        eq = p.equal(j, p.compl(i))
        if eq is None or not _known(mi, mj):
            c.undecided += 1
        else:
            c.checked += 1
            if eq and mi is not True and mj is not True:
                c.fail([i, j])
    return rep


def _clause_nonempty(p: _Probe, rep: Report, i: int) -> None:
    c = rep.clause("non_emptiness")
    full, m = p.is_full(i), p.mem(i)
    if full is None or not _known(m):
        c.undecided += 1
        return
    c.checked += 1
    if full and m is not True:
        c.fail([i])


def _clause_proper(p: _Probe, rep: Report, i: int) -> None:
    c = rep.clause("properness")
    empty, m = p.is_empty(i), p.mem(i)
    if empty is None or not _known(m):
        c.undecided += 1
        return
    c.checked += 1
    if empty and m is True:
        c.fail([i])


def uf_basic_properties(
    u: Ultrafilter,
    probe: Iterable[Sequence[int]],
    points: Iterable[int] | None = None,
) -> Report:
    """Check the derived properties of an ultrafilter on the probe.

    * complement exclusion: ``i`` in and ``A_j = A_i^c`` imply ``j`` out;
    * union splitting for pairs and for whole probe tuples, with the member
      part recorded as the witness;
    * principal iff some finite set is a member iff membership is "contains d"
      for a single ``d`` among ``points`` (default: all of a finite ``V``,
      otherwise ``0..99``).
    """
    a = u.algebra
    p = _Probe(u)
    rep = Report("ultrafilter_basic_properties")
    tuples = [tuple(t) for t in probe]
    witnesses: list = []

    for t in tuples:
        for i, j in itertools.permutations(t, 2):
            c = rep.clause("complement_exclusion")
            eq = p.equal(j, p.compl(i))
            mi, mj = p.mem(i), p.mem(j)
            if eq is None or not _known(mi, mj):
                c.undecided += 1
            else:
                c.checked += 1
                if eq and mi is True and mj is True:
                    c.fail([i, j])
        for i, j in itertools.combinations(t, 2):
            c = rep.clause("union_splitting")
            k = a.union_index(i, j)
            mi, mj, mk = p.mem(i), p.mem(j), p.mem(k)
            if not _known(mi, mj, mk):
                c.undecided += 1
                continue
            c.checked += 1
            if mk is True:
                if mi is True:
                    witnesses.append([i, j, i])
                elif mj is True:
                    witnesses.append([i, j, j])
                else:
                    c.fail([i, j, k])
        if len(t) >= 2:
            c = rep.clause("finite_union_splitting")
            k = t[0]
            for i in t[1:]:
                k = a.union_index(k, i)
            ms = [p.mem(i) for i in t]
            mk = p.mem(k)
            if not _known(mk, *ms):
                c.undecided += 1
            else:
                c.checked += 1
                if mk is True and not any(m is True for m in ms):
                    c.fail(list(t) + [k])

    if points is None:
        points = sorted(a.universe) if a.finite else range(100)
    points = list(points)
    atoms = [a.atom_index(d) for d in points] if a.atomic else []
    indexes = sorted({i for t in tuples for i in t} | set(atoms))

    c = rep.clause("principality_equivalence")
    mems = {i: p.mem(i) for i in indexes}
    if not _known(*mems.values()):
        c.undecided += 1
    else:
        c.checked += 1
        singletons = []
        finite_members = []
        for i in indexes:
            nf = a.normal_form(i, p._stage())
            if isinstance(nf, Finite) and mems[i] is True:
                finite_members.append(i)
                if len(nf.elems) == 1:
                    singletons.append(i)
        generated = [d for d in points if all(mems[i] == a.contains(i, d) for i in indexes)]
        verdicts = [bool(singletons), bool(finite_members), bool(generated)]
        rep.notes["principal"] = verdicts[0]
        rep.notes["finite_member"] = verdicts[1]
        rep.notes["generating_points"] = generated
        if len(set(verdicts)) != 1:
            c.fail({"principal": verdicts[0], "finite_member": verdicts[1], "point": generated})
    rep.notes["union_witnesses"] = witnesses
    return rep

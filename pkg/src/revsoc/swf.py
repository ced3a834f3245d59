"""Social welfare functions on countable societies.

Axiom checks are probe based: exhaustive over ``W^V`` on finite societies,
bounded samples on infinite ones. Extraction of the decisive-coalition
ultrafilter uses a single evaluation per coalition (the profile ``g(n)``
below) and is cross-checked against brute force on finite societies.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

from .order import OrderPattern, WeakOrder, make_order
from .setalg import Cofinite
from .society import FiniteSociety, Society
from .ultra import Report, Ultrafilter

DEFAULT_PROBE_LIMIT = 2000


class SwfError(RuntimeError):
    pass


class AxiomViolation(SwfError):
    def __init__(self, message: str, reports: Sequence[Report]) -> None:
        super().__init__(message)
        self.reports = list(reports)


class Swf:
    """A total map from profile indexes to weak orders."""

    def __init__(
        self,
        society: Society,
        rule: Callable[[int], WeakOrder],
        provenance: dict[str, Any],
        table_rule: Callable[[tuple[WeakOrder, ...]], WeakOrder] | None = None,
    ) -> None:
        self.society = society
        self.provenance = provenance
        self._sigma = lru_cache(maxsize=1 << 16)(rule)
        self._table_rule = table_rule
        self._table_outputs: list[WeakOrder] | None = None
        self._oracle: _TableOracle | None = None

    def sigma(self, n: int) -> WeakOrder:
        return self._sigma(n)

    __call__ = sigma

    def sigma_table(self, orders: Sequence[WeakOrder]) -> WeakOrder:
        if self._table_rule is not None:
            return self._table_rule(tuple(orders))
        soc = _finite(self.society)
        return self.sigma(soc.bridge(orders))

    def table_outputs(self) -> list[WeakOrder]:
        """``sigma`` on every table profile, in :meth:`FiniteSociety.all_profiles` order."""
        if self._table_outputs is None:
            soc = _finite(self.society)
            self._table_outputs = [self.sigma_table(t) for t in soc.all_profiles()]
        return self._table_outputs


def _finite(soc: Society) -> FiniteSociety:
    if not isinstance(soc, FiniteSociety):
        raise SwfError("oracle requires finite society")
    return soc


def dictator_swf(soc: Society, d: int) -> Swf:
    if not soc.algebra.in_universe(d):
        raise ValueError(f"{d} is not a voter")
    table_rule = None
    if isinstance(soc, FiniteSociety):
        k = soc.voter_position(d)
        table_rule = lambda t: t[k]  # noqa: E731
    return Swf(soc, lambda n: soc.eval(n, d), {"kind": "dictator", "voter": d}, table_rule)


def table_swf(soc: FiniteSociety, table: Mapping[tuple[WeakOrder, ...], WeakOrder] | Callable) -> Swf:
    """A finite-society SWF given on table profiles; indexes are tabulated first."""
    rule = table if callable(table) else table.__getitem__
    return Swf(soc, lambda n: rule(soc.tabulate(n)), {"kind": "table"}, rule)


def swf_from_ultrafilter(soc: Society, u: Ultrafilter) -> Swf:
    """``sigma(n) = {(x, y) : mu(n, x, y) in U}``."""
    alts = soc.alts

    def rule(n: int) -> WeakOrder:
        pairs = frozenset((x, y) for x in alts for y in alts if u.member(soc.mu(n, x, y)))
        r = WeakOrder(alts, pairs)
        # the relation is pinned down pair by pair, so it is the least code satisfying it
        assert soc.order(r.code) == r
        return r

    return Swf(soc, rule, {"kind": "from_ultrafilter", "ultrafilter": u.describe()})


# -- probes ------------------------------------------------------------------


def _random_cell(soc: Society, rng: random.Random) -> int:
    alg = soc.algebra
    if soc.finite:
        vs = soc.voters()
        return alg.finite_index([v for v in vs if rng.random() < 0.5])
    elems = rng.sample(range(12), rng.randint(0, 4))
    if rng.random() < 0.5:
        return alg.finite_index(elems)
    return alg.cofinite_index(elems)


def random_profile(soc: Society, rng: random.Random, max_cells: int = 3) -> int:
    k = rng.randint(1, max_cells)
    cells = [_random_cell(soc, rng) for _ in range(k)]
    perm = list(soc.W)
    rng.shuffle(perm)
    return soc.e(perm, cells)


def _random_order(soc: Society, rng: random.Random, pred: Callable[[WeakOrder], bool]) -> WeakOrder:
    return rng.choice([r for r in soc.W if pred(r)])


def agreeing_partner(soc: Society, n: int, x: int, y: int, rng: random.Random) -> int:
    """A profile equal to ``f_n`` on ``{x, y}`` but otherwise re-randomised."""
    leading = [
        _random_order(soc, rng, lambda r: r.lt(x, y)),
        _random_order(soc, rng, lambda r: r.lt(y, x)),
        _random_order(soc, rng, lambda r: r.sim(x, y)),
    ]
    return soc.qp_index(leading, [soc.mu_strict(n, x, y), soc.mu_strict(n, y, x)])


def extraction_patterns(soc: Society, cells: Sequence[int]) -> list[int]:
    """Profiles built from the patterns the extraction argument relies on."""
    x, y, z = soc.alts[:3]
    alg = soc.algebra
    out = []
    for c in cells:
        cc = alg.complement_index(c)
        out.append(soc.qp_index([f"{x} < {y} < *", f"{y} < {x} < *"], [c]))
        out.append(soc.qp_index([f"{x} < {y} < {z} ~ *", f"{y} < {z} < {x} ~ *"], [c]))
        out.append(soc.qp_index([f"{y} < {z} < {x} ~ *", f"{x} < {y} < {z} ~ *"], [c]))
        out.append(soc.qp_index([f"{x} < {y} ~ *", f"{y} < {x} ~ *"], [c]))
        out.append(
            soc.qp_index([f"{x} < {z} < {y} ~ *", f"{y} < {z} < {x} ~ *", f"{x} ~ {y} < {z} ~ *"], [c, cc])
        )
    for c, d in zip(cells, cells[1:]):
        i_and_j = alg.intersect_index(c, d)
        v1 = alg.intersect_index(c, alg.complement_index(d))
        v2 = alg.intersect_index(alg.complement_index(c), d)
        out.append(
            soc.qp_index(
                [f"{z} < {x} < {y} ~ *", f"{x} < {y} < {z} ~ *", f"{y} < {z} < {x} ~ *", f"{y} < {x} < {z} ~ *"],
                [i_and_j, v1, v2],
            )
        )
    return out


def default_probes(soc: Society, limit: int = DEFAULT_PROBE_LIMIT, seed: int = 0) -> list[int]:
    """All table profiles of a finite society; otherwise the indexes below
    ``limit`` plus seeded constructions."""
    if isinstance(soc, FiniteSociety):
        return [soc.bridge(t) for t in soc.all_profiles()]
    rng = random.Random(seed)
    alg = soc.algebra
    cells = [alg.atom_index(v) for v in range(4)]
    cells += [alg.finite_index([0, 1, 2]), alg.cofinite_index([0, 1]), alg.cofinite_index([3, 5, 7])]
    probes = list(range(limit)) + extraction_patterns(soc, cells)
    probes += [random_profile(soc, rng) for _ in range(60)]
    return probes


def sample_probe_pairs(soc: Society, count: int, seed: int = 0) -> list[tuple[int, int]]:
    """Half agreeing pairs (built to agree on one pair), half unrelated pairs."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = random_profile(soc, rng)
        if k % 2 == 0:
            x, y = rng.sample(soc.alts, 2)
            out.append((n, agreeing_partner(soc, n, x, y, rng)))
        else:
            out.append((n, random_profile(soc, rng)))
    return out


def describe_profile(soc: Society, n: int, stage: int | None = None) -> dict:
    if isinstance(soc, FiniteSociety):
        return {"table": [r.code for r in soc.tabulate(n)]}
    qp = soc.decode(n)
    if qp is None:
        return {"default": soc.default_order.code}
    return {
        "orders": [r.code for r in qp.perm[: len(qp.cells) + 1]],
        "cells": [soc.algebra.normal_form(c, stage).to_json() for c in qp.cells],
    }


# -- axiom checks ------------------------------------------------------------


def check_unanimity(s: Swf, probes: Iterable[int] | None = None) -> Report:
    soc = s.society
    rep = Report("unanimity")
    c = rep.clause("unanimity")
    if probes is None and isinstance(soc, FiniteSociety):
        for t, out in zip(soc.all_profiles(), s.table_outputs()):
            for x, y in itertools.permutations(soc.alts, 2):
                c.checked += 1
                if all(r.lt(x, y) for r in t) and not out.lt(x, y):
                    c.fail({"profile": {"table": [r.code for r in t]}, "pair": [x, y], "output": out.code})
        return rep
    if probes is None:
        probes = default_probes(soc)
    stage = _stage_of(s)
    for n in probes:
        out = s.sigma(n)
        for x, y in itertools.permutations(soc.alts, 2):
            full = soc.algebra.is_full(soc.mu_strict(n, x, y), stage)
            if full is None:
                c.undecided += 1
                continue
            c.checked += 1
            if full and not out.lt(x, y):
                c.fail({"profile": describe_profile(soc, n, stage), "pair": [x, y], "output": out.code})
    return rep


def _restriction(r: WeakOrder, x: int, y: int) -> tuple[bool, bool]:
    return r.le(x, y), r.le(y, x)


def check_independence(s: Swf, probe_pairs: Iterable[tuple[int, int]] | None = None) -> Report:
    soc = s.society
    rep = Report("independence")
    c = rep.clause("independence")
    if probe_pairs is None and isinstance(soc, FiniteSociety):
        tables = soc.all_profiles()
        outs = s.table_outputs()
        for x, y in itertools.combinations(soc.alts, 2):
            seen: dict[tuple, tuple[int, tuple[bool, bool]]] = {}
            for k, (t, out) in enumerate(zip(tables, outs)):
                key = tuple(_restriction(r, x, y) for r in t)
                social = _restriction(out, x, y)
                c.checked += 1
                if key not in seen:
                    seen[key] = (k, social)
                elif seen[key][1] != social:
                    other = tables[seen[key][0]]
                    c.fail(
                        {
                            "pair": [x, y],
                            "profiles": [{"table": [r.code for r in other]}, {"table": [r.code for r in t]}],
                            "outputs": [outs[seen[key][0]].code, out.code],
                        }
                    )
        return rep
    if probe_pairs is None:
        probe_pairs = sample_probe_pairs(soc, 200)
    stage = _stage_of(s)
    probe_pairs = list(probe_pairs)
    rep.notes["probe_pairs"] = len(probe_pairs)
    for n, m in probe_pairs:
        for x, y in itertools.combinations(soc.alts, 2):
            agree = soc.profiles_agree_on(n, m, (x, y), stage=stage)
            if not agree:
                continue
            c.checked += 1
            if _restriction(s.sigma(n), x, y) != _restriction(s.sigma(m), x, y):
                c.fail(
                    {
                        "pair": [x, y],
                        "profiles": [describe_profile(soc, n, stage), describe_profile(soc, m, stage)],
                        "outputs": [s.sigma(n).code, s.sigma(m).code],
                    }
                )
    return rep


def _stage_of(s: Swf) -> int | None:
    u = s.provenance.get("ultrafilter") or {}
    return u.get("stage_bound")


# -- decisiveness ------------------------------------------------------------


@dataclass(frozen=True)
class DecisivenessQuery:
    coalition_index: int
    mode: str = "decisive"  # decisive | almost_decisive | almost_decisive_at
    pair: tuple[int, int] | None = None
    at_profile: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("decisive", "almost_decisive", "almost_decisive_at"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "almost_decisive_at" and (self.pair is None or self.at_profile is None):
            raise ValueError("almost_decisive_at needs a pair and a profile")


@dataclass
class AlmostDecisiveTest:
    """``member(n)`` iff ``a`` beats ``b`` socially at ``g(n)``."""

    swf: Swf = field(repr=False)
    a: int
    b: int
    patterns: tuple[WeakOrder, WeakOrder]

    def g(self, n: int) -> int:
        return self.swf.society.qp_index(list(self.patterns), [n])

    def member(self, n: int) -> bool:
        return self.swf.sigma(self.g(n)).lt(self.a, self.b)

    __call__ = member


def almost_decisive_membership(s: Swf) -> AlmostDecisiveTest:
    soc = s.society
    a, b = soc.alts[0], soc.alts[1]
    p0 = make_order(OrderPattern(((a,), (b,), ()), 2), soc.alts)
    p1 = make_order(OrderPattern(((b,), (a,), ()), 2), soc.alts)
    return AlmostDecisiveTest(s, a, b, (p0, p1))


class _TableOracle:
    """Brute-force decisiveness over every table profile of a finite society."""

    def __init__(self, s: Swf) -> None:
        self.soc = _finite(s.society)
        self.tables = self.soc.all_profiles()
        self.outs = s.table_outputs()
        self.strict: dict[tuple[int, int], list[int]] = {}
        self.social: dict[tuple[int, int], list[bool]] = {}
        for x, y in itertools.permutations(self.soc.alts, 2):
            masks = []
            for t in self.tables:
                mask = 0
                for k, r in enumerate(t):
                    if r.lt(x, y):
                        mask |= 1 << k
                masks.append(mask)
            self.strict[x, y] = masks
            self.social[x, y] = [o.lt(x, y) for o in self.outs]
        self.full = (1 << len(self.soc.voters())) - 1

    def coalition_mask(self, i: int) -> int:
        mask = 0
        for k, v in enumerate(self.soc.voters()):
            if self.soc.algebra.contains(i, v):
                mask |= 1 << k
        return mask

    def decisive_for(self, cmask: int, x: int, y: int) -> bool:
        sxy, soc_lt = self.strict[x, y], self.social[x, y]
        return all(soc_lt[k] for k in range(len(self.tables)) if sxy[k] & cmask == cmask)

    def almost_for(self, cmask: int, x: int, y: int) -> bool:
        sxy, syx, soc_lt = self.strict[x, y], self.strict[y, x], self.social[x, y]
        rest = self.full & ~cmask
        return all(
            soc_lt[k]
            for k in range(len(self.tables))
            if sxy[k] & cmask == cmask and syx[k] & rest == rest
        )

    def almost_at(self, cmask: int, x: int, y: int, t: tuple[WeakOrder, ...]) -> bool:
        k = self.soc.table_id(t)
        rest = self.full & ~cmask
        return (
            self.strict[x, y][k] & cmask == cmask
            and self.strict[y, x][k] & rest == rest
            and self.social[x, y][k]
        )


def _oracle_for(s: Swf) -> _TableOracle:
    if s._oracle is None:
        s._oracle = _TableOracle(s)
    return s._oracle


def decisiveness_oracle(s: Swf, q: DecisivenessQuery) -> bool:
    """Evaluate a decisiveness clause by quantifying over all of ``W^V``."""
    o = _oracle_for(s)
    cmask = o.coalition_mask(q.coalition_index)
    pairs = [q.pair] if q.pair is not None else list(itertools.permutations(o.soc.alts, 2))
    if q.mode == "decisive":
        return all(o.decisive_for(cmask, x, y) for x, y in pairs)
    if q.mode == "almost_decisive":
        return all(o.almost_for(cmask, x, y) for x, y in pairs)
    x, y = q.pair
    return o.almost_at(cmask, x, y, o.soc.tabulate(q.at_profile))


# -- Kirman-Sondermann extraction -----------------------------------------------


def ks_extract(
    s: Swf,
    probes: Iterable[int] | None = None,
    probe_pairs: Iterable[tuple[int, int]] | None = None,
    *,
    verify: bool = True,
) -> Ultrafilter:
    """The ultrafilter of (almost) decisive coalitions of ``s``.

    Refuses with :class:`AxiomViolation` when unanimity or independence fails
    on the probes. On finite societies every coalition is checked against the
    brute-force oracle.
    """
    soc = s.society
    reports = [check_unanimity(s, probes), check_independence(s, probe_pairs)]
    if not all(r.ok for r in reports):
        raise AxiomViolation("not a social welfare function on the probes", reports)
    test = almost_decisive_membership(s)
    u = Ultrafilter(
        soc.algebra,
        test.member,
        "derived_from_swf",
        meta={"swf": s.provenance, "pair": [test.a, test.b]},
    )
    if isinstance(soc, FiniteSociety):
        if verify:
            for subset, i in soc.algebra.subsets():
                fast = test.member(i)
                almost = decisiveness_oracle(s, DecisivenessQuery(i, "almost_decisive"))
                decisive = decisiveness_oracle(s, DecisivenessQuery(i, "decisive"))
                if not fast == almost == decisive:
                    raise SwfError(
                        f"coalition {sorted(subset)}: test={fast} almost={almost} decisive={decisive}"
                    )
        points = [d for d in soc.voters() if test.member(soc.algebra.atom_index(d))]
        if len(points) == 1:
            u.point = points[0]
    return u


def find_dictator(s: Swf) -> int:
    soc = _finite(s.society)
    u = ks_extract(s)
    found = [d for d in soc.voters() if u.member(soc.algebra.atom_index(d))]
    if len(found) != 1:
        raise SwfError(f"axiom checks were incomplete: {len(found)} dictator candidates")
    d = found[0]
    k = soc.voter_position(d)
    for t, out in zip(soc.all_profiles(), s.table_outputs()):
        for x, y in itertools.permutations(soc.alts, 2):
            if t[k].lt(x, y) and not out.lt(x, y):
                raise SwfError(f"voter {d} overruled at {[r.code for r in t]}")
    return d


def is_dictator(s: Swf, d: int) -> bool:
    """Brute force: ``d``'s strict preferences are always followed."""
    soc = _finite(s.society)
    k = soc.voter_position(d)
    return all(
        out.lt(x, y) or not t[k].lt(x, y)
        for t, out in zip(soc.all_profiles(), s.table_outputs())
        for x, y in itertools.permutations(soc.alts, 2)
    )


# -- non-dictatoriality --------------------------------------------------------


def _pattern_pair(soc: Society) -> tuple[int, int, WeakOrder, WeakOrder]:
    x, y = soc.alts[0], soc.alts[1]
    return x, y, soc.order(f"{x} < {y} < *"), soc.order(f"{y} < {x} < *")


def nondictatorship_witnesses(s: Swf, voters: Iterable[int], rep: Report | None = None) -> Report:
    """For each voter, a profile where that voter is overruled."""
    soc = s.society
    rep = rep or Report("non_dictatoriality")
    c = rep.clause("non_dictatorial")
    x, y, xy, yx = _pattern_pair(soc)
    found = rep.notes.setdefault("non_dictatorial_witnesses", [])
    for v in voters:
        j = soc.qp_index([xy, yx], [soc.algebra.atom_index(v)])
        c.checked += 1
        out = s.sigma(j)
        if soc.eval(j, v).lt(x, y) and out.le(y, x):
            found.append({"voter": v, "pair": [x, y], "social": str(out)})
        else:
            c.fail({"voter": v, "social": str(out)})
    return rep


def k_nondictatorship_witnesses(
    s: Swf, tuples: Iterable[Sequence[int]], rep: Report | None = None
) -> Report:
    """For each finite tuple of voters, a profile overruling all of them at once."""
    soc = s.society
    rep = rep or Report("non_dictatoriality")
    c = rep.clause("k_non_dictatorial")
    x, y, xy, yx = _pattern_pair(soc)
    found = rep.notes.setdefault("k_non_dictatorial_witnesses", [])
    for tup in tuples:
        j = soc.qp_index([xy, yx], [soc.algebra.finite_index(tup)])
        c.checked += 1
        out = s.sigma(j)
        if all(soc.eval(j, v).lt(x, y) for v in tup) and out.lt(y, x):
            found.append({"voters": list(tup), "pair": [x, y], "social": str(out)})
        else:
            c.fail({"voters": list(tup), "social": str(out)})
    return rep


@dataclass(frozen=True)
class CofiniteCheck:
    """Dissenting finite cells get orders not ranking ``x`` over ``y``;
    everybody else gets ``majority``, which does."""

    pair: tuple[int, int]
    dissenters: tuple[tuple[int, ...], ...]
    dissent_orders: tuple[WeakOrder, ...]
    majority: WeakOrder


def random_cofinite_checks(soc: Society, count: int, seed: int = 0, bound: int = 30) -> list[CofiniteCheck]:
    rng = random.Random(seed)
    out = [
        CofiniteCheck(
            (soc.alts[0], soc.alts[1]),
            (tuple(range(10)),),
            (soc.order(f"{soc.alts[1]} < {soc.alts[0]} < *"),),
            soc.order(f"{soc.alts[0]} < {soc.alts[1]} < *"),
        )
    ]
    while len(out) < count:
        x, y = rng.sample(soc.alts, 2)
        cells = tuple(tuple(sorted(rng.sample(range(bound), rng.randint(1, 6)))) for _ in range(rng.randint(1, 3)))
        against = [r for r in soc.W if not r.lt(x, y)]
        orders = tuple(rng.sample(against, len(cells)))
        majority = rng.choice([r for r in soc.W if r.lt(x, y)])
        out.append(CofiniteCheck((x, y), cells, orders, majority))
    return out


def cofinite_coalition_checks(s: Swf, checks: Iterable[CofiniteCheck], rep: Report | None = None) -> Report:
    """Profiles where cofinitely many voters strictly prefer ``x`` must rank ``x`` first."""
    soc = s.society
    alg = soc.algebra
    rep = rep or Report("non_dictatoriality")
    c = rep.clause("cofinite_coalitions")
    stage = _stage_of(s)
    for chk in checks:
        x, y = chk.pair
        cells = [alg.finite_index(d) for d in chk.dissenters]
        j = soc.qp_index(list(chk.dissent_orders) + [chk.majority], cells)
        nf = alg.normal_form(soc.mu_strict(j, x, y), stage)
        if not isinstance(nf, Cofinite):
            c.undecided += 1
            continue
        c.checked += 1
        out = s.sigma(j)
        if not out.lt(x, y):
            c.fail({"pair": [x, y], "dissenters": sorted(nf.missing), "social": str(out)})
    return rep


def nondictatoriality_suite(
    s: Swf,
    k: int = 3,
    bound: int = 50,
    *,
    tuples: Iterable[Sequence[int]] | None = None,
    cofinite_checks: Iterable[CofiniteCheck] | None = None,
    seed: int = 0,
) -> Report:
    """Witnesses for plain, ``k``- and cofinite-coalition non-dictatoriality."""
    soc = s.society
    if soc.finite:
        raise SwfError("non-dictatoriality needs an infinite society")
    test = almost_decisive_membership(s)
    principal = [v for v in range(bound) if test.member(soc.algebra.atom_index(v))]
    if principal:
        raise SwfError(f"extracted ultrafilter is principal at {principal[0]}")
    rng = random.Random(seed)
    if tuples is None:
        tuples = [tuple(sorted(rng.sample(range(bound), 1 + i % k))) for i in range(20)]
    if cofinite_checks is None:
        cofinite_checks = random_cofinite_checks(soc, 100, seed)
    rep = Report("non_dictatoriality")
    rep.notes["k"] = k
    nondictatorship_witnesses(s, range(bound), rep)
    k_nondictatorship_witnesses(s, [t for t in tuples if len(t) <= k], rep)
    cofinite_coalition_checks(s, cofinite_checks, rep)
    return rep

"""Exhaustive search for Arrovian social welfare functions on tiny societies.

By independence, a social welfare function is determined by one aggregator
per pair of alternatives, mapping the voters' states on that pair (``0``: the
smaller alternative strictly first, ``1``: tie, ``2``: the larger strictly
first) to a social state. Unanimity fixes the two all-strict cells of every
aggregator; the remaining cells are searched by backtracking, pruning a
partial assignment as soon as some profile's three social states are not the
pattern of a weak order.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .order import WeakOrder, enumerate_weak_orders
from .society import finite_society
from .swf import ks_extract, table_swf

LOG = logging.getLogger(__name__)

DOMAINS = ("linear", "weak")


def pair_state(r: WeakOrder, x: int, y: int) -> int:
    if r.lt(x, y):
        return 0
    if r.lt(y, x):
        return 2
    return 1


@dataclass(frozen=True)
class PairAggregator:
    pair: tuple[int, int]
    table: dict[tuple[int, ...], int]
    domain: str

    def __call__(self, key: tuple[int, ...]) -> int:
        return self.table[key]


@dataclass
class Survivor:
    aggregators: tuple[PairAggregator, PairAggregator, PairAggregator]
    code: int
    dictators: list[int]

    @property
    def dictatorial(self) -> bool:
        return bool(self.dictators)

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "dictators": self.dictators,
            "aggregators": [
                {
                    "pair": list(a.pair),
                    "cells": [[list(k), v] for k, v in sorted(a.table.items())],
                }
                for a in self.aggregators
            ],
        }


@dataclass
class SearchResult:
    voters: int
    alts: tuple[int, ...]
    domain: str
    survivors: list[Survivor]
    nodes: int
    prunes: list[tuple[tuple[int, ...], int]] = field(repr=False)

    @property
    def non_dictatorial(self) -> list[Survivor]:
        return [s for s in self.survivors if not s.dictatorial]

    def summary(self) -> dict:
        return {
            "voters": self.voters,
            "alts": list(self.alts),
            "domain": self.domain,
            "survivors": len(self.survivors),
            "non_dictatorial": len(self.non_dictatorial),
            "nodes": self.nodes,
            "prunes": len(self.prunes),
        }


class ArrowProblem:
    """Variables, constraints and search order for one (|V|, X, domain)."""

    def __init__(self, voters: int, alts: Sequence[int] = (0, 1, 2), domain: str = "linear") -> None:
        alts = tuple(sorted(alts))
        if len(alts) != 3:
            raise ValueError("arrowcheck needs exactly 3 alternatives")
        if domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")
        if not 2 <= voters <= (3 if domain == "linear" else 2):
            raise ValueError("arrowcheck supports 2 voters (weak) or 2-3 voters (linear)")
        self.voters = voters
        self.alts = alts
        self.domain = domain
        self.W = enumerate_weak_orders(alts)
        self.pairs = list(itertools.combinations(alts, 2))
        self.orders = [r for r in self.W if len(r.levels()) == len(alts)] if domain == "linear" else list(self.W)
        states = (0, 2) if domain == "linear" else (0, 1, 2)
        self.triples = {tuple(pair_state(r, x, y) for x, y in self.pairs): r for r in self.W}

        self.vars: list[tuple[int, tuple[int, ...]]] = []
        self.var_id: dict[tuple[int, tuple[int, ...]], int] = {}
        for p in range(len(self.pairs)):
            for key in itertools.product(states, repeat=voters):
                self.var_id[p, key] = len(self.vars)
                self.vars.append((p, key))
        self.fixed = {}
        for p in range(len(self.pairs)):
            self.fixed[self.var_id[p, (0,) * voters]] = 0
            self.fixed[self.var_id[p, (2,) * voters]] = 2

        self.profiles = list(itertools.product(self.orders, repeat=voters))
        self.profile_vars = [
            tuple(self.var_id[p, tuple(pair_state(r, x, y) for r in prof)] for p, (x, y) in enumerate(self.pairs))
            for prof in self.profiles
        ]
        self.order = self._search_order()
        pos = {v: k for k, v in enumerate(self.order)}
        # profiles that become fully assigned at each depth of the search
        self.completes: list[list[int]] = [[] for _ in self.order]
        self.fixed_only: list[int] = []
        for k, vs in enumerate(self.profile_vars):
            free = [pos[v] for v in vs if v not in self.fixed]
            if free:
                self.completes[max(free)].append(k)
            else:
                self.fixed_only.append(k)

    def _search_order(self) -> list[int]:
        free = [v for v in range(len(self.vars)) if v not in self.fixed]
        assigned = set(self.fixed)
        order = []
        while free:
            def score(v: int) -> tuple[int, int, int]:
                done = sum(1 for vs in self.profile_vars if v in vs and all(u in assigned or u == v for u in vs))
                touch = sum(1 for vs in self.profile_vars if v in vs)
                return (done, touch, -v)

            best = max(free, key=score)
            order.append(best)
            assigned.add(best)
            free.remove(best)
        return order

    def coherent(self, values: dict[int, int], k: int) -> bool:
        return tuple(values[v] for v in self.profile_vars[k]) in self.triples

    def aggregators(self, values: dict[int, int]) -> tuple[PairAggregator, ...]:
        tables: list[dict] = [{} for _ in self.pairs]
        for v, (p, key) in enumerate(self.vars):
            tables[p][key] = values[v]
        return tuple(PairAggregator(self.pairs[p], tables[p], self.domain) for p in range(len(self.pairs)))

    def code(self, values: dict[int, int]) -> int:
        out = 0
        for v in range(len(self.vars)):
            out = out * 3 + values[v]
        return out

    def social(self, values: dict[int, int], k: int) -> WeakOrder:
        return self.triples[tuple(values[v] for v in self.profile_vars[k])]

    def dictators(self, values: dict[int, int]) -> list[int]:
        """Voters whose strict preferences are followed on every domain profile."""
        out = []
        for d in range(self.voters):
            if all(
                self.social(values, k).lt(x, y) or not prof[d].lt(x, y)
                for k, prof in enumerate(self.profiles)
                for x, y in itertools.permutations(self.alts, 2)
            ):
                out.append(d)
        return out

    def first_violation(self, values: dict[int, int]) -> int | None:
        """Index of the first profile whose social states are incoherent."""
        for k in range(len(self.profiles)):
            if not self.coherent(values, k):
                return k
        return None


def _search(problem: ArrowProblem, prefix: tuple[int, ...] = ()) -> tuple[list[dict], int, list]:
    values = dict(problem.fixed)
    survivors: list[dict] = []
    prunes: list[tuple[tuple[int, ...], int]] = []
    nodes = 0
    for k in problem.fixed_only:
        if not problem.coherent(values, k):
            prunes.append(((), k))
            return survivors, nodes, prunes
    order, completes = problem.order, problem.completes
    depth_max = len(order)
    assignment: list[int] = []

    def descend(depth: int) -> None:
        nonlocal nodes
        if depth == depth_max:
            survivors.append(dict(values))
            return
        var = order[depth]
        choices = (prefix[depth],) if depth < len(prefix) else (0, 1, 2)
        for val in choices:
            nodes += 1
            values[var] = val
            assignment.append(val)
            bad = next((k for k in completes[depth] if not problem.coherent(values, k)), None)
            if bad is None:
                descend(depth + 1)
            else:
                prunes.append((tuple(assignment), bad))
            assignment.pop()
            del values[var]

    descend(0)
    return survivors, nodes, prunes


def _search_job(args: tuple[int, tuple[int, ...], str, tuple[int, ...]]):
    voters, alts, domain, prefix = args
    return _search(ArrowProblem(voters, alts, domain), prefix)


def enumerate_arrovian_swfs(
    voters: int = 2, alts: Sequence[int] = (0, 1, 2), domain: str = "linear", jobs: int = 1
) -> SearchResult:
    """All unanimous, independent table SWFs on the domain, with dictatorship verdicts."""
    problem = ArrowProblem(voters, alts, domain)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_search_job, [(voters, problem.alts, domain, (v,)) for v in (0, 1, 2)]))
    else:
        parts = [_search(problem)]
    found = [s for part in parts for s in part[0]]
    nodes = sum(part[1] for part in parts)
    prunes = [p for part in parts for p in part[2]]
    survivors = [
        Survivor(problem.aggregators(vals), problem.code(vals), problem.dictators(vals)) for vals in found
    ]
    survivors.sort(key=lambda s: s.code)
    LOG.info("domain=%s survivors=%d nodes=%d prunes=%d", domain, len(survivors), nodes, len(prunes))
    return SearchResult(voters, problem.alts, domain, survivors, nodes, prunes)


def recheck_prune(problem: ArrowProblem, assignment: Sequence[int], profile: int) -> bool:
    """True if the logged profile really is incoherent under the logged partial assignment."""
    values = dict(problem.fixed)
    for var, val in zip(problem.order, assignment):
        values[var] = val
    if any(v not in values for v in problem.profile_vars[profile]):
        return False
    return not problem.coherent(values, profile)


def naive_recount(voters: int = 2, alts: Sequence[int] = (0, 1, 2), domain: str = "linear") -> set[int]:
    """Independent recount: assign a social order to each domain profile in turn,
    checking unanimity and pairwise consistency against a memo of earlier
    choices. Returns the aggregator codes of all complete assignments."""
    problem = ArrowProblem(voters, alts, domain)
    W, pairs, profiles = problem.W, problem.pairs, problem.profiles
    keys = [
        [(p, tuple(pair_state(r, x, y) for r in prof)) for p, (x, y) in enumerate(pairs)] for prof in profiles
    ]
    allowed = []
    for prof in profiles:
        ok = []
        for r in W:
            if all(r.lt(x, y) for x, y in itertools.permutations(alts, 2) if all(v.lt(x, y) for v in prof)):
                ok.append(r)
        allowed.append(ok)
    memo: dict[tuple[int, tuple[int, ...]], int] = {}
    found: set[int] = set()

    def go(k: int) -> None:
        if k == len(profiles):
            table = {problem.var_id[key]: val for key, val in memo.items()}
            if len(table) == len(problem.vars):
                found.add(problem.code(table))
            return
        for r in allowed[k]:
            added = []
            ok = True
            for p, key in keys[k]:
                x, y = pairs[p]
                st = pair_state(r, x, y)
                if (p, key) in memo:
                    if memo[p, key] != st:
                        ok = False
                        break
                else:
                    memo[p, key] = st
                    added.append((p, key))
            if ok:
                go(k + 1)
            for key in added:
                del memo[key]

    go(0)
    return found


def survivor_table_rule(problem: ArrowProblem, survivor: Survivor):
    """The survivor as a rule on all weak-order profiles.

    Linear-domain survivors are lifted by breaking every voter's ties in
    favour of the smaller alternative, which keeps unanimity, independence
    and the dictator.
    """
    lift = problem.domain == "linear"

    def rule(orders: tuple[WeakOrder, ...]) -> WeakOrder:
        states = []
        for agg in survivor.aggregators:
            x, y = agg.pair
            key = tuple(pair_state(r, x, y) for r in orders)
            if lift:
                key = tuple(0 if s == 1 else s for s in key)
            states.append(agg(key))
        return problem.triples[tuple(states)]

    return rule


def verify_against_ks(survivor: Survivor, problem: ArrowProblem) -> dict:
    """Run the ultrafilter extraction on the survivor and compare dictators."""
    soc = finite_society(problem.voters, problem.alts)
    s = table_swf(soc, survivor_table_rule(problem, survivor))
    u = ks_extract(s)
    extracted = u.point
    brute = survivor.dictators[0] if len(survivor.dictators) == 1 else None
    return {
        "code": survivor.code,
        "brute_force_dictator": brute,
        "extracted_dictator": extracted,
        "match": brute is not None and brute == extracted,
    }


def majority_with_ties(problem: ArrowProblem) -> dict[int, int]:
    """Pairwise majority that outputs a tie whenever the strict votes balance."""
    values = {}
    for v, (_, key) in enumerate(problem.vars):
        lo, hi = key.count(0), key.count(2)
        values[v] = 0 if lo > hi else 2 if hi > lo else 1
    return values


def candidate_violation(problem: ArrowProblem, values: dict[int, int]) -> dict | None:
    """The first profile at which a complete candidate is incoherent, as JSON."""
    k = problem.first_violation(values)
    if k is None:
        return None
    return {
        "profile": [str(r) for r in problem.profiles[k]],
        "pair_states": [values[v] for v in problem.profile_vars[k]],
        "pairs": [list(p) for p in problem.pairs],
    }

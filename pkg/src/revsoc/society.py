"""Countable societies built on the canonical quasi-partition profile family.

A profile index codes a pair ``(p, s)``: ``p`` lists every weak order of ``W``
exactly once (by code) and ``s`` is a list of algebra indexes, the *cells*.
A voter lying in exactly one cell ``s[j]`` gets ``p[j]``; every other voter
gets the default order ``p[len(s)]``. So ``1 <= len(s) <= len(W) - 1``.
Numbers that do not code a valid pair are the Default profile, which gives
every voter the first order of ``W``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .coding import decode_seq, encode_seq
from .order import OrderPattern, WeakOrder, enumerate_weak_orders, make_order
from .setalg import Algebra, FormationBuilder, PowersetAlgebra, SetComparison


@dataclass(frozen=True)
class QP:
    perm: tuple[WeakOrder, ...]
    cells: tuple[int, ...]


@dataclass(frozen=True)
class Table:
    orders: tuple[WeakOrder, ...]


@dataclass(frozen=True)
class Default:
    order: WeakOrder


ProfileSource = Union[QP, Table, Default]


@dataclass(frozen=True)
class Profile:
    society: Society = field(compare=False, repr=False)
    source: ProfileSource

    def eval(self, v: int) -> WeakOrder:
        src = self.source
        if isinstance(src, Default):
            return src.order
        if isinstance(src, Table):
            return src.orders[self.society.voter_position(v)]
        alg = self.society.algebra
        hits = [j for j, c in enumerate(src.cells) if alg.contains(c, v)]
        if len(hits) == 1:
            return src.perm[hits[0]]
        return src.perm[len(src.cells)]

    __call__ = eval


@dataclass(frozen=True)
class Agreement:
    agree: bool
    exact: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.agree


class Society:
    """``(V, X, A, F)`` with ``F`` the canonical quasi-partition family over ``A``."""

    def __init__(self, algebra: Algebra, alts: Iterable[int]) -> None:
        alts = tuple(sorted(set(alts)))
        if len(alts) < 3:
            raise ValueError("a society needs at least 3 alternatives")
        if not algebra.atomic:
            raise ValueError("a society needs an atomic algebra")
        self.algebra = algebra
        self.alts = alts
        self.W = enumerate_weak_orders(alts)
        self._by_code = {r.code: r for r in self.W}
        self.default_order = self.W[0]
        self._mu = lru_cache(maxsize=1 << 16)(self._mu_uncached)
        self._decode = lru_cache(maxsize=1 << 14)(self._decode_uncached)

    # voters

    @property
    def universe(self) -> frozenset[int] | None:
        return self.algebra.universe

    @property
    def finite(self) -> bool:
        return self.algebra.finite

    def voters(self, bound: int | None = None) -> list[int]:
        if self.universe is not None:
            return sorted(self.universe)
        if bound is None:
            raise ValueError("infinite society: a bound is required")
        return list(range(bound))

    def voter_position(self, v: int) -> int:
        return self.voters().index(v)

    # orders

    def order(self, spec: WeakOrder | str | int) -> WeakOrder:
        if isinstance(spec, WeakOrder):
            return spec
        if isinstance(spec, str):
            return make_order(OrderPattern.parse(spec), self.alts)
        return self._by_code[spec]

    # the embedding e and its inverse

    def e(self, perm: Sequence[WeakOrder | int], cells: Sequence[int]) -> int:
        """Profile index of ``(perm, cells)``; raises if the pair is not valid."""
        codes = [self.order(r).code for r in perm]
        if sorted(codes) != sorted(self._by_code) or len(set(codes)) != len(codes):
            raise ValueError("perm is not a permutation of W")
        if not 1 <= len(cells) <= len(self.W) - 1:
            raise ValueError(f"need 1 <= len(cells) <= {len(self.W) - 1}")
        return encode_seq([encode_seq(codes), encode_seq(list(cells))])

    def qp_index(self, leading: Sequence[WeakOrder | str], cells: Sequence[int]) -> int:
        """Profile index giving ``leading[j]`` on cell ``j`` and ``leading[-1]``
        as the default; the rest of the permutation is ``W`` in code order."""
        head = [self.order(r) for r in leading]
        if len(head) != len(cells) + 1:
            raise ValueError("need one order per cell plus a default order")
        if len({r.code for r in head}) != len(head):
            raise ValueError("leading orders must be distinct")
        rest = [r for r in self.W if r not in head]
        return self.e(head + rest, cells)

    def decode(self, n: int) -> QP | None:
        return self._decode(n)

    def _decode_uncached(self, n: int) -> QP | None:
        outer = decode_seq(n)
        if outer is None or len(outer) != 2:
            return None
        codes, cells = decode_seq(outer[0]), decode_seq(outer[1])
        if codes is None or cells is None:
            return None
        if len(codes) != len(self.W) or set(codes) != set(self._by_code):
            return None
        if not 1 <= len(cells) <= len(self.W) - 1:
            return None
        return QP(tuple(self._by_code[c] for c in codes), tuple(cells))

    def profile(self, n: int) -> Profile:
        qp = self.decode(n)
        return Profile(self, Default(self.default_order) if qp is None else qp)

    def eval(self, n: int, v: int) -> WeakOrder:
        return self.profile(n).eval(v)

    # measurability

    def mu(self, n: int, x: int, y: int) -> int:
        """Index of ``{v : x <=_{f_n(v)} y}``."""
        return self._mu(n, x, y)

    def _mu_uncached(self, n: int, x: int, y: int) -> int:
        alg = self.algebra
        qp = self.decode(n)
        if qp is None:
            return alg.full_index() if self.default_order.le(x, y) else alg.empty_index()
        k = len(qp.cells)
        included = [qp.perm[j].le(x, y) for j in range(k + 1)]
        if all(included):
            return alg.full_index()
        if not any(included):
            return alg.empty_index()
        b = FormationBuilder(alg)
        cells = [b.add(c) for c in qp.cells]
        regions = []
        for j in range(k):
            others = [cells[i] for i in range(k) if i != j]
            if not others:
                regions.append(cells[j])
                continue
            covered = others[0]
            for o in others[1:]:
                covered = b.union(covered, o)
            regions.append(b.inter(cells[j], b.compl(covered)))
        hit = regions[0]
        for r in regions[1:]:
            hit = b.union(hit, r)
        regions.append(b.compl(hit))
        chosen = [r for r, inc in zip(regions, included) if inc]
        out = chosen[0]
        for r in chosen[1:]:
            out = b.union(out, r)
        return b.finish(out)

    def mu_strict(self, n: int, x: int, y: int) -> int:
        """Index of ``{v : x <_{f_n(v)} y}``."""
        return self.algebra.complement_index(self.mu(n, y, x))

    def mu_indiff(self, n: int, x: int, y: int) -> int:
        """Index of ``{v : x ~_{f_n(v)} y}``."""
        return self.algebra.intersect_index(self.mu(n, x, y), self.mu(n, y, x))

    def profiles_agree_on(
        self, n: int, m: int, pairset: Iterable[int], bound: int = 1000, stage: int | None = None
    ) -> Agreement:
        ys = sorted(set(pairset))
        exact = True
        for x, y in itertools.permutations(ys, 2):
            cmp = self.algebra.compare(self.mu(n, x, y), self.mu(m, x, y), bound, stage)
            if cmp is SetComparison.EQUAL_UP_TO_BOUND:
                exact = False
            elif cmp is SetComparison.UNEQUAL:
                witness = self._disagreement(n, m, x, y, bound)
                return Agreement(False, True, witness)
        return Agreement(True, exact)

    def _disagreement(self, n: int, m: int, x: int, y: int, bound: int) -> dict | None:
        voters = self.voters() if self.finite else range(bound)
        for v in voters:
            if self.eval(n, v).le(x, y) != self.eval(m, v).le(x, y):
                return {"voter": v, "pair": [x, y]}
        return {"pair": [x, y], "voter": None}

    # serialisation

    def to_json(self) -> dict:
        return {
            "V": None if self.universe is None else sorted(self.universe),
            "X": list(self.alts),
            "W": [r.code for r in self.W],
            "default_order": self.default_order.code,
            "algebra": self.algebra.to_json(),
        }


class FiniteSociety(Society):
    """A finite society over the powerset algebra, with the full table ``W^V``."""

    algebra: PowersetAlgebra

    def __init__(self, algebra: PowersetAlgebra, alts: Iterable[int]) -> None:
        super().__init__(algebra, alts)
        self._voters = sorted(algebra.voters)
        self._pos = {v: k for k, v in enumerate(self._voters)}
        self._w_index = {r: k for k, r in enumerate(self.W)}
        self._bridge: dict[tuple[WeakOrder, ...], int] = {}

    def voters(self, bound: int | None = None) -> list[int]:
        return self._voters

    def voter_position(self, v: int) -> int:
        return self._pos[v]

    def all_profiles(self) -> list[tuple[WeakOrder, ...]]:
        """Every function ``V -> W``; entry ``k`` is the order of the ``k``-th voter."""
        return list(itertools.product(self.W, repeat=len(self._voters)))

    def table_profile(self, orders: Sequence[WeakOrder]) -> Profile:
        return Profile(self, Table(tuple(orders)))

    def table_id(self, orders: Sequence[WeakOrder]) -> int:
        """Position of a table profile in :meth:`all_profiles`."""
        out = 0
        for r in orders:
            out = out * len(self.W) + self._w_index[r]
        return out

    def bridge(self, orders: Sequence[WeakOrder]) -> int:
        """A canonical-family index realising the table profile ``orders``."""
        key = tuple(orders)
        if key in self._bridge:
            return self._bridge[key]
        groups: dict[WeakOrder, list[int]] = {}
        for v, r in zip(self._voters, key):
            groups.setdefault(r, []).append(v)
        leading = list(groups)
        cells = [self.algebra.canonical_index(groups[r]) for r in leading]
        spare = next(r for r in self.W if r not in groups)
        n = self.qp_index(leading + [spare], cells)
        self._bridge[key] = n
        return n

    def tabulate(self, n: int) -> tuple[WeakOrder, ...]:
        prof = self.profile(n)
        return tuple(prof.eval(v) for v in self._voters)


def canonical_society(algebra: Algebra, alts: Iterable[int] = (0, 1, 2)) -> Society:
    if isinstance(algebra, PowersetAlgebra):
        return FiniteSociety(algebra, alts)
    return Society(algebra, alts)


def finite_society(voters: int | Iterable[int], alts: Iterable[int] = (0, 1, 2)) -> FiniteSociety:
    vs = list(range(voters)) if isinstance(voters, int) else sorted(set(voters))
    alts = tuple(alts)
    if not 1 <= len(vs) <= 4:
        raise ValueError("finite society needs 1 <= |V| <= 4")
    if len(alts) != 3:
        raise ValueError("finite society needs |X| = 3")
    return FiniteSociety(PowersetAlgebra(vs), alts)


def derived_measurability(soc: Society):
    """The strict and indifference measurability maps of ``soc``."""
    return soc.mu_strict, soc.mu_indiff

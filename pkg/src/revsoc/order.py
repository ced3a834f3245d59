"""Weak orders (total preorders) on a finite set of alternatives.

``x <= y`` in a weak order means ``x`` is weakly preferred to ``y``; the
pattern ``0 < 1 ~ 2`` puts ``0`` strictly first and ties ``1`` with ``2``.
A relation is coded as the sum of ``2**pair(x, y)`` over its member pairs.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .coding import pair, unpair

MAX_ALTS = 5
WILDCARD = "*"


class OrderError(ValueError):
    pass


class Relation(enum.Enum):
    STRICT_LESS = "strict_less"
    EQUIVALENT = "equivalent"
    STRICT_GREATER = "strict_greater"


def _is_weak_order(alts: Sequence[int], rel: frozenset[tuple[int, int]]) -> bool:
    for x in alts:
        for y in alts:
            if (x, y) not in rel and (y, x) not in rel:
                return False
    for x, y in rel:
        for z in alts:
            if (y, z) in rel and (x, z) not in rel:
                return False
    return True


@dataclass(frozen=True)
class WeakOrder:
    alts: tuple[int, ...]
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alts", tuple(sorted(set(self.alts))))
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        if not self.alts:
            raise OrderError("weak order needs a nonempty alternative set")
        universe = set(self.alts)
        if any(x not in universe or y not in universe for x, y in self.pairs):
            raise OrderError("relation mentions alternatives outside alts")
        if not _is_weak_order(self.alts, self.pairs):
            raise OrderError("relation is not transitive and strongly connected")

    @cached_property
    def code(self) -> int:
        return sum(1 << pair(x, y) for x, y in self.pairs)

    @classmethod
    def from_code(cls, code: int, alts: Iterable[int]) -> WeakOrder:
        pairs = []
        bit = 0
        while code:
            if code & 1:
                xy = unpair(bit)
                if xy is None:
                    raise OrderError(f"bit {bit} is not a pair code")
                pairs.append(xy)
            code >>= 1
            bit += 1
        return cls(tuple(alts), frozenset(pairs))

    def le(self, x: int, y: int) -> bool:
        return (x, y) in self.pairs

    def lt(self, x: int, y: int) -> bool:
        return (x, y) in self.pairs and (y, x) not in self.pairs

    def sim(self, x: int, y: int) -> bool:
        return (x, y) in self.pairs and (y, x) in self.pairs

    def relation(self, x: int, y: int) -> Relation:
        return order_relation(self, x, y)

    def levels(self) -> list[tuple[int, ...]]:
        """Indifference classes, most preferred first."""
        above = {x: sum(1 for y in self.alts if self.lt(y, x)) for x in self.alts}
        groups: dict[int, list[int]] = {}
        for x in self.alts:
            groups.setdefault(above[x], []).append(x)
        return [tuple(groups[k]) for k in sorted(groups)]

    def to_json(self) -> dict:
        return {
            "alts": list(self.alts),
            "pairs": [list(p) for p in sorted(self.pairs)],
            "code": self.code,
        }

    def __str__(self) -> str:
        return " < ".join(" ~ ".join(map(str, g)) for g in self.levels())


@dataclass(frozen=True)
class OrderPattern:
    """Ordered groups of alternatives, best first.

    ``wildcard_level`` is the group that absorbs every alternative the pattern
    does not mention; that group may be otherwise empty.
    """

    levels: tuple[tuple[int, ...], ...]
    wildcard_level: int | None = None

    @classmethod
    def parse(cls, text: str) -> OrderPattern:
        """Parse ``"0 < 1 < 2 ~ *"`` style notation."""
        levels: list[tuple[int, ...]] = []
        wildcard = None
        for k, chunk in enumerate(text.split("<")):
            names = [t.strip() for t in chunk.split("~")]
            if any(not t for t in names):
                raise OrderError(f"empty group in pattern {text!r}")
            group = []
            for t in names:
                if t in (WILDCARD, "∗"):
                    if wildcard is not None:
                        raise OrderError("pattern has more than one wildcard")
                    wildcard = k
                else:
                    group.append(int(t))
            levels.append(tuple(group))
        return cls(tuple(levels), wildcard)


def make_order(pattern: OrderPattern | str, alts: Iterable[int]) -> WeakOrder:
    if isinstance(pattern, str):
        pattern = OrderPattern.parse(pattern)
    alts = tuple(sorted(set(alts)))
    rank: dict[int, int] = {}
    for k, group in enumerate(pattern.levels):
        for x in group:
            if x in rank:
                raise OrderError(f"alternative {x} appears twice in pattern")
            if x not in alts:
                raise OrderError(f"alternative {x} is not in {alts}")
            rank[x] = k
    rest = [x for x in alts if x not in rank]
    if rest:
        if pattern.wildcard_level is None:
            raise OrderError(f"pattern does not cover alternatives {rest}")
        for x in rest:
            rank[x] = pattern.wildcard_level
    for k, group in enumerate(pattern.levels):
        if not group and k != pattern.wildcard_level:
            raise OrderError("pattern has an empty group")
    pairs = frozenset((x, y) for x in alts for y in alts if rank[x] <= rank[y])
    return WeakOrder(alts, pairs)


def restrict(order: WeakOrder, subset: Iterable[int]) -> WeakOrder:
    subset = frozenset(subset)
    if not subset:
        raise OrderError("cannot restrict to the empty set")
    if not subset <= set(order.alts):
        raise OrderError(f"{sorted(subset)} is not a subset of {order.alts}")
    return WeakOrder(tuple(subset), frozenset(p for p in order.pairs if p[0] in subset and p[1] in subset))


def order_relation(order: WeakOrder, x: int, y: int) -> Relation:
    if x not in order.alts or y not in order.alts:
        raise OrderError(f"({x}, {y}) not in {order.alts}")
    forward, backward = order.le(x, y), order.le(y, x)
    if forward and backward:
        return Relation.EQUIVALENT
    return Relation.STRICT_LESS if forward else Relation.STRICT_GREATER


def _filter_all_relations(alts: tuple[int, ...]) -> list[WeakOrder]:
    cells = [(x, y) for x in alts for y in alts]
    bit = {p: 1 << i for i, p in enumerate(cells)}
    connected = [bit[x, y] | bit[y, x] for x, y in itertools.combinations_with_replacement(alts, 2)]
    transitive = [
        (bit[x, y] | bit[y, z], bit[x, z]) for x, y, z in itertools.product(alts, repeat=3)
    ]
    found = []
    for mask in range(1 << len(cells)):
        if not all(mask & c for c in connected):
            continue
        if all((mask & prem) != prem or mask & concl for prem, concl in transitive):
            found.append(frozenset(p for p in cells if mask & bit[p]))
    return [WeakOrder(alts, rel) for rel in found]


def _ordered_partitions(items: tuple[int, ...]):
    if not items:
        yield []
        return
    for r in range(1, len(items) + 1):
        for first in itertools.combinations(items, r):
            rest = tuple(x for x in items if x not in first)
            for tail in _ordered_partitions(rest):
                yield [first, *tail]


@lru_cache(maxsize=None)
def _enumerate(alts: tuple[int, ...]) -> tuple[WeakOrder, ...]:
    if len(alts) <= 4:
        orders = _filter_all_relations(alts)
    else:
        orders = [
            make_order(OrderPattern(tuple(levels)), alts) for levels in _ordered_partitions(alts)
        ]
    return tuple(sorted(orders, key=lambda r: r.code))


def enumerate_weak_orders(alts: Iterable[int]) -> list[WeakOrder]:
    """All weak orders on ``alts`` sorted by code."""
    alts = tuple(sorted(set(alts)))
    if not 1 <= len(alts) <= MAX_ALTS:
        raise OrderError("alternative set too large" if alts else "alternative set is empty")
    return list(_enumerate(alts))

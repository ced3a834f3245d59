from __future__ import annotations

import itertools
from math import comb

import pytest

from revsoc.order import OrderError, OrderPattern, Relation, WeakOrder, enumerate_weak_orders, make_order, restrict


def brute_force_weak_orders(alts):
    """Independent oracle: filter every relation on ``alts`` by the axioms."""
    cells = [(x, y) for x in alts for y in alts]
    out = []
    for bits in range(1 << len(cells)):
        rel = {c for k, c in enumerate(cells) if bits >> k & 1}
        connected = all((x, y) in rel or (y, x) in rel for x in alts for y in alts)
        transitive = all(
            (x, z) in rel for (x, y) in rel for (y2, z) in rel if y == y2
        )
        if connected and transitive:
            out.append(frozenset(rel))
    return out


def fubini(n):
    """Ordered Bell numbers by the standard recurrence."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_enumeration_matches_filter_oracle(n):
    alts = tuple(range(n))
    got = {r.pairs for r in enumerate_weak_orders(alts)}
    assert got == set(brute_force_weak_orders(alts))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_counts_are_ordered_bell_numbers(n):
    assert len(enumerate_weak_orders(range(n))) == fubini(n)


def test_five_alternatives_has_541():
    assert len(enumerate_weak_orders(range(5))) == 541


def test_too_many_alternatives():
    with pytest.raises(ValueError, match="alternative set too large"):
        enumerate_weak_orders(range(6))


def test_codes_sorted_and_unique():
    W = enumerate_weak_orders((0, 1, 2))
    codes = [r.code for r in W]
    assert codes == sorted(set(codes))
    for r in W:
        assert WeakOrder.from_code(r.code, (0, 1, 2)) == r


def test_frozen_codes_for_three():
    # frozen from the filter oracle above
    assert [r.code for r in enumerate_weak_orders((0, 1, 2))] == [
        263219, 263221, 263223, 263269, 263285, 264243, 264291,
        264293, 264295, 264307, 265267, 265317, 265335,
    ]


def test_relations_and_levels():
    r = make_order("2 < 0 ~ 1", (0, 1, 2))
    assert r.lt(2, 0) and r.sim(0, 1) and not r.lt(0, 2)
    assert r.relation(2, 1) is Relation.STRICT_LESS
    assert r.relation(1, 2) is Relation.STRICT_GREATER
    assert r.relation(0, 1) is Relation.EQUIVALENT
    assert r.levels() == [(2,), (0, 1)]
    assert str(r) == "2 < 0 ~ 1"
    assert restrict(r, (0, 2)).lt(2, 0)


def test_pattern_wildcard():
    pat = OrderPattern.parse("0 < 1 < *")
    r = make_order(pat, (0, 1, 2, 3))
    assert r.lt(0, 1) and r.lt(1, 2) and r.sim(2, 3)


def test_invalid_relation_rejected():
    with pytest.raises(OrderError):
        WeakOrder((0, 1, 2), frozenset({(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)}))


def test_to_json():
    r = make_order("0 < 1 < 2", (0, 1, 2))
    obj = r.to_json()
    assert obj["code"] == r.code and obj["alts"] == [0, 1, 2]
    assert sorted(map(tuple, obj["pairs"])) == sorted(r.pairs)


def test_linear_orders_are_the_six_permutations():
    W = enumerate_weak_orders((0, 1, 2))
    linear = [r for r in W if len(r.levels()) == 3]
    assert sorted(tuple(x for (x,) in r.levels()) for r in linear) == sorted(itertools.permutations((0, 1, 2)))


def test_pattern_examples():
    X = (0, 1, 2)
    chain = make_order("0 < 1 < 2", X)
    assert sum(1 for x, y in itertools.permutations(X, 2) if chain.lt(x, y)) == 3
    flat = make_order("0 ~ 1 ~ 2", X)
    assert flat.pairs == frozenset(itertools.product(X, X))
    top = make_order("0 < *", X)
    assert top.lt(0, 1) and top.lt(0, 2) and top.sim(1, 2)
    with pytest.raises(OrderError):
        make_order("0 < 1", X)
    with pytest.raises(OrderError):
        make_order("0 < 1 < 1 < 2", X)


def test_restrict_and_relation_examples():
    X = (0, 1, 2)
    chain = make_order("0 < 1 < 2", X)
    assert restrict(chain, (0, 2)) == make_order("0 < 2", (0, 2))
    assert restrict(chain, X) == chain
    flat = make_order("0 ~ 1 ~ 2", X)
    assert restrict(flat, (0, 1)) == make_order("0 ~ 1", (0, 1))
    with pytest.raises(OrderError):
        restrict(chain, (0, 5))
    assert chain.relation(0, 1) is Relation.STRICT_LESS
    assert flat.relation(0, 1) is Relation.EQUIVALENT
    assert chain.relation(2, 0) is Relation.STRICT_GREATER


@pytest.mark.parametrize("n", [3, 4])
def test_weak_order_properties(n):
    W = enumerate_weak_orders(range(n))
    alts = range(n)
    for r in W:
        assert all(r.le(x, x) for x in alts)
        for x, y, z in itertools.product(alts, repeat=3):
            if r.sim(x, y) and r.sim(y, z):
                assert r.sim(x, z)
            if r.lt(x, y):
                assert r.lt(x, z) or r.lt(z, y)
    for r1, r2 in itertools.product(W, repeat=2):
        if r1.pairs <= r2.pairs:
            assert r1.code <= r2.code

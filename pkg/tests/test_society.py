from __future__ import annotations

import itertools
import random

import pytest

from revsoc.setalg import Cofinite, Finite, finite_cofinite_algebra
from revsoc.society import Default, QP, canonical_society, finite_society


def brute_eval(soc, qp, v):
    """Oracle for the quasi-partition rule, straight from membership."""
    hits = [j for j, c in enumerate(qp.cells) if soc.algebra.contains(c, v)]
    return qp.perm[hits[0]] if len(hits) == 1 else qp.perm[len(qp.cells)]


def test_society_needs_three_alternatives():
    with pytest.raises(ValueError):
        canonical_society(finite_cofinite_algebra(), (0, 1))


def test_default_profile(fc_society):
    soc = fc_society
    assert soc.decode(0) is None
    assert soc.eval(0, 17) == soc.W[0]
    assert soc.profile(5).source == Default(soc.W[0])


def test_qp_semantics_and_mu(fc_society):
    soc = fc_society
    a = soc.algebra
    rng = random.Random(1)
    for _ in range(30):
        k = rng.randint(1, 3)
        cells = [
            a.finite_index(rng.sample(range(8), rng.randint(0, 4)))
            if rng.random() < 0.5
            else a.cofinite_index(rng.sample(range(8), rng.randint(0, 4)))
            for _ in range(k)
        ]
        perm = list(soc.W)
        rng.shuffle(perm)
        n = soc.e(perm, cells)
        qp = soc.decode(n)
        assert isinstance(qp, QP) and list(qp.perm) == perm
        for v in range(12):
            r = soc.eval(n, v)
            assert r == brute_eval(soc, qp, v)
            for x, y in itertools.permutations(soc.alts, 2):
                assert a.contains(soc.mu(n, x, y), v) == r.le(x, y)
                assert a.contains(soc.mu_strict(n, x, y), v) == r.lt(x, y)
                assert a.contains(soc.mu_indiff(n, x, y), v) == r.sim(x, y)


def test_qp_index_validation(fc_society):
    soc = fc_society
    with pytest.raises(ValueError):
        soc.qp_index(["0 < 1 < 2"], [soc.algebra.atom_index(0)])
    with pytest.raises(ValueError):
        soc.qp_index(["0 < 1 < 2", "0 < 1 < 2"], [soc.algebra.atom_index(0)])
    with pytest.raises(ValueError):
        soc.e(list(soc.W)[:-1], [0])


def test_bridge_roundtrip(small_society):
    soc = small_society
    profiles = soc.all_profiles()
    assert len(profiles) == 13 ** len(soc.voters())
    for k, t in enumerate(profiles):
        assert soc.table_id(t) == k
        assert soc.tabulate(soc.bridge(t)) == t


def test_finite_society_guards():
    with pytest.raises(ValueError):
        finite_society(5)
    with pytest.raises(ValueError):
        finite_society(2, (0, 1, 2, 3))


def test_profiles_agree_on(fc_society):
    soc = fc_society
    a = soc.algebra
    c = a.finite_index([1, 2])
    n = soc.qp_index(["0 < 1 < 2", "1 < 0 < 2"], [c])
    m = soc.qp_index(["0 < 2 < 1", "2 < 1 < 0"], [c])
    ag = soc.profiles_agree_on(n, m, (0, 1))
    assert ag and ag.exact
    bad = soc.profiles_agree_on(n, m, (0, 2))
    assert not bad and bad.witness["voter"] == 0


def test_dictator_test_profile(fc_society):
    soc = fc_society
    a = soc.algebra
    d = 4
    n = soc.qp_index(["0 < 1 ~ *", "1 < 0 < *"], [a.atom_index(d)])
    assert soc.eval(n, d) == soc.order("0 < 1 ~ 2")
    assert all(soc.eval(n, v) == soc.order("1 < 0 < 2") for v in range(30) if v != d)
    strict = soc.mu_strict(n, 0, 1)
    assert a.normal_form(strict) == Finite(frozenset({d}))
    assert [v for v in range(50) if a.contains(strict, v)] == [d]


def test_all_indifferent_and_unanimous(fc_society):
    soc = fc_society
    a = soc.algebra
    flat = soc.qp_index(["0 ~ 1 ~ 2", "0 < 1 < 2"], [a.full_index()])
    for x, y in itertools.permutations(soc.alts, 2):
        assert a.normal_form(soc.mu(flat, x, y)) == Cofinite(frozenset())
    chain = soc.qp_index(["0 < 1 < 2", "1 < 0 < 2"], [a.full_index()])
    assert a.normal_form(soc.mu_strict(chain, 0, 1)) == Cofinite(frozenset())
    assert a.normal_form(soc.mu_indiff(chain, 0, 1)) == Finite(frozenset())


def test_true_partition_mu(fc_society):
    soc = fc_society
    a = soc.algebra
    v0, v1 = frozenset({0, 1, 2}), frozenset({3, 4})
    cells = [a.finite_index(v0), a.finite_index(v1), a.cofinite_index(v0 | v1)]
    n = soc.qp_index(["0 < 2 < 1", "1 < 2 < 0", "0 ~ 1 < 2", "2 < 1 < 0"], cells)
    # 0 is weakly above 1 exactly on V0 and V2
    want = {v for v in range(21) if v not in v1}
    assert {v for v in range(21) if a.contains(soc.mu(n, 0, 1), v)} == want
    assert a.normal_form(soc.mu(n, 0, 1)) == Cofinite(v1)
    # every voter of a true partition takes its own cell's order
    assert soc.eval(n, 20) == soc.order("0 ~ 1 < 2")


def test_overlapping_cells_fall_to_default(fc_society):
    soc = fc_society
    a = soc.algebra
    n = soc.qp_index(["0 < 1 < 2", "1 < 0 < 2", "2 < 1 < 0"], [a.finite_index([1, 2]), a.finite_index([2, 3])])
    assert [str(soc.eval(n, v)) for v in range(5)] == ["2 < 1 < 0", "0 < 1 < 2", "2 < 1 < 0", "1 < 0 < 2", "2 < 1 < 0"]


def test_finite_examples():
    soc = finite_society(2)
    assert len(soc.all_profiles()) == 169
    t = (soc.order("0 < 1 < 2"), soc.order("1 < 0 < 2"))
    n = soc.bridge(t)
    qp = soc.decode(n)
    assert [soc.algebra.mask(c) for c in qp.cells] == [1, 2]
    assert soc.tabulate(n) == t


def test_agreement_examples():
    soc = finite_society(3)
    t = (soc.order("0 < 1 < 2"),) * 3
    u = (soc.order("0 < 1 < 2"), soc.order("1 < 0 < 2"), soc.order("0 < 1 < 2"))
    n, m = soc.bridge(t), soc.bridge(u)
    assert soc.profiles_agree_on(n, n, (0, 1))
    res = soc.profiles_agree_on(n, m, (0, 1))
    assert not res and res.witness == {"voter": 1, "pair": [0, 1]}
    assert soc.profiles_agree_on(n, m, (1, 2))

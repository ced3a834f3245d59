from __future__ import annotations

import pytest

from revsoc.arrowcheck import (
    ArrowProblem,
    candidate_violation,
    enumerate_arrovian_swfs,
    majority_with_ties,
    naive_recount,
    recheck_prune,
    verify_against_ks,
)


@pytest.fixture(scope="module")
def linear():
    return ArrowProblem(2, (0, 1, 2), "linear"), enumerate_arrovian_swfs(2, (0, 1, 2), "linear")


def projection_values(problem, d):
    return {v: key[d] for v, (_, key) in enumerate(problem.vars)}


def test_problem_shape():
    p = ArrowProblem(2, domain="linear")
    assert len(p.orders) == 6 and len(p.profiles) == 36
    assert len(p.vars) == 12 and len(p.order) == 6
    w = ArrowProblem(2, domain="weak")
    assert len(w.orders) == 13 and len(w.profiles) == 169
    assert len(w.order) == 21
    assert len(w.triples) == 13


def test_guards():
    for bad in [dict(voters=1), dict(voters=3, domain="weak"), dict(voters=2, alts=(0, 1, 2, 3)), dict(voters=2, domain="x")]:
        with pytest.raises(ValueError):
            ArrowProblem(**bad)


def test_linear_survivors_are_the_projections(linear):
    problem, res = linear
    codes = [s.code for s in res.survivors]
    projections = sorted(problem.code(projection_values(problem, d)) for d in (0, 1))
    assert codes == projections
    assert [s.dictators for s in res.survivors] == [[0], [1]]
    assert not res.non_dictatorial


def test_linear_recount(linear):
    _, res = linear
    assert naive_recount(2, (0, 1, 2), "linear") == {s.code for s in res.survivors}


def test_three_voters_linear():
    res = enumerate_arrovian_swfs(3, (0, 1, 2), "linear")
    assert len(res.survivors) == 3 and not res.non_dictatorial
    assert naive_recount(3, (0, 1, 2), "linear") == {s.code for s in res.survivors}


def test_prunes_have_witnesses(linear):
    problem, res = linear
    assert res.prunes
    assert all(recheck_prune(problem, a, k) for a, k in res.prunes)


def test_majority_with_ties_is_incoherent():
    for domain in ("linear", "weak"):
        problem = ArrowProblem(2, domain=domain)
        values = majority_with_ties(problem)
        # it is unanimous and non-dictatorial by construction...
        assert all(values[v] == val for v, val in problem.fixed.items())
        assert problem.dictators(values) == []
        # ...and pruned at a concrete profile
        w = candidate_violation(problem, values)
        assert w is not None
        assert tuple(w["pair_states"]) not in problem.triples


def test_verify_against_ks_linear(linear):
    problem, res = linear
    reports = [verify_against_ks(s, problem) for s in res.survivors]
    assert [(r["brute_force_dictator"], r["extracted_dictator"]) for r in reports] == [(0, 0), (1, 1)]
    assert all(r["match"] for r in reports)


def test_survivor_json(linear):
    _, res = linear
    obj = res.survivors[0].to_json()
    assert obj["dictators"] == [0] and len(obj["aggregators"]) == 3
    assert res.summary()["survivors"] == 2


@pytest.mark.slow
def test_weak_domain_matches_naive_recount():
    res = enumerate_arrovian_swfs(2, (0, 1, 2), "weak")
    # frozen from the independent profile-by-profile recount below
    assert len(res.survivors) == 366
    assert naive_recount(2, (0, 1, 2), "weak") == {s.code for s in res.survivors}


def test_parallel_split_is_deterministic():
    a = enumerate_arrovian_swfs(2, (0, 1, 2), "weak")
    b = enumerate_arrovian_swfs(2, (0, 1, 2), "weak", jobs=2)
    assert [s.code for s in a.survivors] == [s.code for s in b.survivors]
    assert not a.non_dictatorial


def test_find_dictator_on_linear_survivors(linear):
    from revsoc.arrowcheck import survivor_table_rule
    from revsoc.society import finite_society
    from revsoc.swf import find_dictator, table_swf

    problem, res = linear
    soc = finite_society(2)
    assert [find_dictator(table_swf(soc, survivor_table_rule(problem, s))) for s in res.survivors] == [0, 1]

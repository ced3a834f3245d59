from __future__ import annotations

import json

import pytest

from revsoc.coding import pair
from revsoc.reversal import (
    Enumerator,
    InRange,
    NoWitnessUpTo,
    ToyProgram,
    build_gadget,
    direct_range_scan,
    gadget_g,
    phi,
    phi_report,
    toy_halting_set,
    toy_machine_enumerator,
    toy_tables,
)
from revsoc.setalg import Cofinite, Unknown


@pytest.fixture(scope="module")
def h5():
    return build_gadget(Enumerator.from_table({0: 5}))


def test_rows_of_b(h5):
    gs = h5
    assert [gs.in_b(10, v) for v in range(4)] == [False, True, True, True]
    for n in range(50):
        assert gs.in_b(2 * n + 1, n) and not gs.in_b(2 * n + 1, n + 1)
    assert gs.algebra.normal_form(gs.b_index(10), 3) == Cofinite(frozenset({0}))


def test_constant_zero():
    gs = build_gadget(Enumerator.from_table([0]))
    assert [gs.in_b(0, v) for v in range(3)] == [False, True, True]
    assert not any(gs.in_b(2 * n, v) for n in range(1, 10) for v in range(30))
    assert isinstance(gs.algebra.normal_form(gs.b_index(2), 30), Unknown)


def test_g_profile(h5):
    gs = h5
    soc = gs.society
    g = gadget_g(gs, 5)
    assert soc.eval(g, 0).lt(1, 0)
    assert soc.eval(g, 3).lt(0, 1)
    g7 = gadget_g(gs, 7)
    assert all(soc.eval(g7, v).lt(1, 0) for v in range(101))
    # the default bucket gets the second pattern order
    assert soc.decode(g7).perm[1] == soc.order("1 < 0 < *")


def test_phi_examples(h5):
    assert phi(h5, 5, 10) == InRange(1)
    assert phi(h5, 7, 100) == NoWitnessUpTo(100)
    assert phi(h5, 5, 0) == NoWitnessUpTo(0)


def test_table_defaults():
    h = Enumerator.from_table({0: 1, 3: 4})
    assert [h(m) for m in range(6)] == [1, 4, 4, 4, 4, 4]
    h = Enumerator.from_table({0: 1}, default=9)
    assert [h(m) for m in range(3)] == [1, 9, 9]
    assert Enumerator.from_json({"table": {"2": 3}, "default": 0})(2) == 3
    with pytest.raises(ValueError):
        Enumerator.from_table({})


def test_soundness_and_monotonicity():
    for h in toy_tables(4, seed=3):
        gs = build_gadget(h)
        for n in range(50):
            prev = None
            for T in (0, 10, 40, 100, 160):
                r = phi(gs, n, T)
                if isinstance(r, InRange):
                    m = r.stage - 1
                    assert m < T and h(m) == n
                    assert prev is None or prev == r
                    prev = r
                else:
                    assert prev is None
                    assert direct_range_scan(h, n, T) is None


def test_toy_machine_matches_halting_set():
    for family in range(3):
        h = toy_machine_enumerator(family)
        halting = toy_halting_set(family, 12)
        bound = pair(12, 25)
        gs = build_gadget(h)
        rep = phi_report(gs, range(12), bound)
        assert rep["ok"]
        found = {e["n"] for e in rep["results"] if e["result"] == "in_range"}
        assert found == halting


def test_toy_program_halting_step():
    assert ToyProgram(x0=0, c=1, p=7).halting_step() == 0
    # x -> x^2 + 1 mod 7 from 1: 1, 2, 5, 5, ... never 0
    assert ToyProgram(x0=1, c=1, p=7).halting_step() is None


def test_report_json(h5, tmp_path):
    rep = phi_report(h5, [5, 7], 10)
    assert rep["ok"] and "note" in rep
    path = tmp_path / "h.json"
    path.write_text(json.dumps({"0": 5}))
    assert Enumerator.load(path)(3) == 5

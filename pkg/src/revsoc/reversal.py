"""The range-deciding gadget.

From an enumeration ``h`` we build sets ``B_{2n} = {v : h(m) = n for some
m < v}`` and atoms ``B_{2n+1} = {n}``, the algebra they generate, and the
canonical society over it. A non-dictatorial SWF on that society ranks
``x`` over ``y`` at ``g(n)`` exactly when ``B_{2n}`` is cofinite, that is when
``n`` is in the range of ``h``. Here the non-principal ultrafilter can only
settle cofiniteness by scanning ``h`` up to an explicit stage bound, and the
answer is three-valued.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence, Union

from .coding import unpair
from .setalg import Algebra, Cofinite, FiniteGen, NormalForm, OracleGen, Unknown, generated_algebra
from .society import Society
from .swf import Swf, swf_from_ultrafilter
from .ultra import UndecidedError, frechet_ultrafilter

GADGET_ALTS = (0, 1, 2)
GADGET_PAIR = (0, 1)


@dataclass(frozen=True)
class Enumerator:
    """A total map ``N -> N`` with a printable description."""

    fn: Callable[[int], int] = field(compare=False, repr=False)
    description: dict = field(default_factory=dict, compare=False)

    def __call__(self, m: int) -> int:
        return self.fn(m)

    @classmethod
    def from_table(cls, table: Mapping[int, int] | Sequence[int], default: int | None = None) -> Enumerator:
        """``h(m) = table[m]`` where given; elsewhere ``default``, or the
        value at the largest tabulated argument when no default is set."""
        items = dict(enumerate(table)) if isinstance(table, Sequence) else {int(k): int(v) for k, v in table.items()}
        if not items and default is None:
            raise ValueError("an empty table needs a default")
        fallback = items[max(items)] if default is None else int(default)
        desc = {"kind": "table", "table": {str(k): v for k, v in sorted(items.items())}, "default": fallback}
        return cls(lambda m: items.get(m, fallback), desc)

    @classmethod
    def from_json(cls, obj: Union[dict, list]) -> Enumerator:
        """Accepts a bare list, a bare ``{"m": value}`` map, or
        ``{"table": ..., "default": d}``; ``{"toy": k}`` selects a toy machine."""
        if isinstance(obj, list):
            return cls.from_table(obj)
        if "toy" in obj:
            return toy_machine_enumerator(int(obj["toy"]))
        if "table" in obj:
            return cls.from_table(obj["table"], obj.get("default"))
        return cls.from_table(obj)

    @classmethod
    def load(cls, path: str | Path) -> Enumerator:
        return cls.from_json(json.loads(Path(path).read_text()))


# -- toy step-counting machines ------------------------------------------------


@dataclass(frozen=True)
class ToyProgram:
    """Iterate ``x -> (x*x + c) mod p`` from ``x0``; halt when ``x`` hits 0."""

    x0: int
    c: int
    p: int

    @classmethod
    def number(cls, i: int, family: int = 0) -> ToyProgram:
        return cls(x0=(i + family) % 11 + 1, c=(i // 3 + family) % 5 + 1, p=7 + (i * (family + 1)) % 13)

    def halting_step(self) -> int | None:
        """The step at which the program halts, or ``None`` if it cycles.

        The state space has ``p`` values, so running ``p`` steps settles it."""
        x = self.x0 % self.p
        for t in range(self.p + 1):
            if x == 0:
                return t
            x = (x * x + self.c) % self.p
        return None


def toy_machine_enumerator(family: int = 0) -> Enumerator:
    """Enumerate the halting programs of a toy family: ``h(pair(i, t)) = i``
    when program ``i`` halts at exactly step ``t``; every other argument maps
    to the least halting program."""
    first = next(i for i in range(1000) if ToyProgram.number(i, family).halting_step() is not None)

    def h(m: int) -> int:
        it = unpair(m)
        if it is None:
            return first
        i, t = it
        return i if ToyProgram.number(i, family).halting_step() == t else first

    return Enumerator(h, {"kind": "toy", "family": family, "default": first})


def toy_halting_set(family: int, bound: int) -> set[int]:
    return {i for i in range(bound) if ToyProgram.number(i, family).halting_step() is not None}


def toy_tables(count: int = 10, seed: int = 0, size: int = 20, values: int = 60) -> list[Enumerator]:
    """Deterministic pseudo-random finite tables with defaults."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        table = {m: rng.randrange(values) for m in sorted(rng.sample(range(3 * size), size))}
        out.append(Enumerator.from_table(table, default=rng.randrange(values)))
    return out


# -- the gadget -----------------------------------------------------------------


class _RangeScan:
    """First occurrences of values of ``h``, scanned incrementally."""

    def __init__(self, h: Enumerator) -> None:
        self.h = h
        self.scanned = 0
        self.first: dict[int, int] = {}
        self._lock = threading.Lock()

    def upto(self, t: int) -> None:
        with self._lock:
            while self.scanned < t:
                self.first.setdefault(self.h(self.scanned), self.scanned)
                self.scanned += 1

    def least_witness(self, n: int, below: int) -> int | None:
        """Least ``m < below`` with ``h(m) = n``."""
        self.upto(below)
        m = self.first.get(n)
        return m if m is not None and m < below else None


@dataclass
class GadgetSociety:
    enumerator: Enumerator
    algebra: Algebra
    society: Society
    scan: _RangeScan = field(repr=False)
    pair: tuple[int, int] = GADGET_PAIR

    def b_index(self, k: int) -> int:
        return self.algebra.generator_index(k)

    def in_b(self, k: int, v: int) -> bool:
        return self.algebra.generator(k).contains(v)

    def to_json(self) -> dict:
        return {"h": self.enumerator.description, "X": list(self.society.alts), "pair": list(self.pair)}


def build_gadget(h: Enumerator) -> GadgetSociety:
    scan = _RangeScan(h)

    def row(n: int) -> OracleGen:
        def member(v: int) -> bool:
            return scan.least_witness(n, v) is not None

        def resolve(stage: int) -> NormalForm:
            m = scan.least_witness(n, stage)
            if m is None:
                return Unknown(stage)
            return Cofinite(frozenset(range(m + 1)))

        return OracleGen(f"B_{2 * n}", member, resolve)

    def generator(k: int):
        return row(k // 2) if k % 2 == 0 else FiniteGen(frozenset([k // 2]))

    alg = generated_algebra(
        "gadget",
        generator,
        lambda v: 2 * v + 1,
        exact=False,
        description={"kind": "gadget", "h": h.description},
    )
    return GadgetSociety(h, alg, Society(alg, GADGET_ALTS), scan)


def gadget_g(gs: GadgetSociety, n: int) -> int:
    """Profile index: ``x < y < *`` on ``B_{2n}``, ``y < x < *`` elsewhere."""
    x, y = gs.pair
    soc = gs.society
    return soc.qp_index([f"{x} < {y} < *", f"{y} < {x} < *"], [gs.b_index(2 * n)])


def gadget_swf(gs: GadgetSociety, stage_bound: int) -> Swf:
    return swf_from_ultrafilter(gs.society, frechet_ultrafilter(gs.algebra, stage_bound))


@dataclass(frozen=True)
class InRange:
    stage: int

    def to_json(self) -> dict:
        return {"result": "in_range", "stage": self.stage}


@dataclass(frozen=True)
class NoWitnessUpTo:
    bound: int

    def to_json(self) -> dict:
        return {"result": "no_witness_up_to", "bound": self.bound}


PhiResult = Union[InRange, NoWitnessUpTo]


def phi(gs: GadgetSociety, n: int, stage_bound: int, sigma: Swf | None = None) -> PhiResult:
    """Evaluate ``x <_{sigma(g(n))} y`` with ``h`` queried only below the stage bound.

    The witness stage is the least voter of ``B_{2n}``, one more than the
    least ``m`` with ``h(m) = n``.
    """
    if stage_bound < 0:
        raise ValueError("stage bound must be non-negative")
    x, y = gs.pair
    sigma = sigma or gadget_swf(gs, stage_bound)
    try:
        social = sigma.sigma(gadget_g(gs, n))
    except UndecidedError:
        return NoWitnessUpTo(stage_bound)
    if not social.lt(x, y):
        return NoWitnessUpTo(stage_bound)
    m = gs.scan.least_witness(n, stage_bound)
    assert m is not None
    return InRange(m + 1)


def direct_range_scan(h: Enumerator, n: int, stage_bound: int) -> int | None:
    """Least ``m < stage_bound`` with ``h(m) = n``, by plain search."""
    return next((m for m in range(stage_bound) if h(m) == n), None)


def phi_report(gs: GadgetSociety, ns: Sequence[int], stage_bound: int) -> dict:
    sigma = gadget_swf(gs, stage_bound)
    results = []
    for n in ns:
        r = phi(gs, n, stage_bound, sigma)
        direct = direct_range_scan(gs.enumerator, n, stage_bound)
        entry = {"n": n, **r.to_json(), "direct_witness": direct}
        entry["agrees"] = (direct is None) == isinstance(r, NoWitnessUpTo) and (
            direct is None or r.stage == direct + 1
        )
        results.append(entry)
    return {
        "gadget": gs.to_json(),
        "stage_bound": stage_bound,
        "results": results,
        "ok": all(e["agrees"] for e in results),
        "note": (
            "h is queried only below the stage bound. Without a bound, evaluating "
            "sigma at g(n) would decide whether n is in the range of h; "
            "no_witness_up_to makes no claim about larger stages."
        ),
    }


__all__ = [
    "Enumerator",
    "GadgetSociety",
    "InRange",
    "NoWitnessUpTo",
    "ToyProgram",
    "build_gadget",
    "direct_range_scan",
    "gadget_g",
    "gadget_swf",
    "phi",
    "phi_report",
    "toy_halting_set",
    "toy_machine_enumerator",
    "toy_tables",
]

"""Countable algebras of sets indexed by boolean formation sequences.

A formation sequence is a straight-line program of triples ``(tag, n, m)``:

* ``(0, n, n)`` names generator ``n``;
* ``(1, n, n)`` with ``n`` an earlier position is the complement of entry ``n``;
* ``(2, n, m)`` with ``n, m`` earlier positions is the intersection.

The set denoted by a sequence is the set at its last entry. An algebra index
*is* the code of a formation sequence (see :mod:`revsoc.coding`); numbers that
do not code a valid sequence denote the empty set. Complement, intersection
and union act on indexes by concatenating sequences, so no set is ever
materialised to compute them.

Normal forms (``Finite``/``Cofinite``) are computed by structural recursion.
Generators backed by an oracle may only be resolvable up to a stage bound, in
which case the normal form is ``Unknown(stage)``.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Protocol, Sequence, Union

from .coding import decode_seq, encode_seq, triple_code, triple_decode

Triple = tuple[int, int, int]
Formation = tuple[Triple, ...]

DEFAULT_TEST_BOUND = 1000


class InvalidFormation(ValueError):
    def __init__(self, detail: str = "") -> None:
        super().__init__("invalid formation sequence" + (f": {detail}" if detail else ""))


# -- normal forms ------------------------------------------------------------


@dataclass(frozen=True)
class Finite:
    elems: frozenset[int]

    def to_json(self) -> dict:
        return {"kind": "finite", "support": sorted(self.elems)}


@dataclass(frozen=True)
class Cofinite:
    missing: frozenset[int]

    def to_json(self) -> dict:
        return {"kind": "cofinite", "support": sorted(self.missing)}


@dataclass(frozen=True)
class Unknown:
    stage: int

    def to_json(self) -> dict:
        return {"kind": "unknown", "stage": self.stage}


NormalForm = Union[Finite, Cofinite, Unknown]
EMPTY_NF = Finite(frozenset())


def nf_from_json(obj: dict) -> NormalForm:
    kind = obj["kind"]
    if kind == "finite":
        return Finite(frozenset(obj["support"]))
    if kind == "cofinite":
        return Cofinite(frozenset(obj["support"]))
    if kind == "unknown":
        return Unknown(int(obj["stage"]))
    raise ValueError(f"unknown normal form kind {kind!r}")


# -- generators --------------------------------------------------------------


class Generator(Protocol):
    def contains(self, v: int) -> bool: ...

    def normal_form(self, stage: int | None) -> NormalForm: ...

    def describe(self) -> dict: ...


@dataclass(frozen=True)
class FiniteGen:
    elems: frozenset[int]

    def contains(self, v: int) -> bool:
        return v in self.elems

    def normal_form(self, stage: int | None) -> NormalForm:
        return Finite(self.elems)

    def describe(self) -> dict:
        return Finite(self.elems).to_json()


@dataclass(frozen=True)
class CofiniteGen:
    missing: frozenset[int]

    def contains(self, v: int) -> bool:
        return v >= 0 and v not in self.missing

    def normal_form(self, stage: int | None) -> NormalForm:
        return Cofinite(self.missing)

    def describe(self) -> dict:
        return Cofinite(self.missing).to_json()


@dataclass(frozen=True)
class OracleGen:
    """A generator with decidable membership but no a priori normal form.

    ``resolve(stage)`` may return an exact normal form once the stage bound
    suffices to settle it, and ``Unknown`` otherwise.
    """

    label: str
    member: Callable[[int], bool] = field(compare=False)
    resolve: Callable[[int], NormalForm] | None = field(default=None, compare=False)

    def contains(self, v: int) -> bool:
        return v >= 0 and self.member(v)

    def normal_form(self, stage: int | None) -> NormalForm:
        if stage is None or self.resolve is None:
            return Unknown(stage or 0)
        return self.resolve(stage)

    def describe(self) -> dict:
        return {"kind": "oracle", "label": self.label}


# -- formation sequences -----------------------------------------------------


def check_formation(s: Sequence[Sequence[int]]) -> Formation:
    """Validate the three clauses and return ``s`` as a tuple of triples."""
    if len(s) < 1:
        raise InvalidFormation("empty sequence")
    out = []
    for j, entry in enumerate(s):
        if len(entry) != 3:
            raise InvalidFormation(f"entry {j} is not a triple")
        tag, n, m = (int(v) for v in entry)
        if n < 0 or m < 0:
            raise InvalidFormation(f"negative reference at entry {j}")
        if tag == 0:
            ok = n == m
        elif tag == 1:
            ok = n == m and n < j
        elif tag == 2:
            ok = n < j and m < j
        else:
            ok = False
        if not ok:
            raise InvalidFormation(f"entry {j} = {(tag, n, m)}")
        out.append((tag, n, m))
    return tuple(out)


def formation_code(s: Sequence[Sequence[int]]) -> int:
    return encode_seq([triple_code(*t) for t in check_formation(s)])


@lru_cache(maxsize=1 << 16)
def parse_formation(code: int) -> Formation | None:
    """Decode an index to a syntactically valid formation sequence, or ``None``."""
    items = decode_seq(code)
    if not items:
        return None
    triples = []
    for c in items:
        t = triple_decode(c)
        if t is None:
            return None
        triples.append(t)
    try:
        return check_formation(triples)
    except InvalidFormation:
        return None


def shift_formation(s: Formation, offset: int) -> list[Triple]:
    out = []
    for tag, n, m in s:
        if tag == 0:
            out.append((tag, n, m))
        else:
            out.append((tag, n + offset, m + offset))
    return out


class SetComparison(enum.Enum):
    EQUAL = "equal"
    UNEQUAL = "unequal"
    EQUAL_UP_TO_BOUND = "equal_up_to_bound"


# -- algebras ----------------------------------------------------------------


class Algebra:
    """An atomic countable algebra over ``V`` generated by a family ``S``.

    ``universe`` is a finite frozenset of voters, or ``None`` for ``V = N``.
    ``generator(n)`` returns ``S_n`` or ``None`` if there is no such
    generator; ``atom_generator(v)`` is a generator number with ``S_n = {v}``.
    ``exact`` records that every generator has a finite/cofinite normal form.
    """

    def __init__(
        self,
        name: str,
        universe: frozenset[int] | None,
        generator: Callable[[int], Generator | None],
        atom_generator: Callable[[int], int] | None,
        *,
        exact: bool,
        description: dict | None = None,
    ) -> None:
        self.name = name
        self.universe = universe
        self._generator = generator
        self._atom_generator = atom_generator
        self.exact = exact
        self.description = description or {}
        self._nf_cache = lru_cache(maxsize=1 << 15)(self._normal_form_uncached)
        self._gen_lock = threading.Lock()
        self._gen_cache: dict[int, Generator | None] = {}
        self._empty = formation_code(self._empty_formation())
        self._full = self.complement_index(self._empty)

    def __repr__(self) -> str:
        return f"<Algebra {self.name}>"

    # generators and universe

    @property
    def finite(self) -> bool:
        return self.universe is not None

    @property
    def atomic(self) -> bool:
        return self._atom_generator is not None

    def in_universe(self, v: int) -> bool:
        return v >= 0 and (self.universe is None or v in self.universe)

    def generator(self, n: int) -> Generator | None:
        with self._gen_lock:
            if n not in self._gen_cache:
                self._gen_cache[n] = self._generator(n)
            return self._gen_cache[n]

    def _empty_formation(self) -> Formation:
        return ((0, 0, 0), (1, 0, 0), (2, 0, 1))

    # indexes

    def formation_of(self, i: int) -> Formation | None:
        s = parse_formation(i)
        if s is None:
            return None
        for tag, n, _ in s:
            if tag == 0 and self.generator(n) is None:
                return None
        return s

    def index_of(self, s: Sequence[Sequence[int]]) -> int:
        f = check_formation(s)
        for tag, n, _ in f:
            if tag == 0 and self.generator(n) is None:
                raise InvalidFormation(f"no generator {n}")
        return formation_code(f)

    def eval_formation(self, s: Sequence[Sequence[int]]) -> DescribedSet:
        return DescribedSet(self, self.formation_of(self.index_of(s)))

    def set_at(self, i: int) -> DescribedSet:
        f = self.formation_of(i)
        if f is None:
            f = self.formation_of(self._empty)
        return DescribedSet(self, f)

    def generator_index(self, n: int) -> int:
        return self.index_of([(0, n, n)])

    def atom_index(self, v: int) -> int:
        if self._atom_generator is None:
            raise ValueError(f"algebra {self.name} is not atomic")
        if not self.in_universe(v):
            raise ValueError(f"{v} is not a voter")
        return self.generator_index(self._atom_generator(v))

    def empty_index(self) -> int:
        return self._empty

    def full_index(self) -> int:
        return self._full

    def complement_index(self, i: int) -> int:
        b = FormationBuilder(self)
        return b.finish(b.compl(b.add(i)))

    def intersect_index(self, i: int, j: int) -> int:
        b = FormationBuilder(self)
        return b.finish(b.inter(b.add(i), b.add(j)))

    def union_index(self, i: int, j: int) -> int:
        b = FormationBuilder(self)
        return b.finish(b.union(b.add(i), b.add(j)))

    def finite_index(self, elems: Iterable[int]) -> int:
        """Index of a finite set of voters, as a union of atoms."""
        elems = sorted(set(elems))
        if not elems:
            return self._empty
        b = FormationBuilder(self)
        pos = b.add(self.atom_index(elems[0]))
        for v in elems[1:]:
            pos = b.union(pos, b.add(self.atom_index(v)))
        return b.finish(pos)

    def cofinite_index(self, missing: Iterable[int]) -> int:
        return self.complement_index(self.finite_index(missing))

    # membership and normal forms

    def contains(self, i: int, v: int) -> bool:
        return self.set_at(i).contains(v)

    def normal_form(self, i: int, stage: int | None = None) -> NormalForm:
        return self.set_at(i).normal_form(stage)

    def _clamp(self, nf: NormalForm) -> NormalForm:
        if self.universe is None or isinstance(nf, Unknown):
            return nf
        if isinstance(nf, Finite):
            return Finite(nf.elems & self.universe)
        return Finite(self.universe - nf.missing)

    def _compl(self, nf: NormalForm) -> NormalForm:
        if isinstance(nf, Unknown):
            return nf
        if isinstance(nf, Finite):
            if self.universe is None:
                return Cofinite(nf.elems)
            return Finite(self.universe - nf.elems)
        return Finite(nf.missing)

    def _normal_form_uncached(self, f: Formation, stage: int | None) -> NormalForm:
        vals: list[NormalForm] = []
        # hash-consed term ids, so repeated subterms are recognised wherever they sit
        terms: list[int] = []
        ids: dict[tuple, int] = {}
        for tag, n, m in f:
            if tag == 0:
                key: tuple = (0, n)
                vals.append(self._clamp(self.generator(n).normal_form(stage)))
            elif tag == 1:
                key = (1, terms[n])
                vals.append(self._compl(vals[n]))
            else:
                key = (2,) + tuple(sorted((terms[n], terms[m])))
                vals.append(self._inter(f, vals, terms, ids, n, m))
            terms.append(ids.setdefault(key, len(ids)))
        return vals[-1]

    def _inter(
        self, f: Formation, vals: list[NormalForm], terms: list[int], ids: dict[tuple, int], n: int, m: int
    ) -> NormalForm:
        a, b = vals[n], vals[m]
        if isinstance(a, Finite) and isinstance(b, Finite):
            return Finite(a.elems & b.elems)
        if isinstance(a, Cofinite) and isinstance(b, Cofinite):
            return Cofinite(a.missing | b.missing)
        if isinstance(a, Finite) and isinstance(b, Cofinite):
            return Finite(a.elems - b.missing)
        if isinstance(a, Cofinite) and isinstance(b, Finite):
            return Finite(b.elems - a.missing)
        # at least one side is Unknown
        if terms[n] == terms[m]:
            return a
        if ids.get((1, terms[n])) == terms[m] or ids.get((1, terms[m])) == terms[n]:
            return Finite(frozenset())
        if isinstance(a, Finite):
            return Finite(frozenset(v for v in a.elems if _member_at(self, f, m, v)))
        if isinstance(b, Finite):
            return Finite(frozenset(v for v in b.elems if _member_at(self, f, n, v)))
        if isinstance(a, Cofinite) and not a.missing:
            return b
        if isinstance(b, Cofinite) and not b.missing:
            return a
        stage = max(x.stage for x in (a, b) if isinstance(x, Unknown))
        return Unknown(stage)

    # relations between indexed sets

    def mask(self, i: int) -> int:
        """Bitmask of ``set_at(i)`` over a finite universe."""
        if self.universe is None:
            raise ValueError("mask() needs a finite universe")
        nf = self.normal_form(i)
        assert isinstance(nf, Finite)
        out = 0
        for v in nf.elems:
            out |= 1 << v
        return out

    def is_empty(self, i: int, stage: int | None = None) -> bool | None:
        nf = self.normal_form(i, stage)
        if isinstance(nf, Unknown):
            return None
        return isinstance(nf, Finite) and not nf.elems

    def is_full(self, i: int, stage: int | None = None) -> bool | None:
        return self.is_empty(self.complement_index(i), stage)

    def subset(self, i: int, j: int, stage: int | None = None) -> bool | None:
        """Certified ``A_i <= A_j``; ``None`` when normal forms do not settle it."""
        return self.is_empty(self.intersect_index(i, self.complement_index(j)), stage)

    def compare(self, i: int, j: int, bound: int = DEFAULT_TEST_BOUND, stage: int | None = None) -> SetComparison:
        a, b = self.normal_form(i, stage), self.normal_form(j, stage)
        if not isinstance(a, Unknown) and not isinstance(b, Unknown):
            return SetComparison.EQUAL if a == b else SetComparison.UNEQUAL
        sa, sb = self.set_at(i), self.set_at(j)
        for v in range(bound):
            if self.in_universe(v) and sa.contains(v) != sb.contains(v):
                return SetComparison.UNEQUAL
        return SetComparison.EQUAL_UP_TO_BOUND

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "universe": None if self.universe is None else sorted(self.universe),
            "exact": self.exact,
            "generators": self.description,
        }


def _member_at(a: Algebra, f: Formation, pos: int, v: int) -> bool:
    vals: list[bool] = []
    for tag, n, m in f[: pos + 1]:
        if tag == 0:
            vals.append(a.generator(n).contains(v))
        elif tag == 1:
            vals.append(not vals[n])
        else:
            vals.append(vals[n] and vals[m])
    return vals[-1] and a.in_universe(v)


@dataclass(frozen=True)
class DescribedSet:
    """A subset of ``V`` presented by a formation sequence over an algebra."""

    algebra: Algebra = field(compare=False, repr=False)
    formation: Formation

    @property
    def index(self) -> int:
        return formation_code(self.formation)

    def contains(self, v: int) -> bool:
        return _member_at(self.algebra, self.formation, len(self.formation) - 1, v)

    def __contains__(self, v: int) -> bool:
        return self.contains(v)

    def normal_form(self, stage: int | None = None) -> NormalForm:
        return self.algebra._nf_cache(self.formation, stage)

    def members(self, bound: int) -> Iterator[int]:
        return (v for v in range(bound) if self.contains(v))

    def to_json(self, stage: int | None = None) -> dict:
        return {
            "formation": [list(t) for t in self.formation],
            "normal_form": self.normal_form(stage).to_json(),
        }


class FormationBuilder:
    """Appends formation sequences and boolean steps, tracking positions."""

    def __init__(self, algebra: Algebra) -> None:
        self.algebra = algebra
        self.entries: list[Triple] = []
        self._added: dict[int, int] = {}

    def add(self, i: int) -> int:
        if i in self._added:
            return self._added[i]
        f = self.algebra.formation_of(i)
        if f is None:
            f = self.algebra._empty_formation()
        self.entries.extend(shift_formation(f, len(self.entries)))
        pos = len(self.entries) - 1
        self._added[i] = pos
        return pos

    def compl(self, p: int) -> int:
        self.entries.append((1, p, p))
        return len(self.entries) - 1

    def inter(self, p: int, q: int) -> int:
        self.entries.append((2, p, q))
        return len(self.entries) - 1

    def union(self, p: int, q: int) -> int:
        return self.compl(self.inter(self.compl(p), self.compl(q)))

    def finish(self, p: int) -> int:
        if p != len(self.entries) - 1:
            self.inter(p, p)
        return formation_code(self.entries)


class PowersetAlgebra(Algebra):
    """All subsets of a finite ``V``; generator ``b`` is the subset with bitmask ``b``."""

    def __init__(self, voters: Iterable[int]) -> None:
        elems = tuple(sorted(set(voters)))
        if len(elems) > 20:
            raise ValueError("powerset algebra needs |V| <= 20")
        if not elems:
            raise ValueError("powerset algebra needs a nonempty V")
        self.voters = elems
        self._pos = {v: k for k, v in enumerate(elems)}
        size = 1 << len(elems)

        def generator(n: int) -> Generator | None:
            if n >= size:
                return None
            return FiniteGen(frozenset(v for k, v in enumerate(elems) if n >> k & 1))

        super().__init__(
            f"powerset({list(elems)})",
            frozenset(elems),
            generator,
            lambda v: 1 << self._pos[v],
            exact=True,
            description={"kind": "powerset", "voters": list(elems)},
        )

    def _empty_formation(self) -> Formation:
        return ((0, 0, 0),)

    def canonical_index(self, subset: Iterable[int]) -> int:
        mask = 0
        for v in subset:
            if v not in self._pos:
                raise ValueError(f"{v} is not a voter")
            mask |= 1 << self._pos[v]
        return self.generator_index(mask)

    def finite_index(self, elems: Iterable[int]) -> int:
        return self.canonical_index(elems)

    def subsets(self) -> list[tuple[frozenset[int], int]]:
        """Every subset of ``V`` with its canonical index, by bitmask order."""
        out = []
        for mask in range(1 << len(self.voters)):
            s = frozenset(v for k, v in enumerate(self.voters) if mask >> k & 1)
            out.append((s, self.generator_index(mask)))
        return out


def powerset_algebra(voters: Iterable[int]) -> PowersetAlgebra:
    return PowersetAlgebra(voters)


def finite_cofinite_algebra() -> Algebra:
    """The algebra of finite and cofinite subsets of N, generated by singletons."""
    return Algebra(
        "finite-cofinite",
        None,
        lambda n: FiniteGen(frozenset([n])),
        lambda v: v,
        exact=True,
        description={"kind": "singletons"},
    )


def generated_algebra(
    name: str,
    generators: Callable[[int], Generator | None],
    atom_generator: Callable[[int], int] | None,
    *,
    universe: frozenset[int] | None = None,
    exact: bool = False,
    description: dict | None = None,
) -> Algebra:
    """The algebra generated by an arbitrary generator family."""
    return Algebra(name, universe, generators, atom_generator, exact=exact, description=description)

"""Numeric codings: the pairing map, finite sets and finite sequences.

The pairing map ``pair(m, n) = (m + n)**2 + m`` is injective but not onto, so
``unpair`` returns ``None`` on numbers outside its range.

Finite sequences are coded by a prefix-free bit concatenation: a leading
``1`` sentinel followed by the Elias gamma code of ``c + 1`` for every entry
``c``. Concatenating two sequences therefore concatenates their bit strings,
so codes grow linearly with the total size of the entries.
"""

from __future__ import annotations

from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence


def pair(m: int, n: int) -> int:
    if m < 0 or n < 0:
        raise ValueError(f"pair() takes naturals, got ({m}, {n})")
    s = m + n
    return s * s + m


def unpair(z: int) -> tuple[int, int] | None:
    """Inverse of :func:`pair`, or ``None`` if ``z`` is not a pair code."""
    if z < 0:
        return None
    s = isqrt(z)
    m = z - s * s
    if m > s:
        return None
    return m, s - m


def set_code(elems: Iterable[int]) -> int:
    """Bitmask code of a finite set of naturals (monotone under inclusion)."""
    code = 0
    for e in elems:
        code |= 1 << e
    return code


def set_decode(code: int) -> frozenset[int]:
    out = []
    i = 0
    while code:
        if code & 1:
            out.append(i)
        code >>= 1
        i += 1
    return frozenset(out)


def _gamma(x: int) -> str:
    b = bin(x)[2:]
    return "0" * (len(b) - 1) + b


def encode_seq(items: Sequence[int]) -> int:
    return int("1" + "".join(_gamma(c + 1) for c in items), 2)


@lru_cache(maxsize=1 << 16)
def decode_seq(code: int) -> tuple[int, ...] | None:
    """Inverse of :func:`encode_seq`; ``None`` for numbers that code nothing."""
    if code < 1:
        return None
    bits = bin(code)[3:]
    out = []
    pos, end = 0, len(bits)
    while pos < end:
        zeros = 0
        while pos < end and bits[pos] == "0":
            zeros += 1
            pos += 1
        if pos + zeros + 1 > end:
            return None
        out.append(int(bits[pos : pos + zeros + 1], 2) - 1)
        pos += zeros + 1
    return tuple(out)


def triple_code(tag: int, n: int, m: int) -> int:
    return pair(tag, pair(n, m))


def triple_decode(c: int) -> tuple[int, int, int] | None:
    outer = unpair(c)
    if outer is None:
        return None
    inner = unpair(outer[1])
    if inner is None:
        return None
    return outer[0], inner[0], inner[1]

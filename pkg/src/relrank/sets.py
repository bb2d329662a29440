"""Decidable subsets of N, pairing bijections and binary-sequence codes."""

from __future__ import annotations

import bisect
import json
import math
import re
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .natfn import PROVED, Meta, NatFn, hash_word

DEFAULT_BUDGET = 1 << 16


class WindowError(RuntimeError):
    """A set did not yield enough members within the search budget."""


class SetRep:
    """A decidable subset of N.

    ``enum`` (optional) lists the members in strictly increasing order.
    ``kind`` is ``"finite"``, ``"cofinite"`` or ``"general"``; for the first
    two, ``elements`` holds the members, respectively the non-members.
    """

    __slots__ = ("name", "member", "enum", "kind", "elements", "_rank")

    def __init__(self, member: Callable[[int], bool], name: str = "<set>",
                 enum: Optional[Callable[[int], int]] = None, kind: str = "general",
                 elements: Sequence[int] = (), rank: Optional[Callable[[int], Optional[int]]] = None):
        if kind not in ("finite", "cofinite", "general"):
            raise ValueError(f"bad kind {kind!r}")
        self.name = name
        self.member = member
        self.enum = enum
        self.kind = kind
        self.elements = tuple(sorted(set(elements)))
        self._rank = rank

    def __contains__(self, n: int) -> bool:
        return bool(self.member(n))

    def __repr__(self):
        return f"SetRep({self.name})"

    @property
    def infinite(self) -> Optional[bool]:
        if self.kind == "finite":
            return False
        if self.kind == "cofinite" or self.enum is not None:
            return True
        return None

    def rank(self, n: int) -> Optional[int]:
        """Index of n in the enumeration, or None if n is not a member."""
        if not self.member(n):
            return None
        if self._rank is not None:
            return self._rank(n)
        if self.enum is None:
            return sum(1 for j in range(n) if self.member(j))
        # enum is strictly increasing, so enum(i) >= i and the index is <= n
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi) // 2
            if self.enum(mid) < n:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def iter_members(self, budget: int = DEFAULT_BUDGET) -> Iterator[int]:
        """Members in increasing order; without an enumerator, scans N below budget."""
        if self.enum is not None:
            i = 0
            while True:
                yield self.enum(i)
                i += 1
        for n in range(budget):
            if self.member(n):
                yield n

    def members_below(self, bound: int) -> list[int]:
        if self.enum is not None:
            out = []
            i = 0
            while True:
                v = self.enum(i)
                if v >= bound:
                    return out
                out.append(v)
                i += 1
        return [n for n in range(bound) if self.member(n)]

    def window(self, skip: int, length: int, budget: int = DEFAULT_BUDGET) -> list[int]:
        """Members with enumeration index in [skip, skip + length)."""
        if self.enum is not None:
            return [self.enum(i) for i in range(skip, skip + length)]
        out = []
        for i, n in enumerate(self.iter_members(budget)):
            if i >= skip + length:
                break
            if i >= skip:
                out.append(n)
        if len(out) < length:
            raise WindowError(f"{self.name}: fewer than {skip + length} members below {budget}")
        return out


# -- constructors ------------------------------------------------------------

def naturals() -> SetRep:
    return SetRep(lambda n: True, "naturals", enum=lambda i: i, kind="cofinite",
                  rank=lambda n: n)


def empty() -> SetRep:
    return SetRep(lambda n: False, "empty", kind="finite")


def multiples(k: int, offset: int = 0) -> SetRep:
    """{offset + k*i : i in N}."""
    if k < 1:
        raise ValueError("k must be positive")
    name = f"mult:{k}" if offset == 0 else f"mod:{k}:{offset}"
    return SetRep(lambda n: n >= offset and (n - offset) % k == 0, name,
                  enum=lambda i: offset + k * i, rank=lambda n: (n - offset) // k)


def evens() -> SetRep:
    return _named(multiples(2), "evens")


def odds() -> SetRep:
    return _named(multiples(2, 1), "odds")


def _named(s: SetRep, name: str) -> SetRep:
    s.name = name
    return s


def finite(values: Iterable[int], name: str | None = None) -> SetRep:
    elems = tuple(sorted(set(values)))
    lookup = frozenset(elems)
    pos = {v: i for i, v in enumerate(elems)}
    return SetRep(lookup.__contains__, name or f"finite:{json.dumps(list(elems))}",
                  kind="finite", elements=elems, rank=pos.get)


def cofinite(missing: Iterable[int], name: str | None = None) -> SetRep:
    gaps = tuple(sorted(set(missing)))
    lookup = frozenset(gaps)

    def enum(i):
        # the i-th natural not in gaps
        n = i
        for g in gaps:
            if g <= n:
                n += 1
            else:
                break
        return n

    return SetRep(lambda n: n not in lookup, name or f"cofinite:{json.dumps(list(gaps))}",
                  enum=enum, kind="cofinite", elements=gaps,
                  rank=lambda n: n - bisect.bisect_left(gaps, n))


def predicate(member: Callable[[int], bool], name: str = "<pred>") -> SetRep:
    return SetRep(member, name)


def random_set(seed: int, density: float = 0.5) -> SetRep:
    """A pseudo-random decidable set; each n is in with probability ~density."""
    cut = int(density * (1 << 64))
    return SetRep(lambda n: hash_word(seed, n) < cut, f"randset:{seed}")


def intersection(a: SetRep, b: SetRep) -> SetRep:
    if a.kind == "finite" and b.kind == "finite":
        return finite(set(a.elements) & set(b.elements))
    return SetRep(lambda n: a.member(n) and b.member(n), f"({a.name}&{b.name})")


def complement(a: SetRep) -> SetRep:
    if a.kind == "finite":
        return cofinite(a.elements, f"~{a.name}")
    if a.kind == "cofinite":
        return finite(a.elements, f"~{a.name}")
    return SetRep(lambda n: not a.member(n), f"~{a.name}")


def from_enum(enum: Callable[[int], int], name: str,
              member: Optional[Callable[[int], bool]] = None) -> SetRep:
    """A set given by a strictly increasing enumerator (membership by search if not given)."""
    if member is None:
        def member(n):
            i = 0
            while True:
                v = enum(i)
                if v >= n:
                    return v == n
                i += 1
    return SetRep(member, name, enum=enum)


# -- Cantor pairing ----------------------------------------------------------

def cantor_pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def cantor_unpair(z: int) -> tuple[int, int]:
    if z < 0:
        raise ValueError("negative code")
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def tuple_code(t: Sequence[int]) -> int:
    """A bijection from finite tuples of naturals onto N.

    code(()) = 0 and code((a,) + rest) = 1 + pair(a, code(rest)).
    """
    c = 0
    for a in reversed(tuple(t)):
        c = 1 + cantor_pair(a, c)
    return c


def tuple_decode(c: int) -> tuple[int, ...]:
    out = []
    while c:
        a, c = cantor_unpair(c - 1)
        out.append(a)
    return tuple(out)


def pair_slice(t: int, name: str | None = None) -> SetRep:
    """{pair(t, j) : j in N}: the t-th column of the pairing grid."""
    return SetRep(lambda n: cantor_unpair(n)[0] == t, name or f"slice:{t}",
                  enum=lambda j: cantor_pair(t, j),
                  rank=lambda n: cantor_unpair(n)[1])


def tuple_partition(index: Sequence[int]) -> SetRep:
    """The cell of N reserved for the tuple ``index``.

    Distinct tuples get disjoint infinite cells; the cells of all tuples
    together cover N.
    """
    t = tuple_code(index)
    return pair_slice(t, f"tuple:{json.dumps(list(index))}")


# -- codes for binary sequences ----------------------------------------------

def seq_code(bits: Sequence[int]) -> int:
    c = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"not a binary digit: {b!r}")
        c = 2 * c + b + 1
    return c


def seq_decode(c: int) -> tuple[int, ...]:
    if c < 0:
        raise ValueError("negative code")
    out = []
    while c:
        c -= 1
        out.append(c & 1)
        c >>= 1
    return tuple(reversed(out))


def code_length(c: int) -> int:
    """Length of the binary sequence with code c."""
    return (c + 1).bit_length() - 1


def code_bits(c: int) -> tuple[int, int]:
    """(length, bits as an integer, most significant first) for code c."""
    length = code_length(c)
    return length, c + 1 - (1 << length)


# -- orbit partition ---------------------------------------------------------

def orbit_depth(f, n: int, depth_budget: int = 4096) -> Optional[int]:
    """The i with n in f^i(N \\ f(N)), or None if the backward orbit never lands there."""
    inv, co = f.inverse, f.coimage
    seen = set()
    x, i = n, 0
    while i <= depth_budget:
        if x in co:
            return i
        if x in seen:
            return None
        seen.add(x)
        y = inv(x)
        if y is None:
            # x in the image of f iff x not in the coimage, so this is a metadata error
            raise ValueError(f"{f.name}: inverse undefined at image point {x}")
        x, i = y, i + 1
    raise WindowError(f"{f.name}: backward orbit of {n} exceeds depth {depth_budget}")


def orbit_partition(f, i: int) -> SetRep:
    """X_i = f^i(X_0) where X_0 = N \\ f(N), as a decidable set."""
    if f.inverse is None or f.coimage is None:
        raise ValueError(f"{f.name}: orbit partition needs inverse and coimage metadata")
    if i < 0:
        raise ValueError("negative index")
    inv, co = f.inverse, f.coimage

    def member(n):
        x = n
        for _ in range(i):
            x = inv(x)
            if x is None:
                return False
        return x in co

    return SetRep(member, f"X{i}({f.name})")


# -- expressions -------------------------------------------------------------

_INT_LIST = re.compile(r"^\[\s*([\w\s,]*)\]$")


def _parse_list(text: str) -> list[int]:
    m = _INT_LIST.match(text.strip())
    if not m:
        raise ValueError(f"expected a list like [1,2,3], got {text!r}")
    out = []
    for tok in m.group(1).split(","):
        tok = tok.strip()
        if not tok:
            continue
        # generator ids like u3 are accepted and mean 3
        digits = tok.lstrip("uUxX")
        out.append(int(digits))
    return out


def resolve_set(expr: str, seed: int = 0) -> SetRep:
    """Build a SetRep from an expression such as ``evens``, ``finite:[1,3]``,
    ``cofinite:[0]``, ``mult:3``, ``tuple:[u0,u1]`` or ``rand``."""
    expr = expr.strip()
    simple = {"evens": evens, "odds": odds, "naturals": naturals, "all": naturals,
              "empty": empty}
    if expr in simple:
        return simple[expr]()
    head, _, rest = expr.partition(":")
    if head == "finite":
        return finite(_parse_list(rest))
    if head == "cofinite":
        return cofinite(_parse_list(rest))
    if head == "mult":
        return multiples(int(rest))
    if head == "tuple":
        return tuple_partition(_parse_list(rest))
    if head == "slice":
        return pair_slice(int(rest))
    if head == "rand":
        return random_set(int(rest) if rest else seed)
    raise KeyError(f"unknown set expression {expr!r}")


def enumerator(s: SetRep) -> NatFn:
    """The increasing enumeration of an infinite set, as a NatFn."""
    if s.enum is None:
        raise ValueError(f"{s.name} has no enumerator")
    return NatFn(s.enum, f"enum[{s.name}]",
                 Meta(injective=PROVED, inverse=lambda n: s.rank(n)))

"""Idempotents s_A, two-valued maps f_A, almost disjoint families, ideals F_n."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .natfn import Meta, NatFn, Prefix, agree_on_prefix, compose, random_binary
from .sets import SetRep, code_bits, empty, intersection, naturals


@dataclass(frozen=True)
class IdealTag:
    """The ideal F_n of maps with at most n image points."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("ideal index must be at least 2")


def s_of(A: SetRep) -> NatFn:
    """s_A: the identity on A, 0 elsewhere."""
    return NatFn(lambda n: n if n in A else 0, f"s[{A.name}]")


def f_of(A: SetRep, polarity: bool = True) -> NatFn:
    """f_A (1 on A, 0 off A); with polarity False, f of the complement."""
    one, zero = (1, 0) if polarity else (0, 1)
    name = f"f[{A.name}]" if polarity else f"f[~{A.name}]"
    return NatFn(lambda n: one if n in A else zero, name, Meta(image_bound=2))


def semilattice_check(A: SetRep, B: SetRep, m: int) -> bool:
    """s_A s_B = s_{A∩B} and s_A s_A = s_A below m."""
    sa, sb = s_of(A), s_of(B)
    ok, _ = agree_on_prefix(compose(sa, sb), s_of(intersection(A, B)), m)
    if not ok:
        return False
    ok, _ = agree_on_prefix(compose(sa, sa), sa, m)
    return ok


def ideal_refute(f_prefix: Prefix | Sequence[int], tag: IdealTag | int) -> bool:
    """True iff the prefix already shows more than n image points.

    False only means the prefix is consistent with membership in F_n.
    """
    n = tag.n if isinstance(tag, IdealTag) else IdealTag(tag).n
    return len(set(f_prefix)) > n


# -- binary paths and branch families ----------------------------------------

class BinaryPath:
    """A map N -> {0,1} read as an infinite branch of the binary tree.

    Keeps the bits read so far packed in one integer so that prefix
    comparisons against long codes stay cheap.
    """

    def __init__(self, fn: NatFn, name: str | None = None):
        self.fn = fn
        self.name = name or fn.name
        self._bits = 0
        self._len = 0

    def bit(self, i: int) -> int:
        b = self.fn(i)
        if b not in (0, 1):
            raise ValueError(f"path {self.name} is not binary at {i}: {b}")
        return b

    def prefix_int(self, length: int) -> int:
        """Bits 0..length-1 as an integer, bit 0 most significant."""
        if length > self._len:
            target = max(length, 2 * self._len)
            n = self._len
            if self.fn.vec is not None:
                chunk = self.fn.vec(np.arange(n, target, dtype=np.int64))
                bad = np.flatnonzero((chunk != 0) & (chunk != 1))
                if bad.size:
                    self.bit(n + int(bad[0]))
                digits = "".join("01"[b] for b in chunk.tolist())
            else:
                digits = "".join("01"[self.bit(i)] for i in range(n, target))
            self._bits = (self._bits << (target - n)) | int(digits, 2)
            self._len = target
        return self._bits >> (self._len - length)

    def code(self, length: int) -> int:
        """Code of the restriction to ``length``."""
        return (1 << length) - 1 + self.prefix_int(length)

    def lcp(self, other: "BinaryPath", bound: int) -> Optional[int]:
        """Length of the longest common prefix, or None if none differ below bound."""
        for i in range(bound):
            if self.bit(i) != other.bit(i):
                return i
        return None


_PATH = re.compile(r"^([01]*)(?:\(([01]+)\))?$")


def path_from_spec(spec: str, seed: int = 0) -> BinaryPath:
    """Parse ``w(p)``: the word w followed by p repeated forever.

    A bare word w means w followed by zeros; ``bits:<s>`` is a pseudo-random path.
    """
    spec = spec.strip()
    if spec.startswith("bits"):
        _, _, s = spec.partition(":")
        return BinaryPath(random_binary(int(s) if s else seed), spec)
    m = _PATH.match(spec)
    if not m:
        raise ValueError(f"bad path {spec!r}; expected e.g. 01(10)")
    head = tuple(int(c) for c in m.group(1))
    period = tuple(int(c) for c in (m.group(2) or "0"))

    def rule(i):
        return head[i] if i < len(head) else period[(i - len(head)) % len(period)]

    def vec(a):
        out = np.empty_like(a)
        inside = a < len(head)
        out[inside] = np.asarray(head, dtype=np.int64)[a[inside]] if head else 0
        out[~inside] = np.asarray(period, dtype=np.int64)[(a[~inside] - len(head)) % len(period)]
        return out

    name = f"{m.group(1)}({''.join(map(str, period))})"
    return BinaryPath(NatFn(rule, name, Meta(image_bound=2), vec=vec), name)


def branch_set(p: BinaryPath) -> SetRep:
    """A_x = {code(x|_n) : n >= 1}."""

    def member(c):
        if c <= 0:
            return False
        length, bits = code_bits(c)
        return p.prefix_int(length) == bits

    return SetRep(member, f"A[{p.name}]", enum=lambda i: p.code(i + 1),
                  rank=lambda c: code_bits(c)[0] - 1)


@dataclass
class ADFamily:
    """Finitely many members of an almost disjoint family.

    ``notes`` maps index pairs to ("exact", size) or ("bounded", count, bound).
    """

    members: list[SetRep]
    paths: list[BinaryPath] | None = None
    notes: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def pair_note(self, i: int, j: int, bound: int = 1 << 16):
        """Intersection size of members i and j.

        For branch families this is the exact lcp length when the paths
        differ below ``bound``; otherwise the count of common members
        below ``bound``.
        """
        key = (min(i, j), max(i, j))
        if self.paths is not None:
            lcp = self.paths[i].lcp(self.paths[j], bound) if i != j else None
            note = ("exact", lcp) if lcp is not None else \
                ("bounded", common_below(self.members[i], self.members[j], bound), bound)
        else:
            note = ("bounded", common_below(self.members[i], self.members[j], bound), bound)
        self.notes[key] = note
        return note

    def f_members(self) -> list[NatFn]:
        """f_C and f_{N\\C} for each member C, then f_N and f_∅."""
        out = []
        for c in self.members:
            out.append(f_of(c))
            out.append(f_of(c, polarity=False))
        out.append(f_of(naturals()))
        out.append(f_of(empty()))
        return out


def common_below(a: SetRep, b: SetRep, bound: int) -> int:
    if a.enum is not None:
        return sum(1 for v in a.members_below(bound) if v in b)
    if b.enum is not None:
        return sum(1 for v in b.members_below(bound) if v in a)
    return sum(1 for n in range(bound) if n in a and n in b)


def branch_family(xs: Sequence[NatFn | BinaryPath]) -> ADFamily:
    paths = [x if isinstance(x, BinaryPath) else BinaryPath(x) for x in xs]
    for p in paths:
        # reject non-binary input early; the full check happens lazily
        for i in range(64):
            p.bit(i)
    return ADFamily([branch_set(p) for p in paths], paths)


def standard_branches(count: int) -> ADFamily:
    """``count`` paths: the binary digits of 0..count-1 padded, then zeros."""
    width = max(1, (count - 1).bit_length())
    specs = [format(b, f"0{width}b") + "(0)" for b in range(count)]
    return branch_family([path_from_spec(s) for s in specs])


def resolve_family(spec: str, seed: int = 0) -> ADFamily:
    """``branch:<count>`` or a comma list of path specs."""
    spec = spec.strip()
    if spec.startswith("branch:"):
        return standard_branches(int(spec.split(":", 1)[1]))
    return branch_family([path_from_spec(s, seed) for s in spec.split(",")])


def s_map_finite(A: set[int] | frozenset[int], n_points: int) -> tuple[int, ...]:
    """Table of s_A restricted to {0, ..., n_points-1}."""
    return tuple(v if v in A else 0 for v in range(n_points))


__all__ = [
    "IdealTag", "s_of", "f_of", "semilattice_check", "ideal_refute",
    "BinaryPath", "path_from_spec", "branch_set", "ADFamily", "common_below",
    "branch_family", "standard_branches", "resolve_family", "s_map_finite",
]

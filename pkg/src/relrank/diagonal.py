"""Words over s-maps, the two-choices classification, and diagonal maps.

"Almost everywhere" claims are checked on a window: the members of a set N
with enumeration index in [skip, skip + length).  Nothing here decides
almost-injectivity or almost-containment for a black-box map; classifications
are either supplied by the caller or found by bounded search and tagged as
such.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .families import ADFamily
from .natfn import Meta, NatFn, compose_all
from .sets import DEFAULT_BUDGET, SetRep, cantor_unpair, tuple_decode, tuple_partition


@dataclass(frozen=True)
class Window:
    skip: int = 64
    length: int = 512

    def members(self, N: SetRep, budget: int = DEFAULT_BUDGET) -> list[int]:
        return N.window(self.skip, self.length, budget)


DEFAULT_WINDOW = Window()


# -- words ---------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """u_m s_{B(m-1)} u_{m-1} ... s_{B(0)} u_0, stored innermost first."""

    us: tuple[NatFn, ...]
    sets: tuple[SetRep, ...] = ()

    def __post_init__(self):
        if not self.us:
            raise ValueError("a word needs at least one map")
        if len(self.sets) != len(self.us) - 1:
            raise ValueError("a word alternates maps and sets, starting and ending with a map")

    @classmethod
    def from_alternating(cls, items: Sequence) -> "Word":
        """From [u_m, B(m-1), u_{m-1}, ..., B(0), u_0] as written."""
        items = list(reversed(items))
        return cls(tuple(items[0::2]), tuple(items[1::2]))

    @property
    def m(self) -> int:
        return len(self.us) - 1

    def __call__(self, n: int) -> int:
        x = self.us[0](n)
        for B, u in zip(self.sets, self.us[1:]):
            x = u(x if x in B else 0)
        return x

    def to_natfn(self) -> NatFn:
        return NatFn(self.__call__, self.name)

    def composite(self, r: int | None = None) -> NatFn:
        """u_r ... u_0 with the s-maps left out."""
        r = self.m if r is None else r
        return compose_all(*reversed(self.us[:r + 1]))

    def split(self, j: int) -> tuple["Word", SetRep, "Word"]:
        """(upper, B(j), lower) with self = upper ∘ s_{B(j)} ∘ lower."""
        if not 0 <= j < self.m:
            raise IndexError(j)
        lower = Word(self.us[:j + 1], self.sets[:j])
        upper = Word(self.us[j + 1:], self.sets[j + 1:])
        return upper, self.sets[j], lower

    @property
    def name(self) -> str:
        parts = [self.us[0].name]
        for B, u in zip(self.sets, self.us[1:]):
            parts.append(f"s[{B.name}]")
            parts.append(u.name)
        return "·".join(reversed(parts))


def eval_word(w: Word, n: int) -> int:
    return w(n)


def words_over(us: Sequence[NatFn], sets: Sequence[SetRep]):
    """Every word u_m s_B ... s_B u_0 with each B drawn from ``sets``."""
    us = tuple(us)
    for choice in itertools.product(sets, repeat=len(us) - 1):
        yield Word(us, tuple(choice))


# -- two choices ------------------------------------------------------------------

@dataclass
class TwoChoices:
    """Result of :func:`two_choices_classify`.

    ``kind`` is "composite", "constant" or "violation".  ``mismatch`` is the
    least j with B(j) different from the assumed A(j), if any;
    ``hypothesis_failures`` lists window points where the assumptions fail.
    """

    kind: str
    value: Optional[int] = None
    witness: Optional[int] = None
    mismatch: Optional[int] = None
    hypothesis_failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value, "witness": self.witness,
                "mismatch": self.mismatch,
                "hypothesis_failures": self.hypothesis_failures[:8]}


def _same_set(a: SetRep, b: SetRep) -> bool:
    return a is b or a.name == b.name


def check_hypotheses(w: Word, assumed: Sequence[SetRep], ns: Sequence[int]) -> list:
    """Window failures of: u_{r-1}...u_0 injective, u_j...u_0(n) in A(j)."""
    out = []
    r = w.m
    for j in range(r):
        c = w.composite(j)
        for n in ns:
            if c(n) not in assumed[j]:
                out.append(("containment", j, n))
                break
    if r >= 1:
        c = w.composite(r - 1)
        seen: dict[int, int] = {}
        for n in ns:
            v = c(n)
            if v in seen:
                out.append(("injectivity", seen[v], n))
                break
            seen[v] = n
    return out


def two_choices_classify(w: Word, assumed: Sequence[SetRep], N: SetRep,
                         window: Window = DEFAULT_WINDOW,
                         budget: int = DEFAULT_BUDGET) -> TwoChoices:
    """Is w|_N equal to u_r...u_0 on the window, or constant there?

    ``assumed`` holds the sets A(0..r-1) into which u_j...u_0(N) is supposed
    to fall.  A violation means the assumptions fail on this window; its
    witness is the first offending member of N.
    """
    if len(assumed) != w.m:
        raise ValueError(f"need {w.m} assumed sets, got {len(assumed)}")
    ns = window.members(N, budget)
    mismatch = next((j for j in range(w.m) if not _same_set(assumed[j], w.sets[j])), None)
    hyp = check_hypotheses(w, assumed, ns)
    if hyp:
        return TwoChoices("violation", witness=hyp[0][-1], mismatch=mismatch,
                          hypothesis_failures=hyp)
    comp = w.composite()
    gv = [w(n) for n in ns]
    first_diff = next((n for n, v in zip(ns, gv) if v != comp(n)), None)
    if first_diff is None:
        return TwoChoices("composite", mismatch=mismatch, hypothesis_failures=hyp)
    if all(v == gv[0] for v in gv):
        return TwoChoices("constant", value=gv[0], mismatch=mismatch, hypothesis_failures=hyp)
    return TwoChoices("violation", witness=first_diff, mismatch=mismatch, hypothesis_failures=hyp)


# -- case witnesses ---------------------------------------------------------------

class InconsistentWitness(ValueError):
    pass


def alternate_subset(N: SetRep, name: str | None = None) -> SetRep:
    """Members of N with even enumeration index: infinite and co-infinite in N."""
    if N.enum is not None:
        enum = N.enum
        return SetRep(lambda n: n in N and N.rank(n) % 2 == 0, name or f"alt[{N.name}]",
                      enum=lambda i: enum(2 * i))
    return SetRep(lambda n: n in N and N.rank(n) % 2 == 0, name or f"alt[{N.name}]")


class _ClassSplit:
    """Alternate separately within the members of N whose image lands in A and
    those whose image does not."""

    def __init__(self, N: SetRep, composite: NatFn, A: SetRep):
        self.N, self.composite, self.A = N, composite, A
        self._flags: list[bool] = []
        self._counts = [0, 0]

    def _extend(self, upto: int) -> None:
        while len(self._flags) <= upto:
            n = self.N.enum(len(self._flags))
            cls = 1 if self.composite(n) in self.A else 0
            self._flags.append(self._counts[cls] % 2 == 0)
            self._counts[cls] += 1

    def __call__(self, n: int) -> bool:
        if n not in self.N:
            return False
        q = self.N.rank(n)
        self._extend(q)
        return self._flags[q]


@dataclass
class CaseWitness:
    """Data for one cell of the diagonal construction.

    ``case`` is "a" (composite not injective: ``pairs`` of colliding points),
    "b" (composite injective through the whole word), "c1" (image splits
    some family set ``A``) or "c2" (image almost disjoint from every family
    set).  ``r`` is the length of the prefix u_r ... u_0 being classified.
    """

    case: str
    N: SetRep
    composite: NatFn
    r: int = 0
    pairs: list[tuple[int, int]] = field(default_factory=list)
    M: Optional[SetRep] = None
    A: Optional[SetRep] = None
    window: Window = DEFAULT_WINDOW
    evidence: str = "supplied"

    def problems(self) -> list[str]:
        out = []
        c = self.composite
        if self.case not in ("a", "b", "c1", "c2"):
            return [f"unknown case {self.case!r}"]
        if self.case == "a":
            if not self.pairs:
                out.append("case a needs colliding pairs")
            used: set[int] = set()
            for m, n in self.pairs:
                if m == n or m in used or n in used:
                    out.append(f"pair ({m},{n}) is not disjoint from the others")
                used |= {m, n}
                if m not in self.N or n not in self.N:
                    out.append(f"pair ({m},{n}) leaves N")
                elif c(m) != c(n):
                    out.append(f"pair ({m},{n}) does not collide")
            return out
        ns = self.window.members(self.N)
        if self.M is None:
            self.M = alternate_subset(self.N)
        if self.case == "b":
            vals = [c(n) for n in ns]
            if len(set(vals)) != len(vals):
                out.append("composite not injective on the window")
        if self.case == "c1":
            if self.A is None:
                return ["case c1 needs the split set A"]
            M, A = self.M, self.A
            for label, part in (("M", [n for n in ns if n in M]),
                                ("N\\M", [n for n in ns if n not in M])):
                inside = sum(1 for n in part if c(n) in A)
                if inside == 0 or inside == len(part):
                    out.append(f"image of {label} does not meet both A and its complement")
        return out


def build_case_f(cw: CaseWitness) -> NatFn:
    """The two-valued map on N: 1 on M, 0 on N \\ M (and 0 off N)."""
    bad = cw.problems()
    if bad:
        raise InconsistentWitness("; ".join(bad))
    if cw.case == "a":
        ones = frozenset(m for m, _ in cw.pairs)
        member: Callable[[int], bool] = ones.__contains__
    else:
        member = cw.M.member
    N = cw.N
    return NatFn(lambda n: 1 if (n in N and member(n)) else 0, f"f[{cw.case}:{N.name}]",
                 Meta(image_bound=2))


def separate_check(f, g, N: SetRep, window: Window = DEFAULT_WINDOW,
                   budget: int = DEFAULT_BUDGET) -> tuple[bool, Optional[int]]:
    """Look for n in the window of N with f(n) != g(n)."""
    for n in window.members(N, budget):
        if f(n) != g(n):
            return True, n
    return False, None


def collision_pairs(c: NatFn, ns: Sequence[int]) -> list[tuple[int, int]]:
    """Disjoint pairs (m, n) from ns with c(m) = c(n), greedily."""
    waiting: dict[int, int] = {}
    pairs = []
    for n in ns:
        v = c(n)
        if v in waiting:
            pairs.append((waiting.pop(v), n))
        else:
            waiting[v] = n
    return pairs


def _injective_on(c: NatFn, ns: Sequence[int]) -> bool:
    vals = [c(n) for n in ns]
    return len(set(vals)) == len(vals)


def classify_cell(us: Sequence[NatFn], members: Sequence[SetRep], N: SetRep,
                  window: Window = DEFAULT_WINDOW, min_hits: int = 4,
                  budget: int = DEFAULT_BUDGET) -> CaseWitness:
    """Bounded-search classification of the cell N for the maps u_0, ..., u_m.

    r is the largest value for which u_{r-1}...u_0 is injective on the
    window and each u_j...u_0 (j < r) maps the window into one family set.
    The result is tagged "bound-assumed".
    """
    us = tuple(us)
    m = len(us) - 1
    ns = window.members(N, budget)
    word = Word(us, tuple(members[:1]) * m if members else ())

    def composite(j):
        return word.composite(j)

    r = 0
    while r < m:
        c = composite(r)
        if not _injective_on(c, ns):
            break
        if not any(all(c(n) in A for n in ns) for A in members):
            break
        r += 1
    c = composite(r)
    common = dict(N=N, composite=c, r=r, window=window, evidence="bound-assumed")
    if not _injective_on(c, ns):
        return CaseWitness("a", pairs=collision_pairs(c, ns), **common)
    if r == m:
        return CaseWitness("b", M=alternate_subset(N), **common)
    for A in members:
        hits = sum(1 for n in ns if c(n) in A)
        if hits >= min_hits and len(ns) - hits >= min_hits:
            return CaseWitness("c1", A=A, M=SetRep(_ClassSplit(N, c, A), f"split[{A.name}]"),
                               **common)
    return CaseWitness("c2", M=alternate_subset(N), **common)


# -- one recursion step of the chain construction -----------------------------------

@dataclass
class Cell:
    i: int
    j: int
    case: int
    tag: str
    U: SetRep
    V: SetRep
    collision: Optional[tuple[int, int]] = None
    C: Optional[str] = None
    hits: int = 0
    separations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "case": self.case, "tag": self.tag,
                "collision": list(self.collision) if self.collision else None,
                "C": self.C, "hits": self.hits, "separations": self.separations}


@dataclass
class FindOneResult:
    f: NatFn
    A: SetRep
    cells: list[Cell]
    window: Window

    @property
    def all_separated(self) -> bool:
        return all(s["index"] is not None for c in self.cells for s in c.separations)

    def to_json(self) -> dict:
        return {"A": self.A.name, "window": [self.window.skip, self.window.length],
                "all_separated": self.all_separated,
                "cells": [c.to_json() for c in self.cells]}


class _HitSplit:
    """Every other member of U whose image under x lands in C."""

    def __init__(self, U: SetRep, x: NatFn, C: SetRep):
        self.U, self.x, self.C = U, x, C
        self._flags: list[Optional[bool]] = []
        self._count = 0

    def __call__(self, n: int) -> bool:
        if n not in self.U:
            return False
        q = self.U.rank(n)
        while len(self._flags) <= q:
            t = len(self._flags)
            if self.x(self.U.enum(t)) in self.C:
                self._flags.append(self._count % 2 == 0)
                self._count += 1
            else:
                self._flags.append(False)
        return bool(self._flags[q])


def _cell_set(A: SetRep, i: int, j: int) -> SetRep:
    index = tuple_partition((i, j))
    enum = A.enum

    def member(n):
        q = A.rank(n)
        return q is not None and q in index

    return SetRep(member, f"U[{i},{j}]", enum=lambda t: enum(index.enum(t)),
                  rank=lambda n: cantor_unpair(A.rank(n))[1])


def _classify_cell(A: SetRep, i: int, j: int, x: NatFn, fam: ADFamily,
                   window: Window, min_hits: int) -> Cell:
    U = _cell_set(A, i, j)
    pts = [U.enum(t) for t in range(window.skip, window.skip + window.length)]
    pair = collision_pairs(x, pts)
    if pair:
        k, l = pair[0]
        V = SetRep(lambda n: n == k, f"V[{i},{j}]", kind="finite", elements=(k,))
        return Cell(i, j, 1, "exact", U, V, collision=(k, l))
    best, best_hits = None, 0
    for C in fam.members:
        hits = sum(1 for n in pts if x(n) in C)
        if hits > best_hits:
            best, best_hits = C, hits
    if best is not None and best_hits >= min_hits:
        V = SetRep(_HitSplit(U, x, best), f"V[{i},{j}]")
        return Cell(i, j, 2, "bound-assumed", U, V, C=best.name, hits=best_hits)
    return Cell(i, j, 3, "bound-assumed", U, alternate_subset(U, f"V[{i},{j}]"), hits=best_hits)


def find_one_f(A: SetRep, fams: Sequence[ADFamily], xs: Sequence[NatFn],
               window: Window = DEFAULT_WINDOW, min_hits: int = 4,
               budget: int = DEFAULT_BUDGET, workers: int = 4) -> FindOneResult:
    """A two-valued f with f^{-1}(1) ⊆ A differing from every g x_i, g in F(fams[j]).

    A is split into cells U[i,j] (A's enumeration restricted to the tuple
    cell of (i, j)).  Per cell: a collision of x_i gives case 1 (exact);
    otherwise a family set C met at least ``min_hits`` times on the window
    gives case 2; otherwise case 3 (both bound-assumed).  f is 0 off A and
    on the cells of index pairs beyond the given lists.  Cells are
    classified concurrently; the report lists them in (i, j) order.
    """
    if A.enum is None:
        raise ValueError(f"{A.name} needs an enumerator")
    xs, fams = tuple(xs), tuple(fams)
    keys = [(i, j) for i in range(len(xs)) for j in range(len(fams))]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        found = list(pool.map(lambda ij: _classify_cell(A, *ij, xs[ij[0]], fams[ij[1]],
                                                        window, min_hits), keys))
    cells: dict[tuple[int, int], Cell] = dict(zip(keys, found))

    def rule(n):
        q = A.rank(n)
        if q is None:
            return 0
        c, _ = cantor_unpair(q)
        key = tuple_decode(c)
        cell = cells.get(key) if len(key) == 2 else None
        return 1 if cell is not None and n in cell.V else 0

    f = NatFn(rule, f"f_B[{A.name}]", Meta(image_bound=2))
    for (i, j), cell in cells.items():
        x = xs[i]
        for g in fams[j].f_members():
            gx = compose_all(g, x)
            found, n = separate_check(f, gx, cell.U, window, budget)
            cell.separations.append({"g": g.name, "index": n,
                                     "t": cell.U.rank(n) if found else None})
    return FindOneResult(f, A, list(cells.values()), window)


__all__ = [
    "Window", "DEFAULT_WINDOW", "Word", "eval_word", "words_over", "TwoChoices",
    "check_hypotheses", "two_choices_classify", "InconsistentWitness",
    "alternate_subset", "CaseWitness", "build_case_f", "separate_check",
    "collision_pairs", "classify_cell", "Cell", "FindOneResult", "find_one_f",
]

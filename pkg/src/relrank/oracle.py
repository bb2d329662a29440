"""Brute-force ground truth on full transformation semigroups of small sets.

Maps on {0, ..., n-1} are tables; ``a * b`` means a after b, matching
:func:`relrank.natfn.compose`.  Saturation runs breadth-first over integer
codes with numpy, so even the 7^7 maps on seven points close in about a
second.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_POINTS = 7


@dataclass(frozen=True, order=True)
class FiniteMap:
    table: tuple[int, ...]

    def __post_init__(self):
        n = len(self.table)
        if any(not 0 <= v < n for v in self.table):
            raise ValueError(f"entries must lie in 0..{n - 1}: {self.table}")

    @property
    def n(self) -> int:
        return len(self.table)

    def __call__(self, i: int) -> int:
        return self.table[i]

    def __mul__(self, other: "FiniteMap") -> "FiniteMap":
        return compose(self, other)

    def image(self) -> frozenset[int]:
        return frozenset(self.table)

    def rank(self) -> int:
        return len(set(self.table))

    def __repr__(self):
        return f"FiniteMap{self.table}"


def fmap(*table: int) -> FiniteMap:
    return FiniteMap(tuple(table))


def compose(a: FiniteMap, b: FiniteMap) -> FiniteMap:
    if a.n != b.n:
        raise ValueError("maps on different domains")
    return FiniteMap(tuple(a.table[v] for v in b.table))


def _common_n(maps: Iterable[FiniteMap]) -> int:
    sizes = {m.n for m in maps}
    if len(sizes) > 1:
        raise ValueError(f"mixed domain sizes {sorted(sizes)}")
    if not sizes:
        raise ValueError("no maps given")
    (n,) = sizes
    if n > MAX_POINTS:
        raise ValueError(f"domain size {n} exceeds the cap of {MAX_POINTS}")
    return n


def _encode(tables: np.ndarray, n: int) -> np.ndarray:
    weights = n ** np.arange(n, dtype=np.int64)
    return tables.astype(np.int64) @ weights


def _decode(codes: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((codes.size, n), dtype=np.int64)
    c = codes.astype(np.int64).copy()
    for i in range(n):
        out[:, i] = c % n
        c //= n
    return out


def saturate_codes(gens: Sequence[FiniteMap]) -> tuple[int, np.ndarray]:
    """Codes of every product of generators, sorted."""
    n = _common_n(gens)
    G = np.array([g.table for g in gens], dtype=np.int64)
    seen = np.zeros(n ** n, dtype=bool)
    codes = np.unique(_encode(G, n))
    seen[codes] = True
    frontier = _decode(codes, n)
    while frontier.size:
        # g ∘ w for every generator g and frontier element w
        prods = G[:, frontier].reshape(-1, n)
        c = np.unique(_encode(prods, n))
        c = c[~seen[c]]
        seen[c] = True
        frontier = _decode(c, n)
    return n, np.flatnonzero(seen)


def saturate(gens: Iterable[FiniteMap]) -> frozenset[FiniteMap]:
    """The subsemigroup generated by ``gens``."""
    gens = list(gens)
    n, codes = saturate_codes(gens)
    return frozenset(FiniteMap(tuple(int(v) for v in row)) for row in _decode(codes, n))


def contains_generated(U: Iterable[FiniteMap], V: Iterable[FiniteMap],
                       C: Iterable[FiniteMap] = ()) -> bool:
    """U ⊆ <V ∪ C>."""
    U, gens = list(U), list(V) + list(C)
    if not U:
        return True
    n = _common_n(U + gens)
    if not gens:
        return False
    _, codes = saturate_codes(gens)
    wanted = _encode(np.array([u.table for u in U], dtype=np.int64), n)
    return bool(np.isin(wanted, codes).all())


def all_maps(n: int) -> list[FiniteMap]:
    return [FiniteMap(t) for t in itertools.product(range(n), repeat=n)]


def maps_of_rank_at_most(n: int, k: int) -> list[FiniteMap]:
    return [FiniteMap(t) for t in itertools.product(range(n), repeat=n) if len(set(t)) <= k]


def ideal_check(n_points: int, k: int, batch_cells: int = 1 << 22) -> bool:
    """Exhaustively: rank(a) <= k implies rank(a b) <= k and rank(b a) <= k."""
    if n_points > 6:
        raise ValueError("ideal check is capped at 6 points")
    n = n_points
    full = np.array(list(itertools.product(range(n), repeat=n)), dtype=np.int64)
    small = full[_ranks(full) <= k]
    step = max(1, batch_cells // (len(full) * n))
    for lo in range(0, len(small), step):
        a = small[lo:lo + step]
        ab = a[:, full]   # [i, f, j] = a_i(b_f(j))
        ba = full[:, a]   # [f, i, j] = b_f(a_i(j))
        if (_ranks(ab.reshape(-1, n)) > k).any() or (_ranks(ba.reshape(-1, n)) > k).any():
            return False
    return True


def _ranks(rows: np.ndarray) -> np.ndarray:
    srt = np.sort(rows, axis=1)
    return 1 + (np.diff(srt, axis=1) != 0).sum(axis=1)


# -- named generators ----------------------------------------------------------

def cycle(n: int) -> FiniteMap:
    return FiniteMap(tuple((i + 1) % n for i in range(n)))


def transposition(n: int) -> FiniteMap:
    t = list(range(n))
    if n >= 2:
        t[0], t[1] = 1, 0
    return FiniteMap(tuple(t))


def const_map(n: int, c: int = 0) -> FiniteMap:
    return FiniteMap((c,) * n)


def collapse(n: int) -> FiniteMap:
    """The rank n-1 idempotent sending 1 to 0."""
    t = list(range(n))
    if n >= 2:
        t[1] = 0
    return FiniteMap(tuple(t))


def full_generators(n: int) -> list[FiniteMap]:
    return [cycle(n), transposition(n), collapse(n)]


def resolve_gens(names: str, n: int) -> list[FiniteMap]:
    """Comma list of ``cyc``, ``transp``, ``const<c>``, ``collapse`` or explicit
    tables like ``[0,0,2]``."""
    out = []
    for raw in _split_top(names):
        name = raw.strip()
        if name == "cyc":
            out.append(cycle(n))
        elif name == "transp":
            out.append(transposition(n))
        elif name == "collapse":
            out.append(collapse(n))
        elif name.startswith("const"):
            out.append(const_map(n, int(name[5:] or 0)))
        elif name.startswith("["):
            out.append(FiniteMap(tuple(int(v) for v in name.strip("[]").split(","))))
        elif name.startswith("rank<="):
            out.extend(maps_of_rank_at_most(n, int(name[6:])))
        elif name == "all":
            out.extend(all_maps(n))
        else:
            raise KeyError(f"unknown generator {name!r}")
    return out


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return parts


def truncate(f, n: int, clamp: bool = False) -> FiniteMap:
    """f restricted to {0, ..., n-1}.

    Values >= n are an error unless ``clamp`` is set, in which case they
    are replaced by n-1.
    """
    vals = [f(i) for i in range(n)]
    if not clamp and any(v >= n for v in vals):
        raise ValueError(f"{getattr(f, 'name', f)} leaves {{0..{n - 1}}}")
    return FiniteMap(tuple(min(v, n - 1) for v in vals))


def ukm_truncate(f, k: int, m: int, n: int) -> FiniteMap:
    """Truncate a member of U(k, m); the domain must contain 0..k+m-1."""
    if n < k + m:
        raise ValueError(f"domain size {n} < k+m = {k + m}: truncation would not be closed")
    return truncate(f, n)


def ukm_finite_members(k: int, m: int, n: int) -> frozenset[FiniteMap]:
    """All maps on n points fixing 0..k-1 and sending the rest into k..k+m-1."""
    if n < k + m:
        raise ValueError("need n >= k+m")
    tails = itertools.product(range(k, k + m), repeat=n - k)
    return frozenset(FiniteMap(tuple(range(k)) + t) for t in tails)

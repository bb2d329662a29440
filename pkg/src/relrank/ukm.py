"""The semigroups U(k, m) and the maps that move one inside another.

U(k, m) is the set of maps fixing 0, ..., k-1 and sending every i >= k into
{k, ..., k+m-1}.  ``ukm_order(k, m, l, n)`` is the arithmetic criterion for
U(k, m) to sit below U(l, n); when it holds, :func:`ukm_embed_maps` gives g, h
with hg = 1 and :func:`ukm_transport` rewrites any f in U(k, m) as h f' g with
f' in U(l, n).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .natfn import Meta, NatFn, PROVED, hash_word, hash_words, prefix


@dataclass(frozen=True)
class UkmParams:
    k: int
    m: int

    def __post_init__(self):
        if self.k < 0 or self.m < 2:
            raise ValueError(f"need k >= 0 and m >= 2, got k={self.k}, m={self.m}")

    def __iter__(self):
        return iter((self.k, self.m))

    def __str__(self):
        return f"U({self.k},{self.m})"


class CriterionError(ValueError):
    """The order criterion m <= n and k+m <= l+n fails."""


def ukm_member(f: NatFn, p: UkmParams, length: int) -> tuple[bool, Optional[int]]:
    """Check membership on the prefix of the given length; returns the first bad index."""
    k, m = p.k, p.m
    if length <= k:
        raise ValueError(f"prefix length {length} must exceed k={k}")
    vals = np.asarray(prefix(f, length).values, dtype=object) if f.vec is None \
        else f.vec(np.arange(length, dtype=np.int64))
    idx = np.arange(length)
    ok = np.where(idx < k, vals == idx, (vals >= k) & (vals < k + m))
    bad = np.flatnonzero(~ok.astype(bool))
    return (True, None) if bad.size == 0 else (False, int(bad[0]))


def ukm_order(k: int, m: int, l: int, n: int) -> bool:
    """Whether U(k, m) lies below U(l, n) in the relative-rank preorder."""
    if m < 2 or n < 2:
        raise ValueError("m and n must be at least 2")
    return m <= n and k + m <= l + n


def ukm_embed_maps(k: int, m: int, l: int, n: int) -> tuple[NatFn, NatFn]:
    """The maps g, h with hg = 1 used to carry U(k, m) into U(l, n).

    h is the identity on the gap k <= i < l+n-m, where any value would do.
    """
    if not ukm_order(k, m, l, n):
        raise CriterionError(f"U({k},{m}) is not below U({l},{n})")
    shift = (l + n) - (k + m)
    start = l + n - m

    def g_rule(i):
        return i if i < k else i + shift

    def h_rule(i):
        return i - shift if i >= start else i

    g = NatFn(g_rule, f"g[{k},{m}->{l},{n}]",
              Meta(injective=PROVED,
                   inverse=lambda j: j if j < k else (j - shift if j >= start else None)),
              vec=lambda a: np.where(a < k, a, a + shift))
    h = NatFn(h_rule, f"h[{k},{m}->{l},{n}]",
              vec=lambda a: np.where(a >= start, a - shift, a))
    return g, h


def ukm_transport(f: NatFn, k: int, m: int, l: int, n: int,
                  check_len: int = 1024) -> NatFn:
    """f' with f' = 1 below l+n-m and f' = g f h above, so that f = h f' g.

    Raises if the criterion fails or f is not in U(k, m) on the first
    ``check_len`` points.
    """
    g, h = ukm_embed_maps(k, m, l, n)
    ok, bad = ukm_member(f, UkmParams(k, m), max(check_len, k + 1))
    if not ok:
        raise ValueError(f"{f.name} is not in U({k},{m}): fails at {bad}")
    start = l + n - m

    def rule(i):
        return i if i < start else g(f(h(i)))

    vec = None
    if f.vec is not None:
        fv, gv, hv = f.vec, g.vec, h.vec

        def vec(a):
            out = a.copy()
            hi = a >= start
            out[hi] = gv(fv(hv(a[hi])))
            return out

    return NatFn(rule, f"{f.name}'", vec=vec)


def ukm_sample(p: UkmParams, seed: int) -> NatFn:
    """A pseudo-random member of U(k, m)."""
    k, m = p.k, p.m

    def rule(i):
        return i if i < k else k + hash_word(seed, i) % m

    def vec(a):
        r = (hash_words(seed, a) % np.uint64(m)).astype(np.int64) + k
        return np.where(a < k, a, r)

    return NatFn(rule, f"u{p.k},{p.m}#{seed}", Meta(image_bound=k + m), vec=vec)


def ukm_floor(p: UkmParams) -> NatFn:
    """i -> i below k, i -> k above: the smallest member."""
    k = p.k
    return NatFn(lambda i: i if i < k else k, f"floor{p}", Meta(image_bound=k + 1),
                 vec=lambda a: np.minimum(a, k))


def antichain(i: int) -> tuple[list[UkmParams], list[list[bool]]]:
    """U(0, i+1), U(2, i), ..., U(2i-2, 2) and their comparability matrix."""
    if i < 1:
        raise ValueError("antichain length must be at least 1")
    params = [UkmParams(2 * j, i + 1 - j) for j in range(i)]
    matrix = [[ukm_order(p.k, p.m, q.k, q.m) for q in params] for p in params]
    return params, matrix


def admissible_quadruples(max_kl: int = 6, max_mn: int = 6):
    """All (k, m, l, n) with k, l <= max_kl, 2 <= m, n <= max_mn satisfying the criterion."""
    for k, l in itertools.product(range(max_kl + 1), repeat=2):
        for m, n in itertools.product(range(2, max_mn + 1), repeat=2):
            if ukm_order(k, m, l, n):
                yield k, m, l, n

"""Banach's two-generator construction and the zero factorization.

:func:`banach_h` takes an injective ``f`` whose coimage N \\ f(N) is infinite
and finitely many targets g_1, ..., g_r, and builds ``h`` with
``g_i = h h f^i h f`` for every i.  :func:`zero_family` factors any list of
maps as ``u = k g h`` through maps g whose pairwise products are all the
constant 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .natfn import Evidence, Meta, NatFn, PROVED
from .sets import SetRep, cantor_pair, cantor_unpair, odds, orbit_depth

DEFAULT_REST_PROBE = 1024


def _apply(f: NatFn, x: int, times: int) -> int:
    for _ in range(times):
        x = f(x)
    return x


def _unapply(f: NatFn, x: int, times: int) -> int:
    inv = f.inverse
    for _ in range(times):
        y = inv(x)
        if y is None:
            raise ValueError(f"{f.name}: {x} is not in the image")
        x = y
    return x


@dataclass
class BanachData:
    f: NatFn
    gs: tuple[NatFn, ...]
    h: NatFn
    # N \ (X_0 ∪ X_1 ∪ ...), sorted; h maps it in order onto X_{0,0}
    rest: tuple[int, ...]
    rest_evidence: Evidence
    partition: dict = field(default_factory=dict)

    def g(self, i: int) -> NatFn:
        if not 1 <= i <= len(self.gs):
            raise IndexError(f"target index {i} outside 1..{len(self.gs)}")
        return self.gs[i - 1]

    def block_of(self, n: int) -> Optional[int]:
        """The i with n in X_{0,i}, or None if n is outside X_0."""
        co = self.f.coimage
        if n not in co:
            return None
        return self._block(co.rank(n))[0]

    def _block(self, j: int) -> tuple[int, int]:
        r = len(self.rest)
        if j < r:
            return 0, j
        a, t = cantor_unpair(j - r)
        return a + 1, t

    def _unblock(self, i: int, t: int) -> int:
        return t if i == 0 else len(self.rest) + cantor_pair(i - 1, t)

    def region(self, n: int) -> tuple[str, int]:
        """Which piece of the tiling n lies in.

        Returns ("rest", 0), ("orbit", i) for n in X_i with i >= 1, or
        ("block", i) for n in X_{0,i}.
        """
        i = self.block_of(n)
        if i is not None:
            return "block", i
        depth = orbit_depth(self.f, n)
        if depth is None:
            return "rest", 0
        return "orbit", depth


def _compute_rest(f: NatFn, probe: int) -> tuple[int, ...]:
    return tuple(n for n in range(probe) if orbit_depth(f, n) is None)


def banach_h(f: NatFn, gs: Sequence[NatFn], rest: Sequence[int] | None = None,
             rest_probe: int = DEFAULT_REST_PROBE) -> BanachData:
    """Build h with g_i = h^2 f^i h f for every given target (g_1 = gs[0]).

    The coimage X_0 of f is read through its enumerator e_0 < e_1 < ...;
    X_{0,0} = {e_j : j < |rest|} and, for j >= |rest|, e_j belongs to
    X_{0,a+1} where (a, t) = unpair(j - |rest|).  ``rest`` is the set of
    points whose backward f-orbit never reaches X_0; when not given it is
    searched for below ``rest_probe`` and must then be finite in practice.
    """
    m = f.meta
    if m.inverse is None or m.coimage is None or getattr(m.coimage, "enum", None) is None:
        raise ValueError(f"{f.name}: needs inverse and an enumerable coimage")
    if m.injective is None:
        raise ValueError(f"{f.name}: not known to be injective")
    gs = tuple(gs)
    if not gs:
        raise ValueError("need at least one target")
    if rest is None:
        rest_t = _compute_rest(f, rest_probe)
        evidence = Evidence("checked", rest_probe)
    else:
        rest_t = tuple(sorted(set(rest)))
        evidence = PROVED
    rest_index = {v: q for q, v in enumerate(rest_t)}
    co: SetRep = m.coimage
    e = co.enum

    data = BanachData(f, gs, None, rest_t, evidence)  # type: ignore[arg-type]

    def h_off_coimage(n: int) -> int:
        # h on N \ X_0: rest -> X_{0,0} in order, X_i -> X_{0,i} by coimage index
        depth = orbit_depth(f, n)
        if depth is None:
            if n not in rest_index:
                raise ValueError(f"{n} has no backward orbit into X_0 but is not in rest")
            return e(rest_index[n])
        t = co.rank(_unapply(f, n, depth))
        return e(data._unblock(depth, t))

    def h_inverse_off_coimage(x: int) -> int:
        # inverse of h_off_coimage; x in X_0
        i, t = data._block(co.rank(x))
        if i == 0:
            return rest_t[t]
        return _apply(f, e(t), i)

    def rule(n: int) -> int:
        if n not in co:
            return h_off_coimage(n)
        i, t = data._block(co.rank(n))
        if i == 0 or i > len(gs):
            return 0
        # n = h f^i h f (x): peel h, f^i, h, f off in turn
        y = h_inverse_off_coimage(e(t))
        x = f.inverse(y)
        return gs[i - 1](x)

    data.h = NatFn(rule, f"banach_h({f.name})")
    data.partition = {
        "coimage": co.name,
        "rest": list(rest_t),
        "rest_evidence": str(evidence),
        "block_0": f"first {len(rest_t)} coimage elements",
        "block_i": f"e_j with unpair(j-{len(rest_t)}) = (i-1, t)",
        "h_on_block_0": "constant 0",
    }
    return data


def banach_word(d: BanachData, i: int, n: int) -> int:
    """h(h(f^i(h(f(n)))))."""
    f, h = d.f, d.h
    return h(h(_apply(f, h(f(n)), i)))


def verify_banach(d: BanachData, i: int, m: int) -> tuple[bool, Optional[int]]:
    """Check g_i(n) = h^2 f^i h f(n) for n < m; returns the first counterexample."""
    g = d.g(i)
    for n in range(m):
        if g(n) != banach_word(d, i, n):
            return False, n
    return True, None


# -- zero factorization -------------------------------------------------------

@dataclass
class ZeroFamilyData:
    us: tuple[NatFn, ...]
    h: NatFn
    k: NatFn
    gs: tuple[NatFn, ...]
    X: SetRep


def _k_rule(n: int) -> int:
    return n // 2 if n % 2 == 0 else 0


def _k_vec(a):
    return np.where(a % 2 == 0, a // 2, 0)


def _g_from(u: NatFn, idx: int) -> NatFn:
    def rule(n):
        return 2 * u((n - 1) // 2) if n % 2 else 0

    vec = None
    if u.vec is not None:
        uv = u.vec

        def vec(a):
            odd = a % 2 == 1
            out = np.zeros_like(a)
            out[odd] = 2 * uv((a[odd] - 1) // 2)
            return out

    return NatFn(rule, f"g[{idx}]", vec=vec)


def zero_family(us: Sequence[NatFn]) -> ZeroFamilyData:
    """Factor each u as k g h with g g' = 0 for all pairs.

    X = odds, h(n) = 2n+1 (a bijection N -> X), k(2n) = n and k(odd) = 0, and
    g(2m+1) = 2 u(m), g(even) = 0.
    """
    h = NatFn(lambda n: 2 * n + 1, "h_odd",
              Meta(injective=PROVED,
                   inverse=lambda n: (n - 1) // 2 if n % 2 else None),
              vec=lambda a: 2 * a + 1)
    k = NatFn(_k_rule, "k_half", vec=_k_vec)
    us = tuple(us)
    gs = tuple(_g_from(u, a) for a, u in enumerate(us))
    return ZeroFamilyData(us, h, k, gs, odds())

"""Check results, run reports and the per-module invariant suites behind ``verify all``."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import families, natfn, oracle, sets, sierpinski, ukm
from .diagonal import Word, find_one_f, two_choices_classify
from .perfect import branch_family_tree, color_and_check, kernel_case2

SCHEMA = "1"
VERDICTS = ("pass", "fail", "inconclusive")


@dataclass
class CheckResult:
    name: str
    verdict: str
    bound: Any = None
    witness: Any = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "bound": self.bound,
                "witness": self.witness}


def outcome(name: str, ok: bool, bound=None, witness=None) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", bound, None if ok else witness)


@dataclass
class RunReport:
    command: list[str]
    parameters: dict
    checks: list[CheckResult] = field(default_factory=list)
    result: dict = field(default_factory=dict)
    wall_time: Optional[float] = None

    @property
    def failed(self) -> bool:
        return any(c.verdict == "fail" for c in self.checks)

    @property
    def inconclusive(self) -> bool:
        return any(c.verdict == "inconclusive" for c in self.checks)

    @property
    def status(self) -> str:
        return "fail" if self.failed else ("inconclusive" if self.inconclusive else "pass")

    def to_json(self) -> dict:
        out = {"schema": SCHEMA, "command": self.command, "parameters": self.parameters,
               "status": self.status, "inconclusive": self.inconclusive,
               "checks": [c.to_json() for c in self.checks], "result": self.result}
        if self.wall_time is not None:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False, default=_jsonable)

    def table(self) -> str:
        lines = [f"{' '.join(self.command)}  [{self.status}]"]
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            row = f"  {c.name:<{width}}  {c.verdict:<12}"
            if c.bound is not None:
                row += f"  bound={c.bound}"
            if c.witness is not None:
                row += f"  witness={json.dumps(c.witness, ensure_ascii=False, default=_jsonable)}"
            lines.append(row)
        for k, v in self.result.items():
            lines.append(f"  {k}: {json.dumps(v, ensure_ascii=False, default=_jsonable)}")
        if self.wall_time is not None:
            lines.append(f"  wall_time: {self.wall_time:.3f}s")
        return "\n".join(lines)


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (set, frozenset, tuple)):
        return sorted(o) if isinstance(o, (set, frozenset)) else list(o)
    if isinstance(o, oracle.FiniteMap):
        return list(o.table)
    raise TypeError(f"not serializable: {type(o).__name__}")


# -- suites -----------------------------------------------------------------------
# Each suite takes (prefix_len, seed, budget) and returns a list of CheckResult.
# Everything random is derived from the seed, so reruns are identical.

def natfn_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    rng = random.Random(seed)
    fs = [natfn.random_fn(rng.randrange(1 << 30), m) for _ in range(3)]
    a, b, c = fs
    left = natfn.compose(natfn.compose(a, b), c)
    right = natfn.compose(a, natfn.compose(b, c))
    ok, idx = natfn.agree_on_prefix(left, right, m)
    out = [outcome("natfn.compose_associative", ok, m, idx)]
    ok, idx = natfn.agree_on_prefix(natfn.power(a, 0), natfn.identity(), m)
    out.append(outcome("natfn.power_zero_is_identity", ok, m, idx))
    ok, idx = natfn.agree_on_prefix(natfn.power(a, 3), natfn.compose_all(a, a, a), m)
    out.append(outcome("natfn.power_matches_composition", ok, m, idx))
    p = natfn.prefix(a, m)
    out.append(outcome("natfn.prefix_json_roundtrip", natfn.Prefix.from_json(p.to_json()) == p, m))
    s0 = rng.randrange(1 << 30)
    twin = natfn.prefix(natfn.random_fn(s0, m), m)
    out.append(outcome("natfn.reproducible", natfn.prefix(natfn.random_fn(s0, m), m) == twin, m))
    vec_vals = a.vec(np.arange(m, dtype=np.int64)).tolist()
    bad = next((i for i in range(m) if vec_vals[i] != a.rule(i)), None)
    out.append(outcome("natfn.vector_path_matches", bad is None, m, bad))
    return out


def sets_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    rng = random.Random(seed)
    bad = next((z for z in range(m) if sets.cantor_pair(*sets.cantor_unpair(z)) != z), None)
    out = [outcome("sets.pairing_roundtrip", bad is None, m, bad)]
    tuples = [tuple(rng.randrange(20) for _ in range(rng.randrange(5))) for _ in range(64)]
    bad = next((t for t in tuples if sets.tuple_decode(sets.tuple_code(t)) != t), None)
    out.append(outcome("sets.tuple_code_roundtrip", bad is None, 64, bad))
    bad = next((c for c in range(m) if sets.tuple_code(sets.tuple_decode(c)) != c), None)
    out.append(outcome("sets.tuple_code_onto", bad is None, m, bad))
    bad = next((c for c in range(m) if sets.seq_code(sets.seq_decode(c)) != c), None)
    out.append(outcome("sets.seq_code_roundtrip", bad is None, m, bad))
    # every n < m lies in exactly one column of the pairing grid
    cells = [sets.tuple_partition((i,)) for i in range(4)] + [sets.tuple_partition(())]
    counts = [sum(1 for c in cells if n in c) for n in range(m)]
    ok = all(k <= 1 for k in counts)
    out.append(outcome("sets.partition_disjoint", ok, m,
                       None if ok else next(n for n, k in enumerate(counts) if k > 1)))
    # orbit partition of doubling: every positive n is 2^i times an odd number
    f = natfn.double()
    bad = next((n for n in range(1, m)
                if n not in sets.orbit_partition(f, (n & -n).bit_length() - 1)), None)
    out.append(outcome("sets.orbit_partition_double", bad is None, m, bad))
    return out


def sierpinski_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    rng = random.Random(seed)
    gs = [natfn.random_fn(rng.randrange(1 << 30), 100) for _ in range(3)]
    d = sierpinski.banach_h(natfn.double(), gs)
    out = []
    for i in range(1, len(gs) + 1):
        ok, n = sierpinski.verify_banach(d, i, m)
        out.append(outcome(f"sierpinski.banach_g{i}", ok, m, n))
    us = [natfn.random_fn(rng.randrange(1 << 30), 1000) for _ in range(4)]
    z = sierpinski.zero_family(us)
    a = np.arange(m, dtype=np.int64)
    hv = z.h.vec(a)
    bad = None
    for idx, (u, g) in enumerate(zip(z.us, z.gs)):
        diff = np.flatnonzero(z.k.vec(g.vec(hv)) != u.vec(a))
        if diff.size:
            bad = [idx, int(diff[0])]
            break
    out.append(outcome("sierpinski.zero_factorization", bad is None, m, bad))
    bad = None
    for i, g in enumerate(z.gs):
        for j, g2 in enumerate(z.gs):
            nz = np.flatnonzero(g.vec(g2.vec(a)) != 0)
            if nz.size and bad is None:
                bad = [i, j, int(nz[0])]
    out.append(outcome("sierpinski.zero_products", bad is None, m, bad))
    return out


def families_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    rng = random.Random(seed)
    bad = None
    for t in range(8):
        A = sets.random_set(rng.randrange(1 << 30))
        B = sets.random_set(rng.randrange(1 << 30))
        if not families.semilattice_check(A, B, m) and bad is None:
            bad = t
    out = [outcome("families.semilattice", bad is None, m, bad)]
    bad = None
    bound = min(budget, 1 << 12)
    for t in range(3):
        x = families.path_from_spec(f"bits:{rng.randrange(1 << 30)}")
        y = families.path_from_spec(f"bits:{rng.randrange(1 << 30)}")
        lcp = x.lcp(y, bound)
        size = families.common_below(families.branch_set(x), families.branch_set(y), bound)
        if lcp is not None and size != lcp and bad is None:
            bad = {"pair": t, "lcp": lcp, "common": size}
    out.append(outcome("families.branch_intersection_is_lcp", bad is None, bound, bad))
    fam = families.standard_branches(4)
    sizes = [fam.pair_note(i, j, bound) for i in range(4) for j in range(i + 1, 4)]
    ok = all(n[0] == "exact" for n in sizes)
    out.append(outcome("families.standard_branches_almost_disjoint", ok, bound, sizes))
    out.append(outcome("families.ideal_refute", families.ideal_refute([0, 1, 2], 2)
                       and not families.ideal_refute([0, 1, 1, 0], 2), 4))
    return out


def ukm_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    rng = random.Random(seed)
    quads = list(ukm.admissible_quadruples(4, 4))
    chosen = rng.sample(quads, 5)
    a = np.arange(m, dtype=np.int64)
    bad = None
    for k, mm, l, n in chosen:
        g, h = ukm.ukm_embed_maps(k, mm, l, n)
        if (h.vec(g.vec(a)) != a).any():
            bad = {"quad": [k, mm, l, n], "check": "hg"}
            break
        f = ukm.ukm_sample(ukm.UkmParams(k, mm), rng.randrange(1 << 30))
        fp = ukm.ukm_transport(f, k, mm, l, n, check_len=m)
        if (h.vec(fp.vec(g.vec(a))) != f.vec(a)).any():
            bad = {"quad": [k, mm, l, n], "check": "f = h f' g"}
            break
        ok, idx = ukm.ukm_member(fp, ukm.UkmParams(l, n), m)
        if not ok:
            bad = {"quad": [k, mm, l, n], "check": "f' membership", "index": idx}
            break
    out = [outcome("ukm.transport", bad is None, m, bad)]
    bad = None
    for i in range(1, 7):
        _, mat = ukm.antichain(i)
        for p in range(i):
            for q in range(i):
                if mat[p][q] != (p == q) and bad is None:
                    bad = [i, p, q]
    out.append(outcome("ukm.antichain", bad is None, 6, bad))
    return out


def perfect_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    tree = branch_family_tree()
    kd = kernel_case2(tree, 6, budget)
    bad = kd.violations(tree)
    out = [outcome("perfect.kernel_invariants", not bad, 6, bad)]
    _, injective, colored = color_and_check(kd, tree)
    out.append(outcome("perfect.coloring_injective", injective, 6))
    out.append(outcome("perfect.branch_count", len({tuple(c) for c in colored}) == 64, 6))
    return out


def diagonal_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    rng = random.Random(seed)
    pool = [sets.evens(), sets.odds(), sets.naturals(), sets.multiples(3)]
    bad = None
    for t in range(6):
        us = [natfn.random_fn(rng.randrange(1 << 30), 64) for _ in range(4)]
        w = Word(tuple(us), tuple(rng.choice(pool) for _ in range(3)))
        j = rng.randrange(3)
        upper, B, lower = w.split(j)
        for n in range(min(m, 1000)):
            y = lower(n)
            if upper(y if y in B else 0) != w(n):
                bad = {"word": t, "split": j, "n": n}
                break
        if bad:
            break
    out = [outcome("diagonal.word_split", bad is None, min(m, 1000), bad)]
    w = Word.from_alternating([natfn.identity(), sets.evens(), natfn.double()])
    tc = two_choices_classify(w, [sets.evens()], sets.naturals())
    out.append(outcome("diagonal.two_choices_composite", tc.kind == "composite", 576, tc.to_json()))
    A = sets.evens()
    xs = [natfn.identity(), natfn.constant(0)]
    res = find_one_f(A, [families.standard_branches(4)], xs)
    bad = next((n for n in range(m) if res.f(n) not in (0, 1) or (res.f(n) and n not in A)), None)
    out.append(outcome("diagonal.support_in_A", bad is None, m, bad))
    missing = [[c.i, c.j, s["g"]] for c in res.cells for s in c.separations if s["index"] is None]
    out.append(outcome("diagonal.separation", not missing, 576, missing))
    return out


def oracle_suite(m: int, seed: int, budget: int) -> list[CheckResult]:
    sat = oracle.saturate(oracle.maps_of_rank_at_most(3, 2))
    surj = [f for f in sat if f.rank() == 3]
    out = [outcome("oracle.rank2_closure", len(sat) == 21 and not surj, 3,
                   {"size": len(sat), "surjections": len(surj)})]
    out.append(outcome("oracle.ideal_3_2", oracle.ideal_check(3, 2), 3))
    out.append(outcome("oracle.ideal_4_2", oracle.ideal_check(4, 2), 4))
    # s-maps on 5 points: s_A s_B = s_{A ∩ B} for all A, B within {1..4}
    subsets = [frozenset(s) for r in range(5) for s in itertools.combinations(range(1, 5), r)]
    bad = None
    for A in subsets:
        for B in subsets:
            sa = oracle.FiniteMap(families.s_map_finite(A, 5))
            sb = oracle.FiniteMap(families.s_map_finite(B, 5))
            if sa * sb != oracle.FiniteMap(families.s_map_finite(A & B, 5)) and bad is None:
                bad = [sorted(A), sorted(B)]
    out.append(outcome("oracle.s_map_semilattice", bad is None, 5, bad))
    members = oracle.ukm_finite_members(1, 2, 4)
    out.append(outcome("oracle.ukm_closed", oracle.saturate(members) == members, 4))
    return out


SUITES: dict[str, Callable[[int, int, int], list[CheckResult]]] = {
    "natfn": natfn_suite,
    "sets": sets_suite,
    "sierpinski": sierpinski_suite,
    "families": families_suite,
    "ukm": ukm_suite,
    "perfect": perfect_suite,
    "diagonal": diagonal_suite,
    "oracle": oracle_suite,
}


def verify_all(prefix_len: int = natfn.DEFAULT_PREFIX_LEN, seed: int = 0,
               budget: int = sets.DEFAULT_BUDGET) -> list[CheckResult]:
    out = []
    for name in SUITES:
        out.extend(SUITES[name](prefix_len, seed, budget))
    return out

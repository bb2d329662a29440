"""Command line entry point: ``relrank <group> <command> [options]``.

Every command prints one report (JSON or a plain table).  Exit status is 0
when no check failed (inconclusive checks are flagged but still exit 0),
1 when a check failed and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from typing import Callable, Optional, Sequence

import numpy as np

from . import checks, families, natfn, oracle, perfect, sets, sierpinski, ukm
from .checks import CheckResult, RunReport, outcome
from .diagonal import (Window, Word, build_case_f, classify_cell, find_one_f, separate_check,
                       two_choices_classify)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _names(text: str) -> list[str]:
    """Split a comma list, leaving commas inside [...] alone."""
    return [t.strip() for t in re.split(r",(?![^\[]*\])", text) if t.strip()]


def _fns(text: str, seed: int) -> list[natfn.NatFn]:
    return [natfn.resolve(k, seed) for k in _names(text)]


# -- construct ----------------------------------------------------------------------

def cmd_banach(a) -> tuple[list[CheckResult], dict]:
    f = natfn.resolve(a.f, a.seed)
    if a.g:
        gs = _fns(a.g, a.seed)
    else:
        rng = np.random.default_rng(a.seed)
        gs = [natfn.random_fn(int(s), a.bound) for s in rng.integers(0, 1 << 30, a.count)]
    d = sierpinski.banach_h(f, gs)
    out = []
    for i in range(1, len(gs) + 1):
        ok, n = sierpinski.verify_banach(d, i, a.prefix_len)
        out.append(outcome(f"g{i} = h h f^{i} h f", ok, a.prefix_len,
                           None if ok else {"n": n, "g": d.g(i)(n), "word": sierpinski.banach_word(d, i, n)}))
    result = {"f": f.name, "targets": [g.name for g in gs], "partition": d.partition,
              "h_prefix": list(natfn.prefix(d.h, min(a.show, a.prefix_len)).values)}
    return out, result


def cmd_zerofamily(a):
    if a.us:
        us = _fns(a.us, a.seed)
    else:
        rng = np.random.default_rng(a.seed)
        us = [natfn.random_fn(int(s), a.bound) for s in rng.integers(0, 1 << 30, a.count)]
    z = sierpinski.zero_family(us)
    m = a.prefix_len
    out = []
    for i, (u, g) in enumerate(zip(z.us, z.gs)):
        bad = next((n for n in range(m) if z.k(g(z.h(n))) != u(n)), None)
        out.append(outcome(f"u{i} = k g{i} h", bad is None, m, bad))
    bad = next(([i, j, n] for i, g in enumerate(z.gs) for j, g2 in enumerate(z.gs)
                for n in range(m) if g(g2(n)) != 0), None)
    out.append(outcome("g_i g_j = 0 for all pairs", bad is None, m, bad))
    return out, {"us": [u.name for u in us], "X": z.X.name}


# -- ukm ------------------------------------------------------------------------------

def _quad(a):
    return a.k, a.m, a.l, a.n


def cmd_ukm_order(a):
    below = ukm.ukm_order(*_quad(a))
    return [], {"below": below, "criterion": "m <= n and k+m <= l+n"}


def cmd_ukm_embed(a):
    g, h = ukm.ukm_embed_maps(*_quad(a))
    ar = np.arange(a.prefix_len, dtype=np.int64)
    bad = np.flatnonzero(h.vec(g.vec(ar)) != ar)
    show = min(a.show, a.prefix_len)
    return ([outcome("h g = 1", bad.size == 0, a.prefix_len, int(bad[0]) if bad.size else None)],
            {"g": g.vec(ar[:show]).tolist(), "h": h.vec(ar[:show]).tolist()})


def cmd_ukm_transport(a):
    k, m, l, n = _quad(a)
    g, h = ukm.ukm_embed_maps(k, m, l, n)
    length = a.verify_len or a.prefix_len
    ar = np.arange(length, dtype=np.int64)
    rng = np.random.default_rng(a.seed)
    bad_hg = np.flatnonzero(h.vec(g.vec(ar)) != ar)
    out = [outcome("h g = 1", bad_hg.size == 0, length, int(bad_hg[0]) if bad_hg.size else None)]
    fact, memb = None, None
    for s in rng.integers(0, 1 << 30, a.samples):
        f = ukm.ukm_sample(ukm.UkmParams(k, m), int(s))
        fp = ukm.ukm_transport(f, k, m, l, n, check_len=length)
        diff = np.flatnonzero(h.vec(fp.vec(g.vec(ar))) != f.vec(ar))
        if diff.size and fact is None:
            fact = {"f": f.name, "n": int(diff[0])}
        ok, idx = ukm.ukm_member(fp, ukm.UkmParams(l, n), length)
        if not ok and memb is None:
            memb = {"f": f.name, "n": idx}
    out.append(outcome("f = h f' g", fact is None, length, fact))
    out.append(outcome(f"f' in U({l},{n})", memb is None, length, memb))
    return out, {"samples": a.samples}


def cmd_ukm_antichain(a):
    params, mat = ukm.antichain(a.i)
    out = []
    for p in range(a.i):
        for q in range(a.i):
            if p != q:
                out.append(outcome(f"{params[p]} not below {params[q]}", not mat[p][q]))
    return out, {"params": [[p.k, p.m] for p in params], "matrix": mat}


# -- family ---------------------------------------------------------------------------

def cmd_family_branch(a):
    fam = families.resolve_family(a.paths, a.seed)
    bound = min(a.bound, a.budget)
    pairs = {}
    out = []
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            note = fam.pair_note(i, j, bound)
            pairs[f"{i},{j}"] = list(note)
            out.append(CheckResult(f"|A{i} & A{j}| finite", "pass" if note[0] == "exact"
                                   else "inconclusive", bound))
    return out, {"members": [m.name for m in fam.members], "intersections": pairs}


def cmd_family_check(a):
    fam = families.resolve_family(a.paths, a.seed)
    i, j = a.pair
    if not (0 <= i < len(fam) and 0 <= j < len(fam)) or i == j:
        raise UsageError(f"pair must name two distinct members among 0..{len(fam) - 1}")
    note = fam.pair_note(i, j, a.bound)
    common = families.common_below(fam[i], fam[j], a.bound)
    if note[0] == "exact":
        check = outcome("intersection equals lcp", common == note[1], a.bound,
                        {"lcp": note[1], "common": common})
    else:
        check = CheckResult("intersection equals lcp", "inconclusive", a.bound)
    return [check], {"note": list(note), "common_below_bound": common}


# -- perfect ----------------------------------------------------------------------------

def cmd_perfect_kernel(a):
    tree = perfect.resolve_tree(a.tree)
    try:
        if a.case == "1":
            if a.a is None:
                raise UsageError("--case 1 needs --a")
            x0 = tuple(int(v) for v in _names(a.x0)) if a.x0 else ()
            kd = perfect.kernel_case1(tree, a.a, x0, a.depth, a.budget)
        else:
            kd = perfect.kernel_case2(tree, a.depth, a.budget)
    except perfect.BudgetExhausted as e:
        return ([CheckResult("kernel construction", "inconclusive", a.budget,
                             {"node": list(e.node), "message": str(e)})], {"tree": tree.name})
    bad = kd.violations(tree)
    out = [outcome("iota ranges disjoint and sigma extends", not bad, a.depth, bad)]
    result = {"tree": tree.name, "kernel": kd.to_json()}
    if not bad:
        _, injective, colored = perfect.color_and_check(kd, tree)
        out.append(outcome("coloring injective on branches", injective, 2 ** a.depth))
        result["branches"] = len(colored)
    return out, result


# -- diagonal ---------------------------------------------------------------------------

def _window(a) -> Window:
    return Window(a.skip, a.len)


def _parse_word(text: str, seed: int) -> Word:
    items = _names(text)
    if len(items) % 2 == 0:
        raise UsageError("a word alternates maps and sets: u_m,B,u_(m-1),...,B,u_0")
    return Word.from_alternating([natfn.resolve(t, seed) if i % 2 == 0 else sets.resolve_set(t, seed)
                                  for i, t in enumerate(items)])


def cmd_twochoices(a):
    w = _parse_word(a.word, a.seed)
    assumed = [sets.resolve_set(t, a.seed) for t in _names(a.assumed)] if a.assumed else []
    N = sets.resolve_set(a.N, a.seed)
    tc = two_choices_classify(w, assumed, N, _window(a), a.budget)
    check = CheckResult("hypotheses hold on window",
                        "fail" if tc.kind == "violation" else "pass",
                        [a.skip, a.len], tc.witness if tc.kind == "violation" else None)
    return [check], {"word": w.name, "classification": tc.to_json()}


def cmd_case(a):
    N = sets.resolve_set(a.N, a.seed)
    us = _fns(a.us, a.seed)
    fam = families.resolve_family(a.family, a.seed)
    win = _window(a)
    cw = classify_cell(us, fam.members, N, win, budget=a.budget)
    f = build_case_f(cw)
    out = []
    rivals: list[tuple[str, Callable[[int], int]]] = [(cw.composite.name, cw.composite),
                                                       ("const0", natfn.constant(0)),
                                                       ("const1", natfn.constant(1))]
    for name, g in rivals:
        found, n = separate_check(f, g, N, win, a.budget)
        out.append(CheckResult(f"f differs from {name}", "pass" if found else "inconclusive",
                               [a.skip, a.len], n))
    result = {"case": cw.case, "r": cw.r, "evidence": cw.evidence,
              "pairs": [list(p) for p in cw.pairs[:8]], "A": cw.A.name if cw.A else None}
    return out, result


def cmd_findone(a):
    A = sets.resolve_set(a.A, a.seed)
    fams = [families.resolve_family(s, a.seed) for s in a.family]
    xs = _fns(a.xs, a.seed)
    res = find_one_f(A, fams, xs, _window(a), budget=a.budget)
    m = a.prefix_len
    bad = next((n for n in range(m) if res.f(n) not in (0, 1) or (res.f(n) == 1 and n not in A)), None)
    out = [outcome("f two-valued with support in A", bad is None, m, bad)]
    for c in res.cells:
        for s in c.separations:
            out.append(CheckResult(f"cell {c.i},{c.j}: f differs from {s['g']} x{c.i}",
                                   "pass" if s["index"] is not None else "inconclusive",
                                   [a.skip, a.len], s["index"]))
    return out, res.to_json()


# -- oracle -----------------------------------------------------------------------------

def cmd_saturate(a):
    gens = oracle.resolve_gens(a.gens, a.n)
    sat = sorted(oracle.saturate(gens))
    return [], {"size": len(sat), "maps": [list(f.table) for f in sat][:a.show] if a.show else
                [list(f.table) for f in sat], "surjections": sum(1 for f in sat if f.rank() == a.n)}


def cmd_contains(a):
    U = oracle.resolve_gens(a.U, a.n)
    V = oracle.resolve_gens(a.V, a.n)
    C = oracle.resolve_gens(a.C, a.n) if a.C else []
    return [], {"contained": oracle.contains_generated(U, V, C)}


def cmd_ideal(a):
    ok = oracle.ideal_check(a.n, a.k)
    return [outcome(f"rank <= {a.k} is an ideal on {a.n} points", ok, a.n)], {}


# -- verify -----------------------------------------------------------------------------

def cmd_verify_all(a):
    names = _names(a.suite) if a.suite else list(checks.SUITES)
    unknown = [s for s in names if s not in checks.SUITES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; known: {', '.join(checks.SUITES)}")
    out = []
    for s in names:
        out.extend(checks.SUITES[s](a.prefix_len, a.seed, a.budget))
    counts = {v: sum(1 for c in out if c.verdict == v) for v in checks.VERDICTS}
    return out, {"suites": names, "counts": counts}


# -- parser -----------------------------------------------------------------------------

def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags; subcommands repeat them without defaults so either position works."""
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--prefix-len", type=int, default=d(natfn.DEFAULT_PREFIX_LEN))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--format", "--report", dest="format", choices=("json", "table"),
                   default=d("table"))
    p.add_argument("--budget", type=int, default=d(sets.DEFAULT_BUDGET))
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="add wall time to the report (breaks byte-identical output)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relrank", parents=[_common(True)],
                                     description="Constructions and verifiers for relative rank in N^N.")
    sub_common = _common(False)
    groups = parser.add_subparsers(dest="group", required=True)

    def command(group_sub, name, fn, **kw):
        p = group_sub.add_parser(name, parents=[sub_common], **kw)
        p.set_defaults(func=fn)
        return p

    def window_args(p):
        p.add_argument("--skip", type=int, default=64)
        p.add_argument("--len", type=int, default=512)

    g = groups.add_parser("construct").add_subparsers(dest="cmd", required=True)
    p = command(g, "banach", cmd_banach, help="h with g_i = h^2 f^i h f")
    p.add_argument("--f", default="double")
    p.add_argument("--g", default="", help="comma list of target functions")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--show", type=int, default=16)
    p = command(g, "zerofamily", cmd_zerofamily, help="u = k g h with g g' = 0")
    p.add_argument("--us", default="")
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--bound", type=int, default=1000)

    g = groups.add_parser("ukm").add_subparsers(dest="cmd", required=True)
    for name, fn in (("order", cmd_ukm_order), ("embed", cmd_ukm_embed),
                     ("transport", cmd_ukm_transport)):
        p = command(g, name, fn)
        for flag in ("--k", "--m", "--l", "--n"):
            p.add_argument(flag, type=int, required=True)
        if name == "embed":
            p.add_argument("--show", type=int, default=16)
        if name == "transport":
            p.add_argument("--verify-len", type=int, default=None)
            p.add_argument("--samples", type=int, default=20)
    p = command(g, "antichain", cmd_ukm_antichain)
    p.add_argument("--i", type=int, required=True)

    g = groups.add_parser("family").add_subparsers(dest="cmd", required=True)
    p = command(g, "branch", cmd_family_branch)
    p.add_argument("--paths", default="branch:4")
    p.add_argument("--bound", type=int, default=1 << 16)
    p = command(g, "check", cmd_family_check)
    p.add_argument("--paths", default="branch:4")
    p.add_argument("--pair", type=int, nargs=2, required=True, metavar=("I", "J"))
    p.add_argument("--bound", type=int, default=1 << 16)

    g = groups.add_parser("perfect").add_subparsers(dest="cmd", required=True)
    p = command(g, "kernel", cmd_perfect_kernel)
    p.add_argument("--tree", default="branch-family", choices=sorted(perfect.TREES))
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--case", choices=("1", "2"), default="2")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--x0", default="", help="comma list of labels")

    g = groups.add_parser("diagonal").add_subparsers(dest="cmd", required=True)
    p = command(g, "twochoices", cmd_twochoices)
    p.add_argument("--word", required=True, help="u_m,B,...,B,u_0")
    p.add_argument("--assumed", default="", help="A(0),...,A(r-1)")
    p.add_argument("--N", default="naturals")
    window_args(p)
    p = command(g, "case", cmd_case)
    p.add_argument("--N", default="naturals")
    p.add_argument("--us", required=True)
    p.add_argument("--family", default="branch:4")
    window_args(p)
    p = command(g, "findone", cmd_findone)
    p.add_argument("--A", default="evens")
    p.add_argument("--family", action="append", default=None)
    p.add_argument("--xs", default="identity")
    window_args(p)

    g = groups.add_parser("oracle").add_subparsers(dest="cmd", required=True)
    p = command(g, "saturate", cmd_saturate)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gens", required=True)
    p.add_argument("--show", type=int, default=0, help="list at most this many maps (0: all)")
    p = command(g, "contains", cmd_contains)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--U", required=True)
    p.add_argument("--V", required=True)
    p.add_argument("--C", default="")
    p = command(g, "ideal", cmd_ideal)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    g = groups.add_parser("verify").add_subparsers(dest="cmd", required=True)
    p = command(g, "all", cmd_verify_all)
    p.add_argument("--suite", default="", help="comma list of suites (default: all)")
    return parser


def _execute(args: argparse.Namespace) -> tuple[RunReport, int]:
    if getattr(args, "family", "") is None:
        args.family = ["branch:4"]
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "group", "cmd", "format", "timing")}
    t0 = time.perf_counter()
    try:
        results, payload = args.func(args)
    except (KeyError, ValueError, IndexError) as e:
        raise UsageError(str(e.args[0]) if e.args else type(e).__name__) from e
    report = RunReport([args.group, args.cmd], params, results, payload)
    if args.timing:
        report.wall_time = time.perf_counter() - t0
    return report, (EXIT_FAIL if report.failed else EXIT_OK)


def run(argv: Optional[Sequence[str]] = None) -> tuple[RunReport, int]:
    """Parse and execute; raises UsageError or SystemExit on bad input."""
    argv = list(sys.argv[1:] if argv is None else argv)
    return _execute(build_parser().parse_args(argv))


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        report, code = _execute(args)
    except UsageError as e:
        print(f"relrank: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # argparse: --help exits 0, bad usage exits 2
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    print(report.dumps() if args.format == "json" else report.table())
    return code


if __name__ == "__main__":
    sys.exit(main())

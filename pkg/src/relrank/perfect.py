"""Embedding the binary tree into a tree of finite sequences and coloring it.

Given a tree in which every node extends to a node with at least two
children, the kernel builders produce sigma (binary sequences -> tree nodes)
and the two label maps iota0, iota1 with disjoint ranges, such that
sigma(x + (j,)) extends sigma(x) + (iota_j(x),).  Coloring iota0 labels 0 and
iota1 labels 1 then turns distinct branches into distinct 0/1 sequences.

Perfectness is a hypothesis here.  Every search runs under a budget and
raises :class:`BudgetExhausted` instead of guessing.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .natfn import Meta, NatFn, Prefix
from .sets import DEFAULT_BUDGET, seq_code, seq_decode

Node = tuple[int, ...]
Bits = tuple[int, ...]


class BudgetExhausted(RuntimeError):
    """An extension search ran out of budget; ``node`` is where it started."""

    def __init__(self, message: str, node: Node | None = None):
        super().__init__(message)
        self.node = node


class KernelInvariantError(ValueError):
    pass


class PrefixTree:
    """A decidable tree of finite sequences of naturals.

    ``children(x)`` yields the labels i with x + (i,) in the tree in
    increasing order; it may be infinite.  Without one, labels are found by
    scanning ``contains`` below the label budget.
    """

    def __init__(self, contains: Callable[[Node], bool], name: str = "<tree>",
                 children: Callable[[Node], Iterable[int]] | None = None,
                 perfect_hint: bool = False):
        self.contains = contains
        self.name = name
        self._children = children
        self.perfect_hint = perfect_hint

    def __contains__(self, x) -> bool:
        return self.contains(tuple(x))

    def children(self, x: Node, budget: int = DEFAULT_BUDGET) -> Iterator[int]:
        if self._children is not None:
            return iter(self._children(x))
        return (i for i in range(budget) if self.contains(x + (i,)))

    def E(self, x: Node, budget: int = DEFAULT_BUDGET) -> list[int]:
        """The child labels of x found within ``budget`` (complete for finite oracles)."""
        return list(itertools.islice(self.children(x, budget), budget))


# -- standard trees -----------------------------------------------------------

def binary_tree() -> PrefixTree:
    """All finite 0/1 sequences."""
    return PrefixTree(lambda x: all(v in (0, 1) for v in x), "binary",
                      children=lambda x: (0, 1), perfect_hint=True)


def branch_family_tree() -> PrefixTree:
    """Sequences (code(b|1), code(b|2), ...) for binary b.

    Every node has exactly two children labelled by the two one-bit
    extensions of the last code, so labels never repeat between nodes.
    """

    def contains(x):
        prev = 0
        for c in x:
            if c not in (2 * prev + 1, 2 * prev + 2):
                return False
            prev = c
        return True

    def children(x):
        last = x[-1] if x else 0
        return (2 * last + 1, 2 * last + 2)

    return PrefixTree(contains, "branch-family", children=children, perfect_hint=True)


def pinned_tree(a: int = 5) -> PrefixTree:
    """Every node x has children {a, a+1+len(x)}: a is common to all child sets."""

    def children(x):
        return tuple(sorted({a, a + 1 + len(x)}))

    def contains(x):
        return all(v in children(x[:i]) for i, v in enumerate(x))

    return PrefixTree(contains, f"pinned:{a}", children=children, perfect_hint=True)


def dead_branch_tree(a: int = 5) -> PrefixTree:
    """Like :func:`pinned_tree` until a label other than a appears; below
    that every node has the single child 0."""

    def children(x):
        if any(v != a for v in x):
            return (0,)
        return tuple(sorted({a, a + 1 + len(x)}))

    def contains(x):
        return all(v in children(x[:i]) for i, v in enumerate(x))

    return PrefixTree(contains, f"dead:{a}", children=children)


TREES: dict[str, Callable[[], PrefixTree]] = {
    "binary": binary_tree,
    "branch-family": branch_family_tree,
    "pinned": pinned_tree,
    "dead": dead_branch_tree,
}


def resolve_tree(name: str) -> PrefixTree:
    try:
        return TREES[name]()
    except KeyError:
        raise KeyError(f"unknown tree {name!r}; known: {', '.join(sorted(TREES))}") from None


# -- kernel data ----------------------------------------------------------------

def binary_words(max_len: int) -> Iterator[Bits]:
    """All binary sequences of length <= max_len in length-lexicographic order."""
    for c in range(seq_code((1,) * max_len) + 1):
        yield seq_decode(c)


@dataclass
class KernelData:
    depth: int
    sigma: dict[Bits, Node]
    iota0: dict[Bits, int]
    iota1: dict[Bits, int]
    case: str = "2"
    log: list = field(default_factory=list)

    def iota(self, j: int) -> dict[Bits, int]:
        return self.iota0 if j == 0 else self.iota1

    def violations(self, tree: PrefixTree | None = None) -> list[str]:
        """Every failure of range disjointness or of the extension property."""
        out = []
        clash = set(self.iota0.values()) & set(self.iota1.values())
        if clash:
            out.append(f"iota ranges overlap at {sorted(clash)}")
        for x, node in self.sigma.items():
            if tree is not None and not tree.contains(node):
                out.append(f"sigma{x} = {node} is not in the tree")
            if len(x) == 0:
                continue
            parent, j = x[:-1], x[-1]
            if parent not in self.iota(j):
                out.append(f"iota{j}{parent} missing")
                continue
            want = self.sigma[parent] + (self.iota(j)[parent],)
            if node[:len(want)] != want:
                out.append(f"sigma{x} does not extend sigma{parent}+({self.iota(j)[parent]},)")
        return out

    def check(self, tree: PrefixTree | None = None) -> None:
        bad = self.violations(tree)
        if bad:
            raise KernelInvariantError("; ".join(bad))

    def to_json(self) -> dict:
        def key(x):
            return "".join(map(str, x)) or "ε"

        return {
            "depth": self.depth,
            "case": self.case,
            "sigma": {key(x): list(v) for x, v in sorted(self.sigma.items(), key=lambda kv: seq_code(kv[0]))},
            "iota0": {key(x): v for x, v in sorted(self.iota0.items(), key=lambda kv: seq_code(kv[0]))},
            "iota1": {key(x): v for x, v in sorted(self.iota1.items(), key=lambda kv: seq_code(kv[0]))},
        }


def _search(tree: PrefixTree, start: Node, accept: Callable[[Node, list[int]], bool],
            budget: int) -> tuple[Node, list[int]]:
    """Breadth-first search of the subtree at ``start`` for an accepted node."""
    queue = deque([start])
    seen = 0
    while queue:
        node = queue.popleft()
        seen += 1
        if seen > budget:
            break
        kids = tree.E(node, budget)
        if accept(node, kids):
            return node, kids
        queue.extend(node + (i,) for i in kids)
    raise BudgetExhausted(f"no suitable extension of {start} within {budget} nodes", start)


def kernel_case2(tree: PrefixTree, d: int, budget: int = DEFAULT_BUDGET) -> KernelData:
    """Build sigma, iota0, iota1 to depth d, always choosing a fresh label.

    Nodes are processed in length-lexicographic order.  For x_k = x_j + (r,),
    sigma(x_k) is the first node below sigma(x_j) + (iota_r(x_j),) with two
    children one of which, m, is not yet used; the other child n keeps its
    old side if it was used before.
    """
    if d < 0:
        raise ValueError("depth must be non-negative")
    sigma: dict[Bits, Node] = {}
    iota0: dict[Bits, int] = {}
    iota1: dict[Bits, int] = {}
    side: dict[int, int] = {}  # label -> 0 or 1

    for x in binary_words(d):
        used = side.keys()
        if not x:
            start: Node = ()

            def accept(node, kids):
                return len(set(kids)) >= 2
        else:
            parent, r = x[:-1], x[-1]
            start = sigma[parent] + ((iota0 if r == 0 else iota1)[parent],)

            def accept(node, kids):
                return len(set(kids)) >= 2 and any(i not in used for i in kids)

        node, kids = _search(tree, start, accept, budget)
        sigma[x] = node
        if len(x) == d:
            continue
        kids = sorted(set(kids))
        if not x:
            m, n = kids[0], kids[1]
            a0, a1 = m, n
        else:
            m = next(i for i in kids if i not in used)
            n = next(i for i in kids if i != m)
            if n in side:
                a0, a1 = (n, m) if side[n] == 0 else (m, n)
            else:
                a0, a1 = m, n
        iota0[x], iota1[x] = a0, a1
        side[a0], side[a1] = 0, 1
    return KernelData(d, sigma, iota0, iota1, case="2")


def kernel_case1(tree: PrefixTree, a: int, x0: Node, d: int,
                 budget: int = DEFAULT_BUDGET) -> KernelData:
    """Build the kernel around a label ``a`` common to all branching child sets.

    The caller asserts that every extension of ``x0`` extends further to a
    node with at least two children among which is ``a``.  iota0 is then
    constantly ``a`` and iota1 picks the least other child.
    """
    if d < 0:
        raise ValueError("depth must be non-negative")
    x0 = tuple(x0)
    if not tree.contains(x0):
        raise ValueError(f"{x0} is not a node of {tree.name}")

    def accept(node, kids):
        return len(set(kids)) >= 2 and a in kids

    sigma: dict[Bits, Node] = {}
    iota0: dict[Bits, int] = {}
    iota1: dict[Bits, int] = {}
    for x in binary_words(d):
        if not x:
            start = x0
        else:
            parent, r = x[:-1], x[-1]
            start = sigma[parent] + ((iota0 if r == 0 else iota1)[parent],)
        node, kids = _search(tree, start, accept, budget)
        sigma[x] = node
        if len(x) < d:
            iota0[x] = a
            iota1[x] = min(i for i in kids if i != a)
    return KernelData(d, sigma, iota0, iota1, case="1")


def psi_prefix(kd: KernelData, x: Bits) -> Prefix:
    """The finite approximation sigma(x) to the branch through x."""
    x = tuple(x)
    if len(x) != kd.depth:
        raise ValueError(f"branch length {len(x)} != kernel depth {kd.depth}")
    return Prefix(kd.sigma[x])


def lcp(x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    out = []
    for a, b in zip(x, y):
        if a != b:
            break
        out.append(a)
    return tuple(out)


def coloring(kd: KernelData) -> NatFn:
    """0 on the iota0 labels, 1 on the iota1 labels, 0 elsewhere."""
    ones = frozenset(kd.iota1.values())
    return NatFn(lambda m: 1 if m in ones else 0, f"color[d={kd.depth}]", Meta(image_bound=2))


def color_and_check(kd: KernelData, tree: PrefixTree | None = None) -> tuple[NatFn, bool, list[Prefix]]:
    """Color the kernel and test injectivity of branch -> f ∘ sigma(branch).

    Two colored branches count as distinct only if they differ at an index
    where both are defined, so no colored prefix may be a prefix of another.
    Returns the coloring, the verdict and the colored prefixes in branch order.
    """
    kd.check(tree)
    f = coloring(kd)
    branches = list(itertools.product((0, 1), repeat=kd.depth))
    colored = [tuple(f(v) for v in kd.sigma[x]) for x in branches]
    ordered = sorted(colored)
    injective = all(not ordered[i + 1][:len(ordered[i])] == ordered[i]
                    for i in range(len(ordered) - 1))
    return f, injective, [Prefix(c) for c in colored]


def assemble_T(colored: Iterable[Prefix | Sequence[int]]) -> list[Prefix]:
    """The colored prefixes, their 0/1 swaps and the two constants, sorted."""
    rows = [tuple(c) for c in colored]
    if not rows:
        return []
    length = len(rows[0])
    if any(len(r) != length for r in rows):
        raise ValueError("colored prefixes must share one length")
    if any(v not in (0, 1) for r in rows for v in r):
        raise ValueError("colored prefixes must be two-valued")
    out = set(rows)
    out |= {tuple(1 - v for v in r) for r in rows}
    out |= {(0,) * length, (1,) * length}
    return [Prefix(r) for r in sorted(out)]


def composition_closed(prefixes: Iterable[Prefix | Sequence[int]]) -> tuple[bool, Optional[tuple]]:
    """Whether a∘b stays in the set, reading each prefix as a map on its index set.

    Needs length >= 2 so that the values 0 and 1 are in the domain.
    """
    rows = [tuple(p) for p in prefixes]
    pool = set(rows)
    for a, b in itertools.product(rows, repeat=2):
        ab = tuple(a[v] for v in b)
        if ab not in pool:
            return False, (a, b)
    return True, None

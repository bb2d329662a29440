"""Total functions on the naturals, evaluated lazily.

A :class:`NatFn` wraps a rule ``n -> value`` together with an unbounded
per-instance memo table and some optional structural metadata.  Metadata is
advisory: every claim carries an :class:`Evidence` record saying whether it
holds by construction or was only checked up to some bound.

Functions whose values fit comfortably in 64 bits may also carry a numpy
``vec`` rule.  Prefix extraction and prefix comparison use it when present,
which is what makes checks over ``10**4`` points for hundreds of functions
cheap.  The scalar rule is always authoritative; the vector rule must agree
with it.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

DEFAULT_PREFIX_LEN = 1024

Rule = Callable[[int], int]
VecRule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Evidence:
    """Where a metadata claim comes from.

    ``kind`` is ``"proved"`` (holds by construction) or ``"checked"`` (a
    finite search below ``bound`` found no counterexample).
    """

    kind: str
    bound: Optional[int] = None

    @property
    def proved(self) -> bool:
        return self.kind == "proved"

    def __str__(self):
        return "proved" if self.proved else f"checked<{self.bound}"


PROVED = Evidence("proved")


@dataclass(frozen=True)
class Meta:
    injective: Optional[Evidence] = None
    image_bound: Optional[int] = None
    # partial inverse on the image: returns None off the image
    inverse: Optional[Callable[[int], Optional[int]]] = None
    # the set N \ f(N); a sets.SetRep, typed loosely to avoid a cycle
    coimage: object = None


class NatFn:
    """An immutable, memoized map N -> N."""

    __slots__ = ("name", "rule", "vec", "meta", "_cache", "_lock")

    def __init__(self, rule: Rule, name: str = "<fn>", meta: Meta | None = None,
                 vec: VecRule | None = None):
        self.name = name
        self.rule = rule
        self.vec = vec
        self.meta = meta if meta is not None else Meta()
        self._cache: dict[int, int] = {}
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        try:
            return self._cache[n]
        except KeyError:
            pass
        # rule runs outside the lock: rules may recurse into this same map
        v = self.rule(n)
        with self._lock:
            return self._cache.setdefault(n, v)

    def __repr__(self):
        return f"NatFn({self.name})"

    @property
    def image_bound(self) -> Optional[int]:
        return self.meta.image_bound

    @property
    def inverse(self):
        return self.meta.inverse

    @property
    def coimage(self):
        return self.meta.coimage

    def renamed(self, name: str) -> "NatFn":
        return NatFn(self.rule, name, self.meta, self.vec)


def eval_fn(f: NatFn, n: int) -> int:
    return f(n)


@dataclass(frozen=True)
class Prefix:
    """The restriction (f(0), ..., f(m-1))."""

    values: tuple[int, ...]

    def __post_init__(self):
        if any((not isinstance(v, int)) or v < 0 for v in self.values):
            raise ValueError("prefix entries must be naturals")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def length(self) -> int:
        return len(self.values)

    def image(self) -> frozenset[int]:
        return frozenset(self.values)

    def to_json(self) -> str:
        return json.dumps(list(self.values))

    @classmethod
    def from_json(cls, text: str) -> "Prefix":
        return cls(tuple(int(v) for v in json.loads(text)))


def compose(f: NatFn, g: NatFn, name: str | None = None) -> NatFn:
    """The map n -> f(g(n))."""
    bounds = [b for b in (f.image_bound, g.image_bound) if b is not None]
    inverse = None
    injective = None
    fe, ge = f.meta.injective, g.meta.injective
    if fe is not None and ge is not None:
        if fe.proved and ge.proved:
            injective = PROVED
        else:
            injective = Evidence("checked", min(e.bound for e in (fe, ge) if not e.proved))
    if f.inverse is not None and g.inverse is not None:
        fi, gi = f.inverse, g.inverse

        def inverse(n):
            m = fi(n)
            return None if m is None else gi(m)

    meta = Meta(injective=injective, image_bound=min(bounds) if bounds else None, inverse=inverse)
    vec = None
    if f.vec is not None and g.vec is not None:
        fv, gv = f.vec, g.vec

        def vec(a):
            return fv(gv(a))

    return NatFn(lambda n: f(g(n)), name or f"{f.name}∘{g.name}", meta, vec)


def compose_all(*fs: NatFn) -> NatFn:
    """compose_all(a, b, c) = a∘b∘c."""
    if not fs:
        return identity()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = compose(f, out)
    return out


def power(f: NatFn, i: int) -> NatFn:
    out = identity()
    for _ in range(i):
        out = compose(f, out)
    return out


def _values(f: NatFn, m: int):
    if f.vec is not None and m > 0:
        return f.vec(np.arange(m, dtype=np.int64))
    return None


def prefix(f: NatFn, m: int = DEFAULT_PREFIX_LEN) -> Prefix:
    arr = _values(f, m)
    if arr is not None:
        return Prefix(tuple(int(v) for v in arr))
    return Prefix(tuple(f(n) for n in range(m)))


def agree_on_prefix(f: NatFn, g: NatFn, m: int = DEFAULT_PREFIX_LEN) -> tuple[bool, Optional[int]]:
    """Whether f and g agree below m; on failure also the least disagreement."""
    a, b = _values(f, m), _values(g, m)
    if a is not None and b is not None:
        bad = np.flatnonzero(a != b)
        return (True, None) if bad.size == 0 else (False, int(bad[0]))
    for n in range(m):
        if f(n) != g(n):
            return False, n
    return True, None


def with_overrides(f: NatFn, changes: Mapping[int, int], name: str | None = None) -> NatFn:
    """f with finitely many values replaced.  Metadata is dropped."""
    changes = dict(changes)
    return NatFn(lambda n: changes[n] if n in changes else f(n), name or f"{f.name}*")


def from_table(values: Iterable[int], default: int = 0, name: str = "table") -> NatFn:
    table = tuple(values)
    arr = np.asarray(table, dtype=np.int64)

    def rule(n):
        return table[n] if n < len(table) else default

    def vec(a):
        out = np.full(a.shape, default, dtype=np.int64)
        inside = a < len(table)
        out[inside] = arr[a[inside]]
        return out

    return NatFn(rule, name, vec=vec)


# -- basic constructors ----------------------------------------------------

def identity() -> NatFn:
    return NatFn(lambda n: n, "identity",
                 Meta(injective=PROVED, inverse=lambda n: n), vec=lambda a: a)


def constant(c: int) -> NatFn:
    return NatFn(lambda n: c, f"const{c}", Meta(image_bound=1),
                 vec=lambda a: np.full(a.shape, c, dtype=np.int64))


def _odds():
    from .sets import odds
    return odds()


def double() -> NatFn:
    return NatFn(lambda n: 2 * n, "double",
                 Meta(injective=PROVED, inverse=lambda n: n // 2 if n % 2 == 0 else None,
                      coimage=_odds()),
                 vec=lambda a: 2 * a)


def successor() -> NatFn:
    from .sets import finite
    return NatFn(lambda n: n + 1, "succ",
                 Meta(injective=PROVED, inverse=lambda n: n - 1 if n > 0 else None,
                      coimage=finite([0])),
                 vec=lambda a: a + 1)


def halve() -> NatFn:
    return NatFn(lambda n: n // 2, "half", vec=lambda a: a // 2)


_MASK = (1 << 64) - 1


def _mix(x: int) -> int:
    # splitmix64 finalizer
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _vmix(a: np.ndarray) -> np.ndarray:
    x = a.astype(np.uint64)
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def hash_word(seed: int, n: int) -> int:
    """A deterministic 64-bit hash of (seed, n)."""
    return _mix((_mix(seed & _MASK) ^ n) & _MASK)


def hash_words(seed: int, a: np.ndarray) -> np.ndarray:
    return _vmix(np.uint64(_mix(seed & _MASK)) ^ a.astype(np.uint64))


def random_fn(seed: int, bound: int, offset: int = 0, name: str | None = None) -> NatFn:
    """A pseudo-random map with values in [offset, offset + bound)."""
    if bound < 1:
        raise ValueError("bound must be positive")

    def rule(n):
        return offset + hash_word(seed, n) % bound

    def vec(a):
        return (hash_words(seed, a) % np.uint64(bound)).astype(np.int64) + offset

    return NatFn(rule, name or f"rand:{bound}:{seed}", Meta(image_bound=bound), vec=vec)


def random_binary(seed: int, name: str | None = None) -> NatFn:
    return random_fn(seed, 2, name=name or f"bits:{seed}")


# -- registry ----------------------------------------------------------------

_REGISTRY: dict[str, Callable[[], NatFn]] = {
    "identity": identity,
    "id": identity,
    "double": double,
    "succ": successor,
    "half": halve,
    "const0": lambda: constant(0),
    "const1": lambda: constant(1),
}


def register(name: str, factory: Callable[[], NatFn]) -> None:
    _REGISTRY[name] = factory


def registry_names() -> list[str]:
    return sorted(_REGISTRY)


def resolve(key: str, seed: int = 0) -> NatFn:
    """Build a NatFn from its registry key.

    Besides the plain names, ``const:<c>`` and ``rand:<bound>[:<seed>]`` are
    understood; a ``rand`` key without its own seed uses ``seed``.
    """
    key = key.strip()
    if key in _REGISTRY:
        return _REGISTRY[key]()
    head, _, rest = key.partition(":")
    if head == "const" and rest:
        return constant(int(rest))
    if head == "rand" and rest:
        parts = rest.split(":")
        bound = int(parts[0])
        s = int(parts[1]) if len(parts) > 1 else seed
        return random_fn(s, bound, name=key if len(parts) > 1 else f"rand:{bound}:{s}")
    raise KeyError(f"unknown function {key!r}; known: {', '.join(registry_names())}")


def describe(f: NatFn) -> dict:
    m = f.meta
    return {
        "name": f.name,
        "injective": None if m.injective is None else str(m.injective),
        "image_bound": m.image_bound,
        "has_inverse": m.inverse is not None,
        "has_coimage": m.coimage is not None,
    }


__all__ = [
    "DEFAULT_PREFIX_LEN", "Evidence", "PROVED", "Meta", "NatFn", "Prefix",
    "eval_fn", "compose", "compose_all", "power", "prefix", "agree_on_prefix",
    "with_overrides", "from_table", "identity", "constant", "double",
    "successor", "halve", "random_fn", "random_binary", "hash_word",
    "hash_words", "register", "registry_names", "resolve", "describe",
]

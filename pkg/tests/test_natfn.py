import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relrank.families import s_of
from relrank.natfn import (DEFAULT_PREFIX_LEN, Meta, NatFn, Prefix, agree_on_prefix, compose,
                           compose_all, constant, describe, double, eval_fn, from_table, halve,
                           identity, power, prefix, random_fn, resolve, successor, with_overrides)
from relrank.sets import evens, intersection, multiples, random_set


def test_eval_examples():
    assert eval_fn(identity(), 5) == 5
    assert eval_fn(constant(0), 7) == 0
    assert eval_fn(double(), 3) == 6


def test_compose_examples():
    f = random_fn(3, 50)
    assert agree_on_prefix(compose(identity(), f), f, 100) == (True, None)
    A, B = random_set(1), random_set(2)
    assert agree_on_prefix(compose(s_of(A), s_of(B)), s_of(intersection(A, B)), 100)[0]
    assert all(compose(constant(1), double())(n) == 1 for n in range(100))


def test_prefix_examples():
    assert prefix(identity(), 3).values == (0, 1, 2)
    assert prefix(double(), 4).values == (0, 2, 4, 6)
    assert prefix(s_of(evens()), 5).values == (0, 0, 2, 0, 4)
    assert prefix(identity(), 0).length == 0


def test_default_prefix_len():
    assert prefix(identity()).length == DEFAULT_PREFIX_LEN == 1024


def test_agree_examples():
    assert agree_on_prefix(identity(), identity(), 1000) == (True, None)
    assert agree_on_prefix(double(), identity(), 10) == (False, 1)
    A, B = multiples(3), multiples(5)
    assert agree_on_prefix(compose(s_of(A), s_of(B)), s_of(intersection(A, B)), 10_000) == (True, None)


def test_prefix_json_roundtrip():
    p = prefix(random_fn(9, 1000), 64)
    assert Prefix.from_json(p.to_json()) == p
    assert p.to_json().startswith("[")


def test_image_bound_propagates():
    f = random_fn(4, 7)
    c = compose(f, double())
    assert c.image_bound is not None and c.image_bound <= 7
    assert len(prefix(c, 2000).image()) <= 7


def test_injectivity_inverse_metadata():
    d = double()
    assert d.meta.injective.proved
    assert all(d.inverse(d(n)) == n for n in range(1000))
    assert successor().inverse(0) is None
    assert describe(d)["has_inverse"]


def test_power_and_compose_all():
    s = successor()
    assert power(s, 0)(9) == 9
    assert power(s, 5)(1) == 6
    assert compose_all(s, double(), s)(3) == 9


def test_with_overrides_and_table():
    f = with_overrides(identity(), {3: 100})
    assert prefix(f, 5).values == (0, 1, 2, 100, 4)
    t = from_table([4, 5, 6], default=1)
    assert prefix(t, 5).values == (4, 5, 6, 1, 1)
    assert t.vec(np.arange(5)).tolist() == [4, 5, 6, 1, 1]


def test_halve():
    assert prefix(halve(), 6).values == (0, 0, 1, 1, 2, 2)


def test_registry():
    assert resolve("double")(4) == 8
    assert resolve("const:3")(99) == 3
    assert prefix(resolve("rand:10:5"), 50) == prefix(random_fn(5, 10), 50)
    with pytest.raises(KeyError):
        resolve("nope")


def test_determinism_cold_and_warm():
    f = random_fn(11, 1 << 20)
    first = [f(n) for n in range(10_000)]
    again = [f(n) for n in range(10_000)]
    fresh = random_fn(11, 1 << 20)
    assert first == again == [fresh(n) for n in range(10_000)]


def test_vector_path_agrees_with_rule():
    f = random_fn(2, 1000, offset=5)
    a = np.arange(5000)
    assert f.vec(a).tolist() == [f.rule(n) for n in range(5000)]


def test_concurrent_evaluation():
    calls = []

    def rule(n):
        calls.append(n)
        return n * n

    f = NatFn(rule, "square", Meta())
    out = [None] * 8

    def work(i):
        out[i] = [f(n) for n in range(2000)]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o == [n * n for n in range(2000)] for o in out)


fns = st.builds(random_fn, st.integers(0, 1 << 30), st.integers(1, 300))


@settings(max_examples=30, deadline=None)
@given(fns, fns, fns, st.integers(0, 1000))
def test_compose_associative(f, g, h, m):
    left = compose(f, compose(g, h))
    right = compose(compose(f, g), h)
    assert prefix(left, m) == prefix(right, m)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1 << 30), st.integers(1, 20), st.integers(1, 2000))
def test_image_bound_never_exceeded(seed, b, m):
    f = random_fn(seed, b)
    assert len(prefix(f, m).image()) <= f.image_bound

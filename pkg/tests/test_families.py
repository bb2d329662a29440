import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from relrank.families import (ADFamily, BinaryPath, IdealTag, branch_family, branch_set,
                              common_below, f_of, ideal_refute, path_from_spec, resolve_family,
                              s_map_finite, s_of, semilattice_check, standard_branches)
from relrank.natfn import NatFn, agree_on_prefix, compose, constant, identity, prefix, random_binary
from relrank.oracle import FiniteMap, saturate
from relrank.sets import empty, evens, multiples, naturals, odds, random_set, seq_code


def test_s_of_examples():
    assert agree_on_prefix(s_of(naturals()), identity(), 1000)[0]
    assert agree_on_prefix(s_of(empty()), constant(0), 1000)[0]
    assert prefix(s_of(evens()), 5).values == (0, 0, 2, 0, 4)
    assert s_of(evens()).image_bound is None


def test_f_of_examples():
    assert agree_on_prefix(f_of(naturals()), constant(1), 500)[0]
    assert agree_on_prefix(f_of(empty()), constant(0), 500)[0]
    assert prefix(f_of(odds()), 4).values == (0, 1, 0, 1)
    assert f_of(odds()).image_bound == 2
    assert prefix(f_of(odds(), polarity=False), 4).values == (1, 0, 1, 0)


def test_semilattice_examples():
    assert semilattice_check(evens(), multiples(3), 10_000)
    assert semilattice_check(random_set(5), empty(), 10_000)


def test_s_idempotent_random():
    for seed in range(50):
        s = s_of(random_set(seed))
        assert agree_on_prefix(compose(s, s), s, 500)[0]


def test_s_maps_closed_in_oracle():
    maps = {FiniteMap(s_map_finite(set(A), 6))
            for r in range(6) for A in itertools.combinations(range(1, 6), r)}
    assert saturate(maps) == maps


def test_ideal_refute_examples():
    assert ideal_refute(prefix(identity(), 3), IdealTag(2))
    assert not ideal_refute(prefix(f_of(odds()), 100), IdealTag(2))
    assert ideal_refute((0, 0, 1, 1, 2), 2)
    with pytest.raises(ValueError):
        IdealTag(1)


def test_branch_examples():
    zeros, ones = path_from_spec("0"), path_from_spec("1(1)")
    fam = branch_family([zeros, ones, path_from_spec("01")])
    assert common_below(fam[0], fam[1], 1 << 16) == 0
    common = [c for c in fam[0].members_below(1 << 16) if c in fam[2]]
    assert common == [seq_code((0,))] == [1]
    same = branch_set(path_from_spec("0"))
    assert common_below(fam[0], same, 4096) == len(fam[0].members_below(4096))


def test_branch_set_members():
    p = path_from_spec("01(10)")
    A = branch_set(p)
    assert [A.enum(i) for i in range(3)] == [seq_code((0,)), seq_code((0, 1)), seq_code((0, 1, 1))]
    assert all((c in A) == (c in A.members_below(5000)) for c in range(5000))
    assert all(A.rank(A.enum(i)) == i for i in range(40))


def test_branch_rejects_non_binary():
    from relrank.natfn import random_fn
    with pytest.raises(ValueError):
        branch_family([random_fn(1, 5)])
    with pytest.raises(ValueError):
        path_from_spec("012")


def test_prefix_int_matches_bits():
    plain = BinaryPath(NatFn(random_binary(4).rule, "plain"))
    fast = BinaryPath(random_binary(4))
    for L in (1, 7, 64, 1000, 3000):
        assert plain.prefix_int(L) == fast.prefix_int(L)


def test_branch_exactness_random_pairs():
    rng = random.Random(0)
    bound = 1 << 16
    checked = 0
    while checked < 20:
        x = path_from_spec(f"bits:{rng.randrange(1 << 30)}")
        y = path_from_spec(f"bits:{rng.randrange(1 << 30)}")
        lcp = x.lcp(y, bound)
        if lcp is None or lcp >= 15:
            continue
        A, B = branch_set(x), branch_set(y)
        exhaustive = sum(1 for c in range(bound) if c in A and c in B)
        assert exhaustive == lcp
        checked += 1


def test_pair_notes():
    fam = standard_branches(4)
    assert [p.name for p in fam.paths] == ["00(0)", "01(0)", "10(0)", "11(0)"]
    assert fam.pair_note(0, 1) == ("exact", 1)
    assert fam.pair_note(0, 3) == ("exact", 0)
    general = ADFamily([evens(), odds()])
    assert general.pair_note(0, 1, 1000) == ("bounded", 0, 1000)


def test_f_members_shape():
    fam = standard_branches(2)
    names = [g.name for g in fam.f_members()]
    assert len(names) == 6 and names[-2:] == ["f[naturals]", "f[empty]"]


def test_resolve_family():
    assert len(resolve_family("branch:3")) == 3
    assert len(resolve_family("0,1(1),01")) == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1 << 30), st.integers(0, 1 << 30))
def test_semilattice_property(a, b):
    assert semilattice_check(random_set(a), random_set(b), 300)

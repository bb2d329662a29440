import itertools

import pytest
from hypothesis import given, settings, strategies as st

from relrank.natfn import double, identity, successor
from relrank.sets import (SetRep, WindowError, cantor_pair, cantor_unpair, code_bits, cofinite,
                          complement, enumerator, evens, finite, intersection, multiples,
                          odds, orbit_depth, orbit_partition, pair_slice, predicate,
                          resolve_set, seq_code, seq_decode, tuple_code, tuple_decode,
                          tuple_partition)


def test_pair_examples():
    assert cantor_pair(0, 0) == 0
    assert cantor_pair(1, 0) == 1
    # the stated formula puts 14 on the diagonal a+b = 4 with b = 4
    assert cantor_unpair(14) == (0, 4)
    assert cantor_pair(0, 4) == 14


def test_pair_bijective():
    assert all(cantor_unpair(cantor_pair(a, b)) == (a, b) for a in range(200) for b in range(200))
    assert all(cantor_pair(*cantor_unpair(n)) == n for n in range(10_000))
    with pytest.raises(ValueError):
        cantor_unpair(-1)


def test_tuple_code_bijection():
    assert tuple_code(()) == 0
    assert all(tuple_code(tuple_decode(c)) == c for c in range(5000))
    assert tuple_decode(tuple_code((3, 0, 7))) == (3, 0, 7)


def test_tuple_partition_disjoint():
    tuples = [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (2, 5, 1)]
    cells = [tuple_partition(t) for t in tuples]
    for a, b in itertools.combinations(cells, 2):
        assert not any(n in a and n in b for n in range(0, 100_000, 7))
    for t, c in zip(tuples, cells):
        bound = cantor_pair(tuple_code(t), 50) + 1
        assert len(c.members_below(bound)) >= 50


def test_tuple_partition_32_cells_below_1e5():
    seen = {}
    for t in range(32):
        s = pair_slice(t)
        members = s.members_below(100_000)
        assert members == sorted(members) and len(set(members)) == len(members)
        for n in members:
            assert n not in seen
            seen[n] = t


def test_slices_cover():
    B, T = 10_000, 32
    cover = set()
    for t in range(T):
        cover.update(pair_slice(t).members_below(B))
    expected = {n for n in range(B) if cantor_unpair(n)[0] < T}
    assert cover == expected


def test_seq_code():
    assert seq_code(()) == 0
    assert seq_code((0,)) == 1 and seq_code((1,)) == 2
    codes = set()
    for L in range(17):
        for bits in itertools.product((0, 1), repeat=L):
            c = seq_code(bits)
            assert seq_decode(c) == bits
            assert code_bits(c)[0] == L
            codes.add(c)
    assert codes == set(range(2 ** 17 - 1))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=20), st.integers(0, 1))
def test_seq_code_child(bits, b):
    assert seq_code(tuple(bits) + (b,)) == 2 * seq_code(bits) + b + 1


def test_orbit_partition_double():
    f = double()
    X0, X2 = orbit_partition(f, 0), orbit_partition(f, 2)
    assert 7 in X0 and 6 not in X0
    assert 12 in X2 and 8 not in X2
    assert 8 in orbit_partition(f, 3)
    parts = [orbit_partition(f, i) for i in range(7)]
    for j, k in itertools.combinations(range(7), 2):
        assert not any(n in parts[j] and n in parts[k] for n in range(10_000))
    assert orbit_depth(f, 0) is None
    assert orbit_depth(f, 40) == 3


def test_orbit_partition_rejects_plain_fn():
    with pytest.raises(ValueError):
        orbit_partition(identity(), 0)


def test_orbit_partition_successor():
    X0 = orbit_partition(successor(), 0)
    assert [n for n in range(10) if n in X0] == [0]
    assert 4 in orbit_partition(successor(), 4)


def test_setrep_enum_and_rank():
    e = evens()
    assert e.window(2, 3) == [4, 6, 8]
    assert e.rank(10) == 5 and e.rank(3) is None
    m = multiples(3, 1)
    assert m.members_below(12) == [1, 4, 7, 10]
    p = predicate(lambda n: n % 10 == 0, "tens")
    assert p.window(1, 2) == [10, 20]
    assert p.rank(30) == 3
    with pytest.raises(WindowError):
        finite([1, 2]).window(0, 5, budget=100)


def test_finite_cofinite_consistent():
    f = finite([1, 3, 5])
    c = cofinite([0, 2])
    assert [n for n in range(8) if n in f] == [1, 3, 5]
    assert [n for n in range(6) if n in c] == [1, 3, 4, 5]
    assert c.enum(0) == 1 and c.enum(3) == 5
    assert complement(f).kind == "cofinite"
    assert intersection(finite([1, 2]), finite([2, 3])).elements == (2,)
    assert f.infinite is False and c.infinite is True


def test_enumerator_is_inverse_of_rank():
    u = enumerator(odds())
    assert [u(i) for i in range(4)] == [1, 3, 5, 7]
    assert u.inverse(7) == 3 and u.meta.injective.proved
    with pytest.raises(ValueError):
        enumerator(SetRep(lambda n: True, "no-enum"))


def test_resolve_set():
    assert 4 in resolve_set("evens") and 5 in resolve_set("odds")
    assert [n for n in range(7) if n in resolve_set("finite:[1,3,5]")] == [1, 3, 5]
    assert 2 not in resolve_set("cofinite:[2]")
    assert resolve_set("tuple:[u0,u1]").name == tuple_partition((0, 1)).name
    assert 9 in resolve_set("mult:3")
    assert 0 in resolve_set("naturals") and 0 not in resolve_set("empty")
    with pytest.raises(KeyError):
        resolve_set("primes")

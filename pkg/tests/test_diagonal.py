import random

import pytest

from relrank.diagonal import (CaseWitness, InconsistentWitness, Window, Word, alternate_subset,
                              build_case_f, classify_cell, collision_pairs, eval_word, find_one_f,
                              separate_check, two_choices_classify, words_over)
from relrank.families import branch_set, path_from_spec, standard_branches
from relrank.natfn import (NatFn, compose, compose_all, constant, double, identity, random_fn,
                           successor)
from relrank.sets import SetRep, WindowError, empty, enumerator, evens, finite, naturals, odds


def test_eval_examples():
    assert all(eval_word(Word((identity(),)), n) == n for n in range(50))
    u1 = successor()
    w = Word.from_alternating([u1, empty(), double()])
    assert all(w(n) == u1(0) for n in range(50))
    w = Word.from_alternating([identity(), evens(), identity()])
    assert eval_word(w, 3) == 0 and eval_word(w, 4) == 4


def test_malformed_words():
    with pytest.raises(ValueError):
        Word(())
    with pytest.raises(ValueError):
        Word((identity(), identity()), ())


def test_split_composes():
    rng = random.Random(3)
    pool = [evens(), odds(), naturals(), finite([0, 2, 4])]
    for _ in range(10):
        us = tuple(random_fn(rng.randrange(1 << 20), 40) for _ in range(4))
        w = Word(us, tuple(rng.choice(pool) for _ in range(3)))
        for j in range(3):
            upper, B, lower = w.split(j)
            for n in range(1000):
                y = lower(n)
                assert upper(y if y in B else 0) == w(n)


def test_words_over():
    ws = list(words_over([identity(), double(), identity()], [evens(), odds()]))
    assert len(ws) == 4 and all(w.m == 2 for w in ws)


# two paths that agree on one bit: their branch sets meet only in code((0,)) = 1
X = path_from_spec("00(0)")
Y = path_from_spec("01(0)")
AX, AY = branch_set(X), branch_set(Y)


def test_two_choices_composite():
    w = Word.from_alternating([double(), AX, identity()])
    out = two_choices_classify(w, [AX], AX)
    assert out.kind == "composite" and out.mismatch is None


def test_two_choices_constant_after_mismatch():
    w = Word.from_alternating([successor(), AY, identity()])
    out = two_choices_classify(w, [AX], AX)
    assert out.kind == "constant" and out.mismatch == 0
    assert out.value == successor()(0)
    w = Word.from_alternating([identity(), AY, identity()])
    assert two_choices_classify(w, [AX], AX).value == 0


def test_two_choices_violation():
    # u_0 = identity does not send N = naturals into A(0) = evens
    w = Word.from_alternating([identity(), evens(), identity()])
    out = two_choices_classify(w, [evens()], naturals())
    assert out.kind == "violation" and out.witness % 2 == 1
    noninjective = Word.from_alternating([identity(), naturals(), constant(4)])
    out = two_choices_classify(noninjective, [naturals()], naturals())
    assert out.kind == "violation"


def test_two_choices_window_errors():
    w = Word.from_alternating([identity(), evens(), identity()])
    with pytest.raises(WindowError):
        two_choices_classify(w, [evens()], finite(range(100)))
    with pytest.raises(ValueError):
        two_choices_classify(w, [], evens())


def test_case_a():
    N = naturals()
    c = NatFn(lambda n: n // 2, "pairs")
    cw = CaseWitness("a", N, c, pairs=[(2 * i, 2 * i + 1) for i in range(64, 600)])
    f = build_case_f(cw)
    assert all(f(m) == 1 and f(n) == 0 for m, n in cw.pairs)
    g = compose(identity(), c)
    found, n = separate_check(f, g, N, Window(64, 512))
    assert found
    # any word whose tail is c agrees on each pair, so it misses one side of it
    assert any((f(m), f(k)) != (g(m), g(k)) for m, k in cw.pairs)


def test_case_a_inconsistent():
    cw = CaseWitness("a", naturals(), identity(), pairs=[(1, 2)])
    with pytest.raises(InconsistentWitness):
        build_case_f(cw)


def test_case_b_separates_from_injective_tail():
    N = evens()
    M = alternate_subset(N)
    cw = CaseWitness("b", N, double(), M=M)
    f = build_case_f(cw)
    assert all(f(n) == (1 if n in M else 0) for n in range(2000) if n in N)
    for tail in (double(), successor(), compose(successor(), double())):
        assert separate_check(f, Word((tail,)), N)[0]


def test_case_b_rejects_collisions():
    with pytest.raises(InconsistentWitness):
        build_case_f(CaseWitness("b", naturals(), constant(0)))


def test_case_c2_separates_from_constants():
    N = odds()
    cw = CaseWitness("c2", N, double())
    f = build_case_f(cw)
    for value in (0, 1, 7):
        assert separate_check(f, constant(value), N)[0]


def test_case_c1():
    N = naturals()
    cw = CaseWitness("c1", N, identity(), A=evens(),
                     M=SetRep(lambda n: n % 4 in (0, 1), "mod4"))
    f = build_case_f(cw)
    assert f(4) == 1 and f(2) == 0
    bad = CaseWitness("c1", N, identity(), A=evens(), M=evens())
    with pytest.raises(InconsistentWitness):
        build_case_f(bad)


def test_negative_control():
    N = evens()
    f = build_case_f(CaseWitness("b", N, double()))
    assert separate_check(f, f, N) == (False, None)


def test_classification_soundness():
    """Whenever the hypotheses hold and the tail is composite or constant, the
    diagonal map built for the cell separates from the word."""
    fam = standard_branches(4)
    N = naturals()
    u0 = enumerator(branch_set(fam.paths[0]))
    for u1 in (identity(), double(), constant(3), NatFn(lambda n: n // 2, "half")):
        us = (u0, u1)
        cw = classify_cell(us, fam.members, N)
        f = build_case_f(cw)
        for B in fam.members:
            w = Word(us, (B,))
            out = two_choices_classify(w, [fam[0]], N)
            assert out.kind in ("composite", "constant")
            if out.kind == "constant" or cw.case in ("a", "b"):
                assert separate_check(f, w, N)[0], (cw.case, u1.name, B.name)


def test_collision_pairs():
    pairs = collision_pairs(NatFn(lambda n: n // 3, "third"), range(12))
    assert pairs == [(0, 1), (3, 4), (6, 7), (9, 10)]


def test_classify_cell_cases():
    fam = standard_branches(4)
    assert classify_cell([constant(0), identity()], fam.members, naturals()).case == "a"
    u0 = enumerator(branch_set(fam.paths[1]))
    assert classify_cell([u0, identity()], fam.members, naturals()).case == "b"
    assert classify_cell([double(), identity()], fam.members, naturals()).case == "c2"
    splitter = NatFn(lambda n: fam[0].enum(n) if n % 2 else 4 * n + 3, "mix")
    cw = classify_cell([splitter, identity()], fam.members, naturals())
    assert cw.case == "c1" and cw.A is fam[0]
    assert build_case_f(cw)


def test_find_one_constant_generator():
    A = evens()
    res = find_one_f(A, [standard_branches(4)], [constant(0)])
    assert [c.case for c in res.cells] == [1] and res.cells[0].tag == "exact"
    assert res.all_separated


def test_find_one_identity():
    A = evens()
    fam = standard_branches(4)
    res = find_one_f(A, [fam], [identity()])
    assert all(c.case in (2, 3) for c in res.cells)
    assert all(len(c.separations) == 10 for c in res.cells)
    assert res.all_separated
    assert all(res.f(n) in (0, 1) and (res.f(n) == 0 or n % 2 == 0) for n in range(10_000))


def test_find_one_separations_are_real():
    A = evens()
    fam = standard_branches(4)
    x = NatFn(lambda n: (1 << (n + 1)) - 1, "zeros")
    res = find_one_f(A, [fam], [identity(), x])
    assert res.cells[1].case == 2 and res.cells[1].C == fam[0].name
    for cell in res.cells:
        xi = [identity(), x][cell.i]
        for g, sep in zip(fam.f_members(), cell.separations):
            n = sep["index"]
            assert n in cell.U and n in A
            assert res.window.skip <= sep["t"] < res.window.skip + res.window.length
            assert res.f(n) != compose_all(g, xi)(n)


def test_find_one_needs_enumerator():
    with pytest.raises(ValueError):
        find_one_f(SetRep(lambda n: True, "plain"), [standard_branches(2)], [identity()])

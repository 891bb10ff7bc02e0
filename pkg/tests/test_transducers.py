import itertools
import random
import warnings

from dirlang import automata, grammars, ideals, oracle, transducers

from conftest import random_nfa

ATOMS2 = (ideals.Single("a"), ideals.Single("b"),
          ideals.star("a"), ideals.star("b"), ideals.star("a", "b"))


def test_build_TL_shape():
    t = transducers.build_TL(ATOMS2)
    # start, the shared single-atom state, one per star
    assert t.n_states == 2 + 3
    assert t.initial in t.finals  # empty input maps to empty output
    assert t.finals == frozenset(range(t.n_states))


def test_reverse_involution_on_behavior():
    # reversing twice restructures states but keeps the relation
    tl = transducers.build_TL(ATOMS2)
    twice = transducers.reverse(transducers.reverse(tl))
    assert transducers.build_TR(ATOMS2) == transducers.reverse(tl)
    for rep in [(), (ideals.star("a"), ideals.Single("a")),
                (ideals.Single("a"), ideals.star("a"), ideals.star("a", "b"))]:
        assert (transducers.transduce_word(twice, rep)
                == transducers.transduce_word(tl, rep))


def test_left_reduction_exhaustive_len3():
    # T_L alone performs exactly the left-absorptions; composing with T_R
    # (below and in the acceptance suite) yields full reduction.
    tl = transducers.build_TL(ATOMS2)
    tr = transducers.build_TR(ATOMS2)
    for n in range(0, 4):
        for rep in itertools.product(ATOMS2, repeat=n):
            mid = transducers.transduce_word(tr, rep)
            outs = set()
            for w in mid:
                outs.update(transducers.transduce_word(tl, w))
            assert outs == {ideals.reduce_rep(rep)}, rep


def test_apply_to_nfa_equals_wordwise_image():
    rng = random.Random(600)
    tl = transducers.build_TL(ATOMS2)
    for _ in range(60):
        # random acyclic atom automaton: forward edges only
        n = rng.randint(2, 5)
        trans = []
        for _ in range(rng.randint(1, 7)):
            p = rng.randrange(n - 1)
            q = rng.randrange(p + 1, n)
            trans.append((p, rng.choice(ATOMS2 + (None,)), q))
        a = automata.make_nfa(ATOMS2, n, 0, [n - 1], trans)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            image = transducers.apply_to_nfa(tl, a)
        got = set(automata.enumerate_path_words(image))
        want = set()
        for w in automata.enumerate_path_words(automata.trim(a)):
            want.update(transducers.transduce_word(tl, w))
        assert got == want


def test_apply_to_cfg_equals_wordwise_image():
    rng = random.Random(601)
    tl = transducers.build_TL(ATOMS2)
    for _ in range(40):
        # small acyclic grammars over atoms
        prods = [("S", tuple(rng.choice(ATOMS2)
                             for _ in range(rng.randint(0, 3))))
                 for _ in range(rng.randint(1, 3))]
        g = grammars.to_cnf(grammars.make_cfg(ATOMS2, "S", prods))
        image = transducers.apply_to_cfg(tl, g)
        got = set(oracle.grammar_words(grammars.to_cnf(image), 5))
        want = set()
        for w in oracle.grammar_words(g, 5):
            want.update(transducers.transduce_word(tl, w))
        assert got == want


def test_transduce_word_single_atoms_fixed():
    tl = transducers.build_TL(ATOMS2)
    tr = transducers.build_TR(ATOMS2)
    for atom in ATOMS2:
        assert transducers.transduce_word(tl, (atom,)) == [(atom,)]
        assert transducers.transduce_word(tr, (atom,)) == [(atom,)]

import random

import pytest
from hypothesis import given, strategies as st

from dirlang import ideals, oracle
from dirlang.ideals import AlphabetStar, Single, star

from conftest import random_reduced_rep, random_rep

LETTERS = st.sampled_from(["a", "b", "c"])
ATOMS = st.one_of(
    LETTERS.map(Single),
    st.sets(LETTERS, min_size=1).map(lambda s: star(*s)))
REPS = st.lists(ATOMS, max_size=6).map(tuple)


def test_check_letter_rejects_reserved():
    for bad in ["", "a b", "x?", "{a", "a|b", "eps", "a*"]:
        with pytest.raises(ValueError):
            ideals.check_letter(bad)
    assert ideals.check_letter("a.b") == "a.b"  # dots are fine (pair letters)
    assert ideals.check_letter("x1") == "x1"


def test_atom_formats():
    assert ideals.format_atom(Single("a")) == "a?"
    assert ideals.format_atom(star("b", "a")) == "{a,b}*"
    assert ideals.parse_atom("a?") == Single("a")
    assert ideals.parse_atom("{a,b}*") == star("a", "b")
    with pytest.raises(ValueError):
        ideals.parse_atom("{b,a}*")  # letters must be sorted
    with pytest.raises(ValueError):
        ideals.parse_atom("{}*")


def test_rep_parse_format_round_trip():
    text = "{a,b}* c? {d,e}* {a,c,f}*"
    assert ideals.format_rep(ideals.parse_rep(text)) == text
    assert ideals.parse_rep("eps") == ()
    assert ideals.format_rep(()) == "eps"
    with pytest.raises(ValueError):
        ideals.parse_rep("   ")


@given(REPS)
def test_rep_round_trip_random(rep):
    assert ideals.parse_rep(ideals.format_rep(rep)) == rep


def test_absorbs_classification():
    A = ideals.Absorption
    assert ideals.absorbs(Single("a"), Single("a")) is A.NEITHER
    assert ideals.absorbs(star("a", "b"), Single("a")) is A.LEFT
    assert ideals.absorbs(Single("a"), star("a", "b")) is A.RIGHT
    assert ideals.absorbs(star("a"), star("a")) is A.BOTH
    assert ideals.absorbs(star("a", "b"), star("a")) is A.LEFT
    assert ideals.absorbs(star("a"), star("b")) is A.NEITHER
    assert ideals.absorbs(star("a"), Single("b")) is A.NEITHER


def test_reduce_known_example():
    rep = ideals.parse_rep("{a}* a? b? {b}* a?")
    assert ideals.format_rep(ideals.reduce_rep(rep)) == "{a}* {b}* a?"


def test_reduce_cascade():
    # popping the top can expose a new absorption
    rep = ideals.parse_rep("a? {a}* {a,b}*")
    assert ideals.reduce_rep(rep) == (star("a", "b"),)


@given(REPS)
def test_reduce_is_reduced_and_idempotent(rep):
    red = ideals.reduce_rep(rep)
    assert ideals.is_reduced(red)
    assert ideals.reduce_rep(red) == red
    assert len(red) <= len(rep)


@given(REPS)
def test_reduce_preserves_ideal(rep):
    # same members up to length 4 over the rep's letters
    red = ideals.reduce_rep(rep)
    letters = sorted(ideals.rep_letters(rep)) or ["a"]
    import itertools
    for n in range(0, 4):
        for w in itertools.product(letters, repeat=n):
            assert (ideals.ideal_member(w, rep, alphabet=letters)
                    == ideals.ideal_member(w, red, alphabet=letters))


def test_ideal_member_basics():
    rep = ideals.parse_rep("{a,b}* c? {a,b}*")
    assert ideals.ideal_member((), rep)
    assert ideals.ideal_member(("a", "b", "a"), rep)
    assert ideals.ideal_member(("a", "c", "b"), rep)
    assert not ideals.ideal_member(("c", "c"), rep)
    assert not ideals.ideal_member(("d",), rep, alphabet=("a", "b", "c", "d"))
    assert ideals.ideal_member((), ())
    assert not ideals.ideal_member(("a",), ())


def test_ideal_member_agrees_with_dp_oracle():
    rng = random.Random(401)
    letters = ("a", "b", "c")
    for _ in range(300):
        rep = random_rep(rng, 4, letters)
        w = tuple(rng.choice(letters) for _ in range(rng.randint(0, 6)))
        assert (ideals.ideal_member(w, rep, alphabet=letters)
                == oracle.ideal_member_dp(w, rep))


def test_characteristic_word_is_member_and_maximal_slice():
    rep = ideals.parse_rep("{a,b}* c?")
    w = ideals.characteristic_word(rep, 3)
    assert ideals.ideal_member(w, rep)
    # the star chunk repeats the sorted alphabet m+1 times
    assert w == ("a", "b") * 4 + ("c",)
    assert ideals.characteristic_word((), 5) == ()


def test_ideal_includes_pinned():
    small = ideals.parse_rep("a? b?")
    big = ideals.parse_rep("{a,b}*")
    assert ideals.ideal_includes(small, big)
    assert not ideals.ideal_includes(big, small)
    assert ideals.strict_includes(small, big)
    assert not ideals.strict_includes(big, big)
    assert ideals.ideal_includes((), small)  # {eps} inside everything


def test_includes_agrees_with_characteristic_membership():
    rng = random.Random(402)
    for _ in range(300):
        u = random_rep(rng, 4)
        v = random_rep(rng, 4)
        m = max(len(v), 1)
        chi = ideals.characteristic_word(u, m)
        assert ideals.ideal_includes(u, v) == ideals.ideal_member(
            chi, v, alphabet=("a", "b", "c"))


def test_embedding_pinned_and_guarantees():
    assert ideals.embedding((Single("a"), Single("a")), (star("a"),)) == (1, 1)
    assert ideals.embedding(ideals.parse_rep("a? b?"),
                            ideals.parse_rep("a? {a,b}*")) == (1, 2)
    assert ideals.embedding((star("a"),), (Single("a"),)) is None


def test_embedding_characterizes_inclusion():
    rng = random.Random(403)
    for _ in range(400):
        u = random_rep(rng, 4)
        v = random_rep(rng, 4)
        f = ideals.embedding(u, v)
        assert (f is not None) == ideals.ideal_includes(u, v)
        if f is not None:
            assert all(x <= y for x, y in zip(f, f[1:]))  # monotone
            for i, a in enumerate(u):
                assert ideals.atom_contains(a, v[f[i] - 1])
            singles = [j for j in f if isinstance(v[j - 1], Single)]
            assert len(singles) == len(set(singles))


def test_weight_pinned_values():
    assert ideals.weight(ideals.parse_rep("{a,b}* c? {d,e}* {a,c,f}*"), 10) == 1574
    assert 1574 == 11 ** 3 + 2 * 11 ** 2 + 1
    assert ideals.weight(ideals.parse_rep("{a,b}* c? {b}*"), 10) == 133
    assert ideals.weight((), 10) == 0
    assert ideals.weight((Single("a"),), 0) == 1
    with pytest.raises(ValueError):
        ideals.weight((), -1)


def test_weight_monotone_on_reduced_reps():
    rng = random.Random(404)
    letters = ("a", "b", "c", "d")
    for _ in range(2000):
        k = rng.randint(1, 8)
        u = random_reduced_rep(rng, k, letters)
        v = random_reduced_rep(rng, k, letters)
        if ideals.ideal_includes(u, v):
            assert ideals.weight(u, k) <= ideals.weight(v, k)
        if ideals.strict_includes(u, v):
            assert ideals.weight(u, k) < ideals.weight(v, k)


def test_chain_family_small_pinned():
    assert ideals.chain_family(0) == [(Single("a0"),)]
    assert ideals.chain_family(1) == [
        (Single("a0"),),
        (star("a0"), Single("a1"), Single("a0")),
    ]
    fam = ideals.chain_family(3)
    assert len(fam) == 8
    for r, s in zip(fam, fam[1:]):
        assert ideals.strict_includes(r, s)


def test_chain_family_cap():
    with pytest.raises(ValueError):
        ideals.chain_family(13)
    with pytest.raises(ValueError):
        ideals.chain_family(-1)


def test_format_word():
    assert ideals.format_word(()) == "eps"
    assert ideals.format_word(("a", "b")) == "ab"
    assert ideals.format_word(("a.x", "b.y")) == "a.x b.y"

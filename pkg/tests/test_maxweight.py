import itertools
import random

import pytest

from dirlang import automata, ideals, maxweight

A = ideals.Single("a")
B = ideals.Single("b")
SA = ideals.star("a")
SAB = ideals.star("a", "b")


def atom_nfa(n, finals, trans):
    alphabet = sorted({x for (_, x, _) in trans if x is not None},
                      key=automata.sym_key)
    return automata.make_nfa(alphabet, n, 0, finals, trans)


def test_label_weight():
    assert maxweight.label_weight(None, 10) == 0
    assert maxweight.label_weight(A, 10) == 1
    assert maxweight.label_weight(SAB, 10) == 121


def test_normalize_shape():
    a = atom_nfa(2, [1], [(0, A, 1), (0, SAB, 1)])
    norm = maxweight.normalize(a)
    assert norm.initial == 0
    assert norm.final == norm.m - 1
    # fresh final with an epsilon self-loop merged away or kept: the final
    # column must be reachable from every former final
    path = maxweight.extract_canonical_path(norm, maxweight.suffix_maxima(norm))
    assert path == (SAB,)  # heavier of the two parallel edges


def test_normalize_merges_parallel_edges_keeping_heavier():
    a = atom_nfa(2, [1], [(0, A, 1), (0, SA, 1), (0, B, 1)])
    norm = maxweight.normalize(a)
    kept = [x for x in norm.edges.values() if x is not None]
    assert SA in kept
    assert {atom for (_, _, atom) in norm.merged_away} == {A, B}


def test_normalize_rejects_cycles():
    a = atom_nfa(2, [1], [(0, A, 1), (1, A, 0)])
    with pytest.raises(ValueError):
        maxweight.normalize(a)


def test_suffix_maxima_and_extraction_known_dag():
    # diamond: the star path outweighs the two-singles path at any m >= 1
    a = atom_nfa(4, [3], [(0, A, 1), (1, B, 3), (0, SAB, 2), (2, None, 3)])
    norm = maxweight.normalize(a)
    maxima = maxweight.suffix_maxima(norm)
    assert maxima[norm.initial] == (norm.m + 1) ** 2
    assert maxima[norm.final] == 0
    rep = maxweight.extract_canonical_path(norm, maxima)
    assert rep == (SAB,)


def test_extraction_tie_breaks_deterministically():
    # two single-atom paths of equal weight: smallest successor index wins
    a = atom_nfa(4, [3], [(0, A, 1), (1, None, 3), (0, B, 2), (2, None, 3)])
    norm = maxweight.normalize(a)
    rep = maxweight.extract_canonical_path(norm, maxweight.suffix_maxima(norm))
    assert rep in [(A,), (B,)]
    again = maxweight.extract_canonical_path(norm, maxweight.suffix_maxima(norm))
    assert rep == again


def test_extraction_empty_language():
    a = automata.make_nfa([A], 1, 0, [], [(0, A, 0)])
    with pytest.raises(ValueError):
        maxweight.normalize(automata.trim(a))


def test_matpow_against_bruteforce_longest_path():
    rng = random.Random(700)
    atoms = (A, B, SA, SAB, None)
    for _ in range(80):
        n = rng.randint(2, 6)
        trans = []
        for _ in range(rng.randint(1, 10)):
            p = rng.randrange(n - 1)
            q = rng.randrange(p + 1, n)
            trans.append((p, rng.choice(atoms), q))
        a = atom_nfa(n, [n - 1], trans)
        if not automata.reaches_final(a):
            continue
        norm = maxweight.normalize(a)
        maxima = maxweight.suffix_maxima(norm)

        # brute force: max path weight from each state to the final,
        # walking states in reverse topological order
        best = {norm.final: 0}
        for s in range(norm.m - 2, -1, -1):
            got = None
            for ((p, q), x) in norm.edges.items():
                if p == s and q in best:
                    w = maxweight.label_weight(x, norm.m) + best[q]
                    if got is None or w > got:
                        got = w
            if got is not None:
                best[s] = got
        assert maxima[norm.initial] == best[norm.initial]
        rep = maxweight.extract_canonical_path(norm, maxima)
        assert sum(maxweight.label_weight(x, norm.m) for x in rep) \
            == maxima[norm.initial]


def test_max_plus_matrix_identity_and_mul():
    ident = maxweight.MaxPlusMatrix.identity(3)
    m = maxweight.MaxPlusMatrix(3, ((0, 5, None), (None, 0, 2), (None, None, 0)))
    assert m.mul(ident).rows == m.rows
    assert ident.mul(m).rows == m.rows
    sq = m.mul(m)
    assert sq[0, 2] == 7  # 5 + 2 through the middle
    assert maxweight.matpow(m, 0).rows == ident.rows

"""Independent brute-force oracles for cross-validation.

Everything here is deliberately naive and shares no algorithmic machinery
with the production pipeline: membership is a dynamic program instead of the
greedy scan, downward closures are enumerated word by word, and directedness
is decided by exhaustive decomposition instead of weights and transducers.
"""

from __future__ import annotations

from dirlang import automata
from dirlang.ideals import (
    AlphabetStar,
    IdealRep,
    Single,
    Word,
    format_atom,
    is_reduced,
    reduce_rep,
    strict_includes,
)


def is_subword(u, v) -> bool:
    """Scattered-subsequence test by a two-pointer scan."""
    u, v = tuple(u), tuple(v)
    i = 0
    for x in v:
        if i < len(u) and u[i] == x:
            i += 1
    return i == len(u)


def ideal_member_dp(word, rep: IdealRep) -> bool:
    """Membership in Idl(rep) by dynamic programming over split positions.

    reach[p] holds after processing atom j iff word[:p] lies in the ideal of
    the first j atoms.  No greediness anywhere; this is the reference
    implementation the fast scan is checked against.
    """
    word = tuple(word)
    n = len(word)
    reach = [True] + [False] * n
    for a in rep:
        nxt = list(reach)  # every atom may contribute the empty word
        if isinstance(a, Single):
            for p in range(n):
                if reach[p] and word[p] == a.letter:
                    nxt[p + 1] = True
        else:
            allowed = set(a.letters)
            for p in range(n):
                if not reach[p]:
                    continue
                q = p
                while q < n and word[q] in allowed:
                    q += 1
                    nxt[q] = True
        reach = nxt
    return reach[n]


DCL_WORDS_DEFAULT_BOUND = 8


def dcl_words(a: "automata.Nfa", bound: int = DCL_WORDS_DEFAULT_BOUND) -> set[Word]:
    """All words of length <= bound in the downward closure of L(a).

    Works on the subword-deletion variant of ``a`` (every letter transition
    doubled by an erasing one) via breadth-first search over reachable state
    sets, so it is exact up to the bound.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    # state -> list of (letter-or-None, target); deletion copies added
    succ: dict[int, list[tuple[str | None, int]]] = {q: [] for q in range(a.n_states)}
    for (p, x, q) in a.transitions:
        succ[p].append((x, q))
        if x is not None:
            succ[p].append((None, q))

    def closure(states: frozenset[int]) -> frozenset[int]:
        seen = set(states)
        todo = list(states)
        while todo:
            p = todo.pop()
            for (x, q) in succ[p]:
                if x is None and q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    start = closure(frozenset((a.initial,)))
    out: set[Word] = set()
    frontier: dict[frozenset[int], set[Word]] = {start: {()}}
    letters = sorted(a.alphabet)
    for _ in range(bound + 1):
        nxt: dict[frozenset[int], set[Word]] = {}
        for states, words in frontier.items():
            if states & a.finals:
                out |= words
            for x in letters:
                moved = frozenset(q for p in states for (y, q) in succ[p] if y == x)
                if not moved:
                    continue
                moved = closure(moved)
                bucket = nxt.setdefault(moved, set())
                for w in words:
                    if len(w) < bound:
                        bucket.add(w + (x,))
        frontier = {s: ws for s, ws in nxt.items() if ws}
        if not frontier:
            break
    return out


DECOMPOSE_DEFAULT_CAP = 200_000


def decompose_bruteforce(a: "automata.Nfa", cap: int = DECOMPOSE_DEFAULT_CAP) -> list[IdealRep]:
    """Maximal ideals of the downward closure of L(a), by path enumeration.

    Enumerates the (unreduced) path ideals of the ideal automaton, reduces
    them, and discards any ideal strictly included in another.  Exponential;
    meant for small automata only.
    """
    r = automata.scc_collapse(automata.validate(a))
    idl = automata.ideal_automaton(r)
    reps = automata.enumerate_path_ideals(idl, cap=cap)
    reduced = sorted({reduce_rep(rep) for rep in reps},
                     key=lambda rep: (len(rep), tuple(map(format_atom, rep))))
    assert all(is_reduced(rep) for rep in reduced)
    keep = [rep for rep in reduced
            if not any(strict_includes(rep, other) for other in reduced if other != rep)]
    return keep


def directed_bruteforce(a: "automata.Nfa", cap: int = DECOMPOSE_DEFAULT_CAP) -> bool:
    """Directedness by exhaustive decomposition: at most one maximal ideal.

    The empty language is vacuously directed.
    """
    return len(decompose_bruteforce(a, cap=cap)) <= 1


def cyk_member(g: "grammars.Cfg", word) -> bool:
    """CYK membership for a grammar in Chomsky normal form."""
    from dirlang import grammars

    g.check_cnf()
    word = tuple(word)
    n = len(word)
    if n == 0:
        return any(head == g.start and body == ()
                   for (head, body) in g.productions)
    by_terminal: dict[object, set[str]] = {}
    binary: list[tuple[str, str, str]] = []
    for (head, body) in g.productions:
        if len(body) == 1:
            by_terminal.setdefault(body[0], set()).add(head)
        elif len(body) == 2:
            binary.append((head, body[0].name, body[1].name))
    table: list[list[set[str]]] = [[set() for _ in range(n + 1)] for _ in range(n)]
    for i, x in enumerate(word):
        table[i][i + 1] = set(by_terminal.get(x, ()))
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            cell = table[i][j]
            for mid in range(i + 1, j):
                left, right = table[i][mid], table[mid][j]
                if not left or not right:
                    continue
                for (head, b, c) in binary:
                    if b in left and c in right:
                        cell.add(head)
    return g.start in table[0][n]


def grammar_words(g: "grammars.Cfg", bound: int) -> set[Word]:
    """All words of L(g) with length <= bound; g must be in Chomsky NF.

    Search over sentential forms.  In CNF every nonterminal derives at least
    one letter (the start's epsilon rule is the only exception and the start
    never recurs), so forms longer than the bound are safely pruned.
    """
    from dirlang import grammars

    g.check_cnf()
    seen: set[tuple] = set()
    out: set[Word] = set()
    start = (grammars.Nt(g.start),)
    todo = [start]
    seen.add(start)
    by_head: dict[str, list[tuple]] = {}
    for (head, body) in g.productions:
        by_head.setdefault(head, []).append(body)
    while todo:
        form = todo.pop()
        idx = next((k for k, s in enumerate(form) if isinstance(s, grammars.Nt)), None)
        if idx is None:
            out.add(tuple(form))
            continue
        for body in by_head.get(form[idx].name, ()):
            nxt = form[:idx] + body + form[idx + 1:]
            if len(nxt) > bound and nxt != ():
                continue
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return out

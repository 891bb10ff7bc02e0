"""Reduction transducers over atom words and their application to NFAs/CFGs.

The left-reduction machine T_L copies its input atom word but erases every
atom absorbed by the most recent surviving alphabet atom; it is
input-deterministic, so it computes a function.  The right-reduction machine
T_R is T_L reversed.  Applying T_R and then T_L to an automaton or grammar
over atoms yields one that accepts exactly the reduced forms of the original
atom words (with the same ideals).
"""

from __future__ import annotations

from dataclasses import dataclass

from dirlang import automata
from dirlang.ideals import (
    Absorption,
    AlphabetStar,
    Atom,
    Single,
    absorbs,
    format_atom,
)


@dataclass(frozen=True)
class Transducer:
    """Finite transducer over atoms.  Rules are (src, inp, out, dst);
    an input of None consumes nothing (all such rules also emit nothing)."""

    n_states: int
    initial: int
    finals: frozenset
    rules: tuple
    names: tuple = None

    def state_name(self, q: int) -> str:
        return self.names[q] if self.names is not None else f"t{q}"


def build_TL(atoms) -> Transducer:
    """Left-reduction transducer over the atom alphabet ``atoms``.

    States: a start state, a "last output was a single atom" state, and one
    state per alphabet atom.  Every state copies an incoming atom and moves
    to the state of that atom, except that an alphabet-atom state erases any
    atom it absorbs.  Every state is final (so the empty word maps to
    itself; dropping it would lose the representation of {epsilon}).
    """
    gamma = sorted(set(atoms), key=format_atom)
    stars = [a for a in gamma if isinstance(a, AlphabetStar)]
    state_of = {a: 2 + i for i, a in enumerate(stars)}
    names = ["start", "single"] + [format_atom(a) for a in stars]

    def phi(a: Atom) -> int:
        return 1 if isinstance(a, Single) else state_of[a]

    rules = []
    for t in (0, 1):
        for a in gamma:
            rules.append((t, a, a, phi(a)))
    for star_atom, t in state_of.items():
        for a in gamma:
            if absorbs(star_atom, a) in (Absorption.LEFT, Absorption.BOTH):
                rules.append((t, a, None, t))
            else:
                rules.append((t, a, a, phi(a)))
    n = 2 + len(stars)
    return Transducer(n, 0, frozenset(range(n)), tuple(rules), tuple(names))


def reverse(t: Transducer) -> Transducer:
    """Reversal: runs of the result on w mirror runs of ``t`` on reversed w.

    Implemented with a fresh initial state linked by consuming-nothing,
    emitting-nothing rules to the old final states; the old initial state
    becomes the only final one.
    """
    fresh = t.n_states
    rules = [(q, i, o, p) for (p, i, o, q) in t.rules]
    for f in sorted(t.finals):
        rules.append((fresh, None, None, f))
    names = None
    if t.names is not None:
        names = t.names + ("rev-start",)
    return Transducer(t.n_states + 1, fresh, frozenset((t.initial,)),
                      tuple(rules), names)


def build_TR(atoms) -> Transducer:
    """Right-reduction transducer: the reversal of T_L."""
    return reverse(build_TL(atoms))


def apply_to_nfa(t: Transducer, n: automata.Nfa) -> automata.Nfa:
    """Image automaton: L(result) = t(L(n)).  Product construction; the
    result is trimmed and deterministically numbered."""
    by_input: dict = {}
    eps_rules = []
    for (p, i, o, q) in t.rules:
        if i is None:
            if o is not None:
                raise ValueError("consuming-nothing rules must emit nothing")
            eps_rules.append((p, q))
        else:
            by_input.setdefault((p, i), []).append((o, q))

    ids: dict[tuple, int] = {}
    names = []

    def state_id(key) -> int:
        if key not in ids:
            ids[key] = len(ids)
            s, p = key
            names.append(f"{n.state_name(s)}|{t.state_name(p)}")
        return ids[key]

    succ = n.successors()
    start = (n.initial, t.initial)
    state_id(start)
    todo = [start]
    trans = set()
    while todo:
        key = todo.pop()
        s, p = key
        src = ids[key]
        moves = []
        for (x, s2) in succ[s]:
            if x is None:
                moves.append((None, (s2, p)))
            else:
                for (o, p2) in by_input.get((p, x), ()):
                    moves.append((o, (s2, p2)))
        for (tp, tq) in eps_rules:
            if tp == p:
                moves.append((None, (s, tq)))
        for (o, key2) in moves:
            if key2 not in ids:
                ids[key2] = len(ids)
                s2, p2 = key2
                names.append(f"{n.state_name(s2)}|{t.state_name(p2)}")
                todo.append(key2)
            trans.add((src, o, ids[key2]))
    finals = {i for (key, i) in ids.items()
              if key[0] in n.finals and key[1] in t.finals}
    atoms = sorted({x for (_, x, _) in trans if x is not None},
                   key=automata.sym_key)
    out = automata.make_nfa(atoms, len(ids), ids[start], finals, trans,
                            names=names)
    return automata.trim(out)


def transduce_word(t: Transducer, word) -> list[tuple]:
    """All outputs of ``t`` on a single atom word (sorted, deduplicated)."""
    word = tuple(word)
    n = len(word)
    chain = automata.make_nfa(
        sorted(set(word), key=automata.sym_key), n + 1, 0, {n},
        [(i, word[i], i + 1) for i in range(n)])
    image = apply_to_nfa(t, chain)
    return automata.enumerate_path_words(image)


def apply_to_cfg(t: Transducer, g: "grammars.Cfg") -> "grammars.Cfg":
    """Image grammar: L(result) = t(L(g)).  Triple construction over the
    transducer state pairs; ``g`` must be in Chomsky normal form."""
    from dirlang import grammars

    g.check_cnf()
    eps_succ = {p: {p} for p in range(t.n_states)}
    by_input: dict = {}
    for (p, i, o, q) in t.rules:
        if i is None:
            if o is not None:
                raise ValueError("consuming-nothing rules must emit nothing")
            eps_succ[p].add(q)
        else:
            by_input.setdefault((p, i), []).append((o, q))
    # transitive closure of the consuming-nothing moves
    changed = True
    while changed:
        changed = False
        for p in range(t.n_states):
            grow = set()
            for q in eps_succ[p]:
                grow |= eps_succ[q]
            if not grow <= eps_succ[p]:
                eps_succ[p] |= grow
                changed = True

    def steps(p: int, a: Atom):
        """All (q, out) with a path p -> q consuming exactly the atom a."""
        out = set()
        for p1 in eps_succ[p]:
            for (o, p2) in by_input.get((p1, a), ()):
                for q in eps_succ[p2]:
                    out.add((q, o))
        return sorted(out, key=lambda e: (e[0], "" if e[1] is None else format_atom(e[1])))

    def triple(p: int, head: str, q: int) -> str:
        return f"{head}@{p}.{q}"

    states = range(t.n_states)
    prods = []
    for (head, body) in g.productions:
        if len(body) == 2:
            b, c = body[0].name, body[1].name
            for p in states:
                for q in states:
                    for r in states:
                        prods.append((triple(p, head, q),
                                      (grammars.Nt(triple(p, b, r)),
                                       grammars.Nt(triple(r, c, q)))))
        elif len(body) == 1:
            for p in states:
                for (q, o) in steps(p, body[0]):
                    prods.append((triple(p, head, q),
                                  () if o is None else (o,)))
        else:  # epsilon body
            for p in states:
                for q in eps_succ[p]:
                    prods.append((triple(p, head, q), ()))
    start = grammars.fresh_name("Z", {h for (h, _) in prods})
    for f in sorted(t.finals):
        prods.append((start, (grammars.Nt(triple(t.initial, g.start, f)),)))
    terminals = sorted({s for (_, body) in prods for s in body
                        if not isinstance(s, grammars.Nt)}, key=format_atom)
    return grammars.make_cfg(terminals, start, prods).cleaned()

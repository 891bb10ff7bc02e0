"""Maximum-weight ideal extraction via max-plus matrix powers.

A normalized reduced ideal automaton is acyclic apart from an epsilon
self-loop on its unique final state, and carries at most one edge per state
pair.  With m states, every accepted representation has fewer than m atoms,
so the m-th max-plus power of the edge-weight matrix already contains, for
every state, the maximum weight of any path to the final state.  Weights
are arbitrary-precision integers; "minus infinity" is an explicit None,
never a sentinel number.
"""

from __future__ import annotations

from dataclasses import dataclass

from dirlang import automata
from dirlang.ideals import Atom, IdealRep, atom_weight, format_atom


def label_weight(label, k: int) -> int:
    """mu_k of an edge label; epsilon weighs nothing."""
    return 0 if label is None else atom_weight(label, k)


@dataclass(frozen=True)
class NormalizedIdealNfa:
    """Reduced ideal automaton in matrix-ready shape.

    State 0 is initial, state m-1 the unique final one; states are in
    topological order; ``edges`` maps (i, j) to the single surviving label;
    ``merged_away`` lists (i, j, atom) for parallel edges dropped during
    normalization (they matter when counting, not when maximizing).
    """

    m: int
    edges: dict
    merged_away: tuple
    names: tuple

    @property
    def initial(self) -> int:
        return 0

    @property
    def final(self) -> int:
        return self.m - 1

    def successors(self, i: int):
        return sorted((j, x) for ((s, j), x) in self.edges.items() if s == i)


def normalize(n: automata.Nfa) -> NormalizedIdealNfa:
    """Unique final state, epsilon self-loop there, one edge per state pair.

    Parallel edges are merged keeping the maximum-weight atom (ties go to
    the lexicographically least serialized form); an already-normalized
    input comes back unchanged up to state renaming.
    """
    n = automata.trim(n)
    already = False
    if len(n.finals) == 1:
        (f,) = n.finals
        out_edges = [(p, x, q) for (p, x, q) in n.transitions if p == f]
        already = out_edges == [(f, None, f)]
    if already:
        work_trans = list(n.transitions)
        work_states = n.n_states
        final = next(iter(n.finals))
        names = list(n.names) if n.names is not None else [n.state_name(q) for q in range(n.n_states)]
    else:
        if not automata.is_acyclic(n):
            raise ValueError("normalize needs an acyclic ideal automaton")
        final = n.n_states
        work_states = n.n_states + 1
        work_trans = list(n.transitions)
        for f in sorted(n.finals):
            work_trans.append((f, None, final))
        work_trans.append((final, None, final))
        names = [n.state_name(q) for q in range(n.n_states)] + ["fin"]

    helper = automata.Nfa(tuple(n.alphabet), work_states, n.initial,
                          frozenset((final,)), tuple(work_trans))
    order = automata.topological_order(helper, ignore_self_loops=True)
    order.remove(final)
    order.append(final)  # the final state is the unique sink; force it last
    if order[0] != n.initial:
        raise AssertionError("initial state not first in topological order")
    pos = {q: i for i, q in enumerate(order)}

    m = work_states
    grouped: dict[tuple, list] = {}
    for (p, x, q) in work_trans:
        grouped.setdefault((pos[p], pos[q]), []).append(x)
    edges = {}
    merged = []
    for (i, j), labels in sorted(grouped.items()):
        labels.sort(key=lambda x: (-label_weight(x, m),
                                   "" if x is None else format_atom(x)))
        edges[(i, j)] = labels[0]
        merged.extend((i, j, x) for x in labels[1:])
    return NormalizedIdealNfa(m, edges, tuple(merged),
                              tuple(names[q] for q in order))


NEG_INF = None


@dataclass(frozen=True)
class MaxPlusMatrix:
    """Square matrix over (max, +) with None as minus infinity."""

    n: int
    rows: tuple

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def mul(self, other: "MaxPlusMatrix") -> "MaxPlusMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.n):
            acc = [None] * self.n
            row = self.rows[i]
            for k in range(self.n):
                w = row[k]
                if w is None:
                    continue
                bk = other.rows[k]
                acc = [a if v is None else (w + v if a is None or w + v > a else a)
                       for a, v in zip(acc, bk)]
            out.append(tuple(acc))
        return MaxPlusMatrix(self.n, tuple(out))

    @staticmethod
    def identity(n: int) -> "MaxPlusMatrix":
        return MaxPlusMatrix(n, tuple(tuple(0 if i == j else None for j in range(n))
                                      for i in range(n)))


def matrix_of(norm: NormalizedIdealNfa, m: int) -> MaxPlusMatrix:
    """Edge-weight matrix with mu_m weights; requires m >= state count."""
    if m < norm.m:
        raise ValueError(f"weight parameter m={m} below state count {norm.m}")
    rows = [[None] * norm.m for _ in range(norm.m)]
    for (i, j), x in norm.edges.items():
        rows[i][j] = label_weight(x, m)
    return MaxPlusMatrix(norm.m, tuple(tuple(r) for r in rows))


def matpow(mat: MaxPlusMatrix, p: int) -> MaxPlusMatrix:
    """p-th max-plus power by repeated squaring (p >= 0; 0 is the identity)."""
    if p < 0:
        raise ValueError("negative matrix power")
    result = MaxPlusMatrix.identity(mat.n)
    base = mat
    while p:
        if p & 1:
            result = result.mul(base)
        p >>= 1
        if p:
            base = base.mul(base)
    return result


def suffix_maxima(norm: NormalizedIdealNfa) -> tuple:
    """For every state s the maximum mu_m path weight from s to the final
    state, with m = the state count.

    Computed as the final column of the m-th power of the weight matrix: the
    final state's epsilon self-loop pads shorter paths to length m, and no
    simple path is longer.
    """
    power = matpow(matrix_of(norm, norm.m), norm.m)
    return tuple(power.rows[s][norm.final] for s in range(norm.m))


def extract_canonical_path(norm: NormalizedIdealNfa, maxima) -> IdealRep:
    """The canonical maximum-weight representation.

    Deterministic walk from the initial state: move to the successor
    maximizing edge weight plus suffix maximum, breaking ties by the
    smallest state index; emit non-epsilon labels.  Errors when the
    automaton accepts nothing.
    """
    if maxima[norm.initial] is None:
        raise ValueError("automaton accepts no representation (empty language)")
    rep = []
    i = norm.initial
    guard = 0
    while i != norm.final:
        best = None
        best_j = None
        best_label = None
        for (j, x) in norm.successors(i):
            if j == i or maxima[j] is None:
                continue
            cand = label_weight(x, norm.m) + maxima[j]
            if best is None or cand > best:
                best, best_j, best_label = cand, j, x
        if best_j is None:
            raise AssertionError("dead end on a path with finite suffix maximum")
        if best != maxima[i]:
            raise AssertionError("suffix maxima inconsistent with edge relaxation")
        if best_label is not None:
            rep.append(best_label)
        i = best_j
        guard += 1
        if guard > norm.m:
            raise AssertionError("canonical walk exceeded the state count")
    return tuple(rep)

"""Shared random generators for the cross-check suites.

Every test seeds its own random.Random so runs are reproducible; helpers
here only build values, they never assert.
"""

from dirlang import automata, grammars, ideals


def random_nfa(rng, max_states=5, letters=("a", "b", "c"), max_trans=10,
               eps=True):
    n = rng.randint(1, max_states)
    alphabet = list(letters[:rng.randint(1, len(letters))])
    pool = alphabet + [None] if eps else alphabet
    trans = [(rng.randrange(n), rng.choice(pool), rng.randrange(n))
             for _ in range(rng.randint(0, max_trans))]
    finals = [q for q in range(n) if rng.random() < 0.4]
    return automata.make_nfa(alphabet, n, 0, finals, trans)


def random_cfg(rng, letters=("a", "b", "c"), max_nts=3, max_prods=3,
               max_body=3):
    nts = ["S", "A", "B", "C"][:rng.randint(1, max_nts)]
    prods = []
    for head in nts:
        for _ in range(rng.randint(1, max_prods)):
            body = tuple(grammars.Nt(rng.choice(nts)) if rng.random() < 0.45
                         else rng.choice(letters)
                         for _ in range(rng.randint(0, max_body)))
            prods.append((head, body))
    return grammars.make_cfg(letters, "S", prods)


def nonempty(g):
    return any(head == g.start for (head, _) in grammars.cleaned(g).productions)


def random_atom(rng, letters):
    if rng.random() < 0.5:
        return ideals.Single(rng.choice(letters))
    return ideals.star(*rng.sample(list(letters), rng.randint(1, len(letters))))


def random_rep(rng, max_len, letters=("a", "b", "c")):
    return tuple(random_atom(rng, letters) for _ in range(rng.randint(0, max_len)))


def random_reduced_rep(rng, max_len, letters=("a", "b", "c")):
    while True:
        rep = ideals.reduce_rep(random_rep(rng, max_len, letters))
        if len(rep) <= max_len:
            return rep

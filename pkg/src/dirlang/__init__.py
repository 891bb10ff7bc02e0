"""Directedness and ideal decompositions of languages under the subword ordering.

The subword (scattered subsequence) ordering puts u below v whenever u can be
obtained from v by deleting letters.  Every downward-closed language is a
finite union of *ideals*, and a language is *directed* exactly when its
downward closure is a single ideal.  This package decides directedness for
regular and context-free languages, computes the candidate maximal ideal (as
a reduced atom sequence, or as a compressed straight-line program for
grammars), counts maximal ideals, and ships independent brute-force oracles
for cross-validation.
"""

from dirlang.ideals import (
    Single,
    AlphabetStar,
    Absorption,
    atom_contains,
    absorbs,
    reduce_rep,
    ideal_member,
    characteristic_word,
    ideal_includes,
    strict_includes,
    embedding,
    weight,
    chain_family,
    parse_rep,
    format_rep,
)

__all__ = [
    "Single",
    "AlphabetStar",
    "Absorption",
    "atom_contains",
    "absorbs",
    "reduce_rep",
    "ideal_member",
    "characteristic_word",
    "ideal_includes",
    "strict_includes",
    "embedding",
    "weight",
    "chain_family",
    "parse_rep",
    "format_rep",
]

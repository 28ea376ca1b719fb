"""Sign bookkeeping for symmetric words of graded factors.

Words are stored as sorted tuples of factor keys; a parity function maps a
factor key to 0/1.  Odd operators (differentials, brackets, BV operators)
acquire Koszul transport signs when they reach into a word; sorting a word
uses `algebra.sort_with_sign`, and a repeated odd factor makes the word zero.
"""

from __future__ import annotations

from .algebra import sort_with_sign


def sort_word(factors, parity):
    """Canonically sort a word; returns (tuple, sign) with sign 0 for a
    repeated odd factor."""
    factors = list(factors)
    srt, sign = sort_with_sign(factors, [parity(f) for f in factors])
    return tuple(srt), sign


def odd_op_slots(word, parity):
    """Yield (index, transport sign, factor, rest) for applying an odd
    operator to each factor of the word in turn."""
    prefix = 0
    for i, f in enumerate(word):
        sign = -1 if prefix % 2 else 1
        yield i, sign, f, word[:i] + word[i + 1:]
        prefix += parity(f)


def bracket_slots(word1, word2, parity):
    """Yield (sign, f1, rest1, f2, rest2) for an odd binary bracket pairing
    one factor from each word.

    The factor of `word1` travels to the end of its word, the factor of
    `word2` to the front of its word, and the odd bracket operator crosses
    the remainder of `word1`.
    """
    p1 = [parity(f) for f in word1]
    p2 = [parity(f) for f in word2]
    tot1 = sum(p1)
    for i, f1 in enumerate(word1):
        rest1 = word1[:i] + word1[i + 1:]
        s1 = (-1) ** (p1[i] * ((tot1 - sum(p1[: i + 1])) % 2))
        cross = (-1) ** ((tot1 - p1[i]) % 2)  # odd operator passes rest1
        pre2 = 0
        for j, f2 in enumerate(word2):
            rest2 = word2[:j] + word2[j + 1:]
            s2 = (-1) ** (p2[j] * (pre2 % 2))
            yield s1 * s2 * cross, f1, rest1, f2, rest2
            pre2 += p2[j]


def pair_slots(word, parity):
    """Yield (sign, f_i, f_j, rest) over unordered factor pairs, both factors
    transported to the front (for Chevalley-Eilenberg style coboundaries and
    BV operators)."""
    p = [parity(f) for f in word]
    for i in range(len(word)):
        si = (-1) ** (p[i] * (sum(p[:i]) % 2))
        for j in range(i + 1, len(word)):
            sj = (-1) ** (p[j] * ((sum(p[:j]) - p[i]) % 2))
            rest = tuple(f for k, f in enumerate(word) if k not in (i, j))
            yield si * sj, word[i], word[j], rest

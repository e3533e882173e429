"""The monomial order on bracketed words.

Comparison is breadth-first, then lexicographic on the factor sequence;
letters compare by basis position, any letter precedes any bracket, and two
brackets compare by their contents, recursively.  The unit is least.  This
order is total, compatible with concatenation on both sides and with the
bracket, and closed under contexts (u < v implies q|_u < q|_v).

Each :class:`~rbgsb.terms.Word` carries a byte key realizing the order, so
comparisons here are plain key comparisons.
"""

from __future__ import annotations

from enum import Enum

from .terms import Poly, Word, ZeroPolynomialError


class OrderVerdict(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def compare(u: Word, v: Word) -> OrderVerdict:
    """Three-way comparison of words in the monomial order."""
    if u is v:
        return OrderVerdict.EQUAL
    return OrderVerdict.LESS if u.key < v.key else OrderVerdict.GREATER


def leading_monomial(f: Poly) -> Word:
    """The greatest support word of a nonzero polynomial."""
    if f.is_zero():
        raise ZeroPolynomialError("zero polynomial has no leading monomial")
    return f.lead()

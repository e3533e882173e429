"""Bracketed words, star contexts, and operated polynomials over exact rationals.

Words form the free monoid over the basis letters closed under a unary
bracket.  A word is a tuple of factors; a factor is either a letter (an
``int`` index into the declared basis) or a ``Word`` giving the content of a
bracket.  The empty tuple is the monoid unit.  All words are interned, so
structural equality coincides with object identity and hashing is O(1).

Polynomials are finitely supported maps from words to ``Fraction``.
"""

from __future__ import annotations

import weakref
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Factor = Union[int, "Word"]

_MAX_LETTERS = 250

# Weak interning: words are unique while referenced anywhere, and reclaimable
# once every polynomial and cache holding them is dropped.
_INTERN: "weakref.WeakValueDictionary[tuple, Word]" = weakref.WeakValueDictionary()


class Word:
    """An immutable bracketed word.

    ``key`` is an order-preserving byte encoding of the word: comparing keys
    lexicographically realises the monomial order (breadth first, then the
    factor sequence, where letters precede brackets, letters compare by basis
    position and brackets compare by their contents).  Instances must be
    created through :func:`word`; direct construction bypasses interning.
    """

    __slots__ = ("factors", "breadth", "degree", "depth", "key", "_hash")

    factors: tuple
    breadth: int
    degree: int
    depth: int
    key: bytes

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Word"):
        return self.key < other.key

    def __le__(self, other: "Word"):
        return self.key <= other.key

    def __gt__(self, other: "Word"):
        return self.key > other.key

    def __ge__(self, other: "Word"):
        return self.key >= other.key

    def __repr__(self):
        return f"Word({unparse_word(self)})"

    def __reduce__(self):
        return (word, (self.factors,))

    def is_unit(self) -> bool:
        return not self.factors

    def is_letter(self) -> bool:
        return self.breadth == 1 and isinstance(self.factors[0], int)


def word(factors: Iterable[Factor]) -> Word:
    """Intern and return the word with the given factor sequence."""
    factors = tuple(factors)
    w = _INTERN.get(factors)
    if w is not None:
        return w
    w = Word.__new__(Word)
    w.factors = factors
    breadth = len(factors)
    degree = 0
    depth = 0
    parts = [breadth.to_bytes(2, "big")]
    for f in factors:
        if isinstance(f, int):
            if not 0 <= f < _MAX_LETTERS:
                raise ValueError(f"letter index {f} out of range")
            degree += 1
            parts.append(bytes((2, f + 1)))
        else:
            degree += 1 + f.degree
            if f.depth + 1 > depth:
                depth = f.depth + 1
            parts.append(b"\x03" + f.key + b"\x01")
    w.breadth = breadth
    w.degree = degree
    w.depth = depth
    w.key = b"".join(parts)
    w._hash = hash(factors)
    _INTERN[factors] = w
    return w


UNIT: Word = word(())


def letter(i: int) -> Word:
    return word((i,))


def bracket(w: Word) -> Word:
    return word((w,))


def concat(u: Word, v: Word) -> Word:
    return word(u.factors + v.factors)


def breadth(w: Word) -> int:
    """Number of factors; 0 for the unit."""
    return w.breadth


def degree(w: Word) -> int:
    """Total count of letters and brackets, with multiplicity."""
    return w.degree


def depth(w: Word) -> int:
    """Maximal bracket nesting; 0 for bracket-free words."""
    return w.depth


class Context:
    """A word with exactly one hole.

    ``frames`` is a tuple of ``(left, right)`` factor tuples, outermost
    first.  Frame 0 splices at the top level of the word; every subsequent
    frame is the content of a bracket sitting between its parent frame's
    sides.  Substituting a word for the hole concatenates it in place.
    """

    __slots__ = ("frames", "_hash")

    def __init__(self, frames: Sequence[tuple]):
        self.frames = tuple((tuple(l), tuple(r)) for l, r in frames)
        if not self.frames:
            raise ValueError("a context needs at least the top frame")
        self._hash = hash(self.frames)

    def __eq__(self, other):
        return isinstance(other, Context) and self.frames == other.frames

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Context({unparse_context(self)})"

    @property
    def hole_depth(self) -> int:
        return len(self.frames) - 1

    @property
    def position_path(self) -> tuple:
        return tuple(len(l) for l, _ in self.frames)

    def is_hole(self) -> bool:
        return self.frames == (((), ()),)

    def substitute(self, w: Word) -> Word:
        """Replace the hole by ``w`` (the word's factors are spliced in)."""
        left, right = self.frames[-1]
        cur = left + w.factors + right
        for lf, rf in reversed(self.frames[:-1]):
            cur = lf + (word(cur),) + rf
        return word(cur)

    def substitute_poly(self, p: "Poly") -> "Poly":
        """Linear extension of :meth:`substitute`."""
        acc: dict = {}
        for w, c in p.terms.items():
            t = self.substitute(w)
            nc = acc.get(t, _ZERO) + c
            if nc:
                acc[t] = nc
            else:
                acc.pop(t, None)
        return Poly(acc, _normalized=True)

    def compose(self, inner: "Context") -> "Context":
        """Context obtained by splicing ``inner`` into this context's hole."""
        left, right = self.frames[-1]
        ileft, iright = inner.frames[0]
        merged = (left + ileft, iright + right)
        return Context(self.frames[:-1] + (merged,) + inner.frames[1:])


HOLE = Context((((), ()),))


def substitute(q: Context, u: Word) -> Word:
    return q.substitute(u)


def substitute_poly(q: Context, s: "Poly") -> "Poly":
    return q.substitute_poly(s)


_ZERO = Fraction(0)
_ONE = Fraction(1)


class Poly:
    """Finitely supported linear combination of words with Fraction coefficients.

    Zero coefficients are never stored.  Treated as immutable.
    """

    __slots__ = ("terms",)

    terms: dict

    def __init__(self, terms: Mapping[Word, Fraction] | None = None, *, _normalized=False):
        if terms is None:
            self.terms = {}
        elif _normalized:
            self.terms = dict(terms)
        else:
            self.terms = {w: Fraction(c) for w, c in terms.items() if c}

    @staticmethod
    def zero() -> "Poly":
        return Poly({}, _normalized=True)

    @staticmethod
    def of(w: Word, c: Fraction | int = 1) -> "Poly":
        c = Fraction(c)
        return Poly({w: c} if c else {}, _normalized=True)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self):
        return self.terms.keys()

    def coeff(self, w: Word) -> Fraction:
        return self.terms.get(w, _ZERO)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Poly({unparse_poly(self)})"

    def __add__(self, other: "Poly") -> "Poly":
        acc = dict(self.terms)
        _add_scaled(acc, other.terms, _ONE)
        return Poly(acc, _normalized=True)

    def __sub__(self, other: "Poly") -> "Poly":
        acc = dict(self.terms)
        _add_scaled(acc, other.terms, -_ONE)
        return Poly(acc, _normalized=True)

    def __neg__(self) -> "Poly":
        return Poly({w: -c for w, c in self.terms.items()}, _normalized=True)

    def scale(self, c: Fraction | int) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero()
        return Poly({w: c * a for w, a in self.terms.items()}, _normalized=True)

    def __mul__(self, other: "Poly") -> "Poly":
        acc: dict = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = word(u.factors + v.factors)
                nc = acc.get(w, _ZERO) + a * b
                if nc:
                    acc[w] = nc
                else:
                    acc.pop(w, None)
        return Poly(acc, _normalized=True)

    def mul_word(self, v: Word, on_left=False) -> "Poly":
        if on_left:
            return Poly({word(v.factors + w.factors): c for w, c in self.terms.items()},
                        _normalized=True)
        return Poly({word(w.factors + v.factors): c for w, c in self.terms.items()},
                    _normalized=True)

    def op(self) -> "Poly":
        """Apply the bracket operator linearly."""
        return Poly({word((w,)): c for w, c in self.terms.items()}, _normalized=True)

    def lead(self) -> Word:
        """Greatest support word; raises on the zero polynomial."""
        if not self.terms:
            raise ZeroPolynomialError("the zero polynomial has no leading monomial")
        return max(self.terms)

    def lead_coeff(self) -> Fraction:
        return self.terms[self.lead()]

    def monic(self) -> "Poly":
        c = self.lead_coeff()
        if c == 1:
            return self
        return self.scale(1 / c)

    def tail(self) -> "Poly":
        """Everything except the leading term."""
        lead = self.lead()
        return Poly({w: c for w, c in self.terms.items() if w is not lead},
                    _normalized=True)

    def sorted_terms(self):
        """Terms in descending monomial order (canonical serialization order)."""
        return sorted(self.terms.items(), key=lambda t: t[0].key, reverse=True)


class ZeroPolynomialError(ValueError):
    pass


def _add_scaled(acc: dict, terms: Mapping[Word, Fraction], c: Fraction) -> None:
    for w, a in terms.items():
        nc = acc.get(w, _ZERO) + c * a
        if nc:
            acc[w] = nc
        else:
            acc.pop(w, None)


# ---------------------------------------------------------------------------
# Parsing and canonical printing
#
# poly   := [sign] term ( sign term )*
# sign   := '+' | '-'
# term   := coeff [ '*' word ] | word
# coeff  := int [ '/' int ]
# word   := factor ( WS factor )* | '1'
# factor := ident | '{' [word] '}'
# ---------------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.message = message
        self.pos = pos


class UnknownLetterError(ParseError):
    def __init__(self, name: str, pos: int):
        super().__init__(f"unknown identifier '{name}'", pos)
        self.name = name


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.toks.append(("int", text[i:j], i))
                i = j
            elif ch.isalpha():
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.toks.append(("ident", text[i:j], i))
                i = j
            elif ch in "+-*/{}":
                self.toks.append((ch, ch, i))
                i += 1
            else:
                raise ParseError(f"unexpected character '{ch}'", i)
        self.toks.append(("eof", "", n))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t


def _parse_factor(ts: _Tokens, alphabet: Mapping[str, int]) -> Factor:
    kind, val, pos = ts.peek()
    if kind == "ident":
        ts.next()
        idx = alphabet.get(val)
        if idx is None:
            raise UnknownLetterError(val, pos)
        return idx
    if kind == "{":
        ts.next()
        if ts.peek()[0] == "}":
            ts.next()
            return UNIT
        w = _parse_word(ts, alphabet)
        kind2, _, pos2 = ts.next()
        if kind2 != "}":
            raise ParseError("expected '}'", pos2)
        return w
    raise ParseError("expected a factor", pos)


def _parse_word(ts: _Tokens, alphabet: Mapping[str, int]) -> Word:
    kind, val, pos = ts.peek()
    if kind == "int":
        if val != "1":
            raise ParseError("only '1' denotes the unit word", pos)
        ts.next()
        return UNIT
    factors = [_parse_factor(ts, alphabet)]
    while ts.peek()[0] in ("ident", "{"):
        factors.append(_parse_factor(ts, alphabet))
    return word(factors)


def parse_word(text: str, alphabet: Mapping[str, int]) -> Word:
    """Parse a single word; the whole input must be consumed."""
    ts = _Tokens(text)
    w = _parse_word(ts, alphabet)
    kind, _, pos = ts.peek()
    if kind != "eof":
        raise ParseError("trailing input after word", pos)
    return w


def _parse_coeff(ts: _Tokens) -> Fraction:
    kind, val, pos = ts.next()
    assert kind == "int"
    num = int(val)
    if ts.peek()[0] == "/":
        ts.next()
        kind2, val2, pos2 = ts.next()
        if kind2 != "int":
            raise ParseError("expected denominator", pos2)
        den = int(val2)
        if den == 0:
            raise ParseError("zero denominator", pos2)
        return Fraction(num, den)
    return Fraction(num)


def parse_poly(text: str, alphabet: Mapping[str, int]) -> Poly:
    """Parse a polynomial in the term grammar."""
    ts = _Tokens(text)
    acc: dict = {}
    sign = 1
    kind, _, pos = ts.peek()
    if kind in ("+", "-"):
        ts.next()
        sign = -1 if kind == "-" else 1
    elif kind == "eof":
        raise ParseError("empty polynomial", pos)
    while True:
        kind, val, pos = ts.peek()
        if kind == "int":
            c = _parse_coeff(ts)
            w = UNIT
            if ts.peek()[0] == "*":
                ts.next()
                w = _parse_word(ts, alphabet)
        elif kind in ("ident", "{"):
            c = _ONE
            w = _parse_word(ts, alphabet)
        else:
            raise ParseError("expected a term", pos)
        nc = acc.get(w, _ZERO) + sign * c
        if nc:
            acc[w] = nc
        else:
            acc.pop(w, None)
        kind, _, pos = ts.peek()
        if kind == "eof":
            break
        if kind not in ("+", "-"):
            raise ParseError("expected '+' or '-'", pos)
        ts.next()
        sign = -1 if kind == "-" else 1
    return Poly(acc, _normalized=True)


def unparse_word(w: Word, names: Sequence[str] | None = None) -> str:
    """Canonical rendering of a word: factors separated by single spaces."""
    if w.is_unit():
        return "1"
    return " ".join(_unparse_factor(f, names) for f in w.factors)


def _unparse_factor(f: Factor, names: Sequence[str] | None) -> str:
    if isinstance(f, int):
        return names[f] if names is not None else f"x{f}"
    if f.is_unit():
        return "{}"
    return "{" + unparse_word(f, names) + "}"


def unparse_poly(p: Poly, names: Sequence[str] | None = None) -> str:
    """Canonical rendering: monomials in descending order, reduced fractions."""
    if p.is_zero():
        return "0"
    out = []
    for i, (w, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        mag = -c if neg else c
        if w.is_unit():
            body = str(mag)
        elif mag == 1:
            body = unparse_word(w, names)
        else:
            body = f"{mag}*{unparse_word(w, names)}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def unparse_context(q: Context, names: Sequence[str] | None = None) -> str:
    """Rendering of a context with '*' marking the hole."""
    body = "*"
    for left, right in reversed(q.frames):
        parts = [_unparse_factor(f, names) for f in left]
        parts.append(body)
        parts.extend(_unparse_factor(f, names) for f in right)
        body = "{" + " ".join(parts) + "}"
    # strip the outermost synthetic bracket introduced by the loop
    return body[1:-1].strip() or "*"


# ---------------------------------------------------------------------------
# Bounded enumeration
# ---------------------------------------------------------------------------


def enumerate_words(n_letters: int, max_degree: int, max_depth: int) -> list[Word]:
    """All words with degree <= max_degree and depth <= max_depth, ascending.

    Every word appears exactly once; the order is the monomial order.
    """
    if max_degree < 0 or max_depth < 0:
        raise ValueError("bounds must be non-negative")
    memo: dict = {}
    out = _words_upto(n_letters, max_degree, max_depth, memo)
    return sorted(out)


def _words_upto(n: int, d: int, k: int, memo: dict) -> list[Word]:
    key = (d, k)
    if key in memo:
        return memo[key]
    factors: list[tuple[Factor, int]] = []
    if d >= 1:
        factors.extend((i, 1) for i in range(n))
        if k >= 1:
            for inner in _words_upto(n, d - 1, k - 1, memo):
                factors.append((inner, inner.degree + 1))
    words: list[Word] = []

    def extend(prefix: tuple, remaining: int):
        words.append(word(prefix))
        for f, fd in factors:
            if fd <= remaining:
                extend(prefix + (f,), remaining - fd)

    extend((), d)
    memo[key] = words
    return words


def iter_subword_sites(w: Word) -> Iterator[tuple[Context, Word]]:
    """Every (context, subword) pair with context.substitute(subword) == w.

    Subwords are non-empty consecutive factor runs at every nesting level,
    scanned outermost level first, left to right, shorter runs first.
    """
    stack: list[tuple[tuple, tuple]] = [((((), ()),), w.factors)]
    while stack:
        frames_prefix, factors = stack.pop(0)
        b = len(factors)
        for i in range(b):
            for j in range(i + 1, b + 1):
                run = factors[i:j]
                outer = frames_prefix[:-1]
                pl, pr = frames_prefix[-1]
                frames = outer + ((pl + factors[:i], factors[j:] + pr),)
                yield Context(frames), word(run)
        for i, f in enumerate(factors):
            if not isinstance(f, int):
                pl, pr = frames_prefix[-1]
                inner_frames = (frames_prefix[:-1]
                                + ((pl + factors[:i], factors[i + 1:] + pr),)
                                + (((), ()),))
                stack.append((inner_frames, f.factors))

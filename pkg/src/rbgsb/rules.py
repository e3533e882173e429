"""Rewriting rules for the enveloping Rota-Baxter algebra of an RB Lie algebra.

Two rule sets are provided.  The core set ``S`` consists of the
bracket-of-letter rules, the letter-straightening rules, and the operator
relation on bracket pairs.  The saturated set ``T`` adds three families
obtained by substituting operator images for brackets of letters; their
leading monomials involve the leading letter of P(x), written ``ell(x)``
below.

Families (monic; ``lam`` is the weight):

==============  =======================  =========================================
family          leading monomial         rule element
==============  =======================  =========================================
BRACKET_LETTER  {x}                      {x} - P(x)
DESC_PAIR       x y   (x > y)            xy - yx - [x,y]
BRACKET_PAIR    {u} {v}                  {u}{v} - {u{v}} - {{u}v} - lam*{uv}
P_LEAD_LEFT     ell(x) {u}               (P(x){u} - {x{u}} - {P(x)u} - lam*{xu}) / lc
P_LEAD_RIGHT    {u} ell(x)               ({u}P(x) - {uP(x)} - {{u}x} - lam*{ux}) / lc
P_LEAD_PAIR     ell(x) ell(y)            (P(x)P(y) - {xP(y)} - {P(x)y} - lam*{xy}) / lc
==============  =======================  =========================================

``P_LEAD_PAIR`` is instantiated only when ``ell(x) > ell(y)``: an instance
whose leading pair is not strictly descending removes a nondescending letter
pair from the irreducible set, which contradicts the classical
Poincare-Birkhoff-Witt slice, and turns reduction into a nonterminating
descent ``zz -> {zz} -> {{zz}} -> ...`` whenever ``ell`` fixes a letter.
The ideal generated is unaffected (those elements are consequences of the
core set), so the restriction trades bounded completeness for a usable
normal-form engine; the confluence checker reports the loss explicitly.

Letters with ``P(x) = 0`` are admitted only in degenerate mode: the affected
families are then instantiated from the unnormalized elements with their
actual leading monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

from .algebra import DegenerateOperatorError, RBLieAlgebra
from .terms import (Context, Poly, Word, bracket, concat, letter, unparse_context,
                    unparse_word, word)


class Family(IntEnum):
    BRACKET_LETTER = 1
    DESC_PAIR = 2
    BRACKET_PAIR = 3
    P_LEAD_LEFT = 4
    P_LEAD_RIGHT = 5
    P_LEAD_PAIR = 6
    EXTENSION = 7          # concrete rules added by the completion probe


_FAMILY_NAMES = {
    Family.BRACKET_LETTER: "bracket_letter",
    Family.DESC_PAIR: "desc_pair",
    Family.BRACKET_PAIR: "bracket_pair",
    Family.P_LEAD_LEFT: "p_lead_left",
    Family.P_LEAD_RIGHT: "p_lead_right",
    Family.P_LEAD_PAIR: "p_lead_pair",
    Family.EXTENSION: "extension",
}


class RuleConsistencyError(RuntimeError):
    """Computed leading monomial disagrees with the family's declared form."""


# Priority used to pick among several occurrences inside one monomial.  The
# bracket-pair family comes first: expanding an adjacent bracket pair before
# rewriting brackets of letters inside it follows the standard
# Rota-Baxter-word reduction and is what makes the trivial compositions
# actually cancel; the bracket-of-letter family precedes the operator-image
# families because the latter reproduce their own pattern one level deeper
# and must only fire when nothing shrinking applies at the same monomial.
_FAMILY_PRIORITY = {
    Family.BRACKET_PAIR: 0,
    Family.BRACKET_LETTER: 1,
    Family.DESC_PAIR: 2,
    Family.P_LEAD_LEFT: 3,
    Family.P_LEAD_RIGHT: 4,
    Family.P_LEAD_PAIR: 5,
    Family.EXTENSION: 6,
}


@dataclass(frozen=True)
class RuleInstance:
    family: Family
    params: tuple           # letters as ints, schematic words as Word values
    poly: Poly              # monic
    lead: Word
    tail: Poly              # poly minus the leading term

    def params_key(self) -> tuple:
        return tuple((0, p) if isinstance(p, int) else (1, p.key) for p in self.params)

    def sort_key(self) -> tuple:
        return (int(self.family), self.params_key())

    def label(self, names=None) -> str:
        parts = []
        for p in self.params:
            if isinstance(p, int):
                parts.append(names[p] if names else f"x{p}")
            else:
                parts.append(unparse_word(p, names))
        return f"{_FAMILY_NAMES[self.family]}({'; '.join(parts)})"

    def same_rule(self, other: "RuleInstance") -> bool:
        return self.family == other.family and self.params == other.params


@dataclass(frozen=True)
class Occurrence:
    context: Context
    rule: RuleInstance

    def sort_key(self) -> tuple:
        return (_FAMILY_PRIORITY[self.rule.family], self.context.hole_depth,
                self.context.position_path, self.rule.params_key())

    def describe(self, names=None) -> str:
        return f"{self.rule.label(names)} @ {unparse_context(self.context, names)}"


# ---------------------------------------------------------------------------
# Unnormalized rule elements (also the basis of the ideal-equality checks)
# ---------------------------------------------------------------------------


def raw_bracket_letter(alg: RBLieAlgebra, x: int) -> Poly:
    return Poly.of(bracket(letter(x))) - alg.p_poly(x)


def raw_desc_pair(alg: RBLieAlgebra, x: int, y: int) -> Poly:
    return Poly.of(word((x, y))) - Poly.of(word((y, x))) - alg.bracket_poly(x, y)


def raw_bracket_pair(alg: RBLieAlgebra, u: Word, v: Word) -> Poly:
    lam = alg.weight
    return (Poly.of(word((u, v)))
            - Poly.of(bracket(word(u.factors + (v,))))
            - Poly.of(bracket(word((u,) + v.factors)))
            - Poly.of(bracket(concat(u, v)), lam))


def raw_p_lead_left(alg: RBLieAlgebra, x: int, u: Word) -> Poly:
    lam = alg.weight
    px = alg.p_poly(x)
    xu = word((x,) + u.factors)
    return (px.mul_word(word((u,)))
            - Poly.of(bracket(word((x, u))))
            - px.mul_word(u).op()
            - Poly.of(bracket(xu), lam))


def raw_p_lead_right(alg: RBLieAlgebra, u: Word, x: int) -> Poly:
    lam = alg.weight
    px = alg.p_poly(x)
    ux = word(u.factors + (x,))
    return (px.mul_word(word((u,)), on_left=True)
            - px.mul_word(u, on_left=True).op()
            - Poly.of(bracket(word((u, x))))
            - Poly.of(bracket(ux), lam))


def raw_p_lead_pair(alg: RBLieAlgebra, x: int, y: int) -> Poly:
    lam = alg.weight
    px, py = alg.p_poly(x), alg.p_poly(y)
    return (px * py
            - py.mul_word(letter(x), on_left=True).op()
            - px.mul_word(letter(y)).op()
            - Poly.of(bracket(word((x, y))), lam))


# ---------------------------------------------------------------------------
# Rule system
# ---------------------------------------------------------------------------

_DIVERGENT = object()


class RuleSystem:
    """A rule set bound to an algebra, with matching and normal-form caches.

    ``mode`` selects the core set ("S") or the saturated set ("T").
    ``step_budget`` bounds rule applications per normal-form computation and
    ``depth_guard`` (optional) aborts reductions that create words deeper
    than the guard; both protect against the known nonterminating descents.
    """

    def __init__(self, algebra: RBLieAlgebra, mode: str = "T", *,
                 allow_degenerate: bool = False,
                 step_budget: int = 10 ** 6,
                 depth_guard: int | None = None,
                 extra_rules: tuple = ()):
        if mode not in ("S", "T"):
            raise ValueError("mode must be 'S' or 'T'")
        self.algebra = algebra
        self.mode = mode
        self.step_budget = step_budget
        self.depth_guard = depth_guard
        self.degenerate = set(algebra.degenerate_letters())
        if self.degenerate and not allow_degenerate:
            raise DegenerateOperatorError(
                "operator vanishes on part of the basis; degenerate mode required")
        self.allow_degenerate = allow_degenerate
        # leading-letter data for the saturated families
        self.ell: dict[int, int] = {}
        self.lead_coeff: dict[int, Fraction] = {}
        for i in range(algebra.dim):
            vec = algebra.p_vec(i)
            if vec:
                z = max(vec)
                self.ell[i] = z
                self.lead_coeff[i] = vec[z]
        self.preimages: dict[int, list[int]] = {}
        for x, z in sorted(self.ell.items()):
            self.preimages.setdefault(z, []).append(x)
        self.desc_pairs: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for x, zx in sorted(self.ell.items()):
            for y, zy in sorted(self.ell.items()):
                if zx > zy:
                    self.desc_pairs.setdefault((zx, zy), []).append((x, y))
        self.extra_rules: tuple[RuleInstance, ...] = tuple(extra_rules)
        self.concrete_leads: dict[Word, list[RuleInstance]] = {}
        for r in self.extra_rules:
            self.concrete_leads.setdefault(r.lead, []).append(r)
        if self.mode == "T":
            for r in self._degenerate_concrete_rules():
                self.concrete_leads.setdefault(r.lead, []).append(r)
        self._concrete_breadths = sorted({w.breadth for w in self.concrete_leads})
        self._instances: dict[tuple, RuleInstance] = {}
        self._first_occ: dict[Word, Occurrence | None] = {}
        self._nf: dict[Word, object] = {}

    # -- construction of instances ----------------------------------------

    def instance(self, family: Family, params: tuple) -> RuleInstance:
        key = (int(family), params)
        inst = self._instances.get(key)
        if inst is None:
            inst = self._build(family, params)
            self._instances[key] = inst
        return inst

    def _finish(self, family: Family, params: tuple, poly: Poly,
                expected_lead: Word | None) -> RuleInstance:
        if poly.is_zero():
            raise RuleConsistencyError(f"zero element for {family.name}{params}")
        poly = poly.monic()
        lead = poly.lead()
        if expected_lead is not None and lead is not expected_lead:
            raise RuleConsistencyError(
                f"{family.name}{params}: computed lead {unparse_word(lead)} "
                f"differs from declared {unparse_word(expected_lead)}")
        return RuleInstance(family, params, poly, lead, poly.tail())

    def _build(self, family: Family, params: tuple) -> RuleInstance:
        alg = self.algebra
        if family == Family.BRACKET_LETTER:
            (x,) = params
            return self._finish(family, params, raw_bracket_letter(alg, x),
                                bracket(letter(x)))
        if family == Family.DESC_PAIR:
            x, y = params
            if not x > y:
                raise ValueError("descending pair requires x > y")
            return self._finish(family, params, raw_desc_pair(alg, x, y), word((x, y)))
        if family == Family.BRACKET_PAIR:
            u, v = params
            return self._finish(family, params, raw_bracket_pair(alg, u, v),
                                word((u, v)))
        if family == Family.P_LEAD_LEFT:
            x, u = params
            self._require_strict(x)
            return self._finish(family, params,
                                raw_p_lead_left(alg, x, u).scale(1 / self.lead_coeff[x]),
                                word((self.ell[x], u)))
        if family == Family.P_LEAD_RIGHT:
            u, x = params
            self._require_strict(x)
            return self._finish(family, params,
                                raw_p_lead_right(alg, u, x).scale(1 / self.lead_coeff[x]),
                                word((u, self.ell[x])))
        if family == Family.P_LEAD_PAIR:
            x, y = params
            self._require_strict(x)
            self._require_strict(y)
            if not self.ell[x] > self.ell[y]:
                raise ValueError("operator pair requires ell(x) > ell(y)")
            c = self.lead_coeff[x] * self.lead_coeff[y]
            return self._finish(family, params,
                                raw_p_lead_pair(alg, x, y).scale(1 / c),
                                word((self.ell[x], self.ell[y])))
        raise ValueError(f"cannot build family {family}")

    def _require_strict(self, x: int) -> None:
        if x in self.degenerate:
            raise DegenerateOperatorError(
                f"P({self.algebra.names[x]}) = 0 has no leading letter")

    def _degenerate_concrete_rules(self) -> list[RuleInstance]:
        """Concrete instances replacing lead-letter families on the kernel."""
        out = []
        alg = self.algebra
        for x in sorted(self.degenerate):
            # operator-pair elements with a degenerate side have concrete leads
            for y in range(alg.dim):
                for (a, b) in ((x, y), (y, x)):
                    if a == x or b == x:
                        p = raw_p_lead_pair(alg, a, b)
                        if not p.is_zero() and (a in self.degenerate or b in self.degenerate):
                            out.append(self._finish(Family.EXTENSION,
                                                    ("p_pair", a, b), p, None))
        # dedupe identical (lead, poly) pairs
        seen = set()
        uniq = []
        for r in out:
            key = (r.lead, frozenset(r.poly.terms.items()))
            if key not in seen:
                seen.add(key)
                uniq.append(r)
        return uniq

    def extend(self, new_rules) -> "RuleSystem":
        """Fresh system with extra concrete rules (used by the probe)."""
        return RuleSystem(self.algebra, self.mode,
                          allow_degenerate=self.allow_degenerate,
                          step_budget=self.step_budget,
                          depth_guard=self.depth_guard,
                          extra_rules=self.extra_rules + tuple(new_rules))

    # -- matching -----------------------------------------------------------

    def occurrences(self, w: Word) -> list[Occurrence]:
        """All occurrences of rule leading monomials inside ``w``, sorted.

        Scan order: rule family, then hole depth, then position, then
        parameters; deterministic and reproducible.
        """
        return sorted(self._scan(w), key=Occurrence.sort_key)

    def first_occurrence(self, w: Word) -> Occurrence | None:
        occ = self._first_occ.get(w, _MISSING)
        if occ is _MISSING:
            found = self._scan(w)
            occ = min(found, key=Occurrence.sort_key) if found else None
            self._first_occ[w] = occ
        return occ

    def _scan(self, w: Word) -> list[Occurrence]:
        out: list[Occurrence] = []
        saturated = self.mode == "T"
        stack = [((((), ()),), w.factors)]
        while stack:
            frames_prefix, factors = stack.pop()
            outer = frames_prefix[:-1]
            pl, pr = frames_prefix[-1]
            b = len(factors)
            for i in range(b):
                f1 = factors[i]

                def ctx(j, i=i, outer=outer, pl=pl, pr=pr, factors=factors):
                    return Context(outer + ((pl + factors[:i], factors[j:] + pr),))

                if isinstance(f1, Word):
                    if f1.breadth == 1 and isinstance(f1.factors[0], int):
                        out.append(Occurrence(ctx(i + 1), self.instance(
                            Family.BRACKET_LETTER, (f1.factors[0],))))
                    if saturated and self.degenerate:
                        for rule in self._degenerate_site_rules(f1):
                            out.append(Occurrence(ctx(i + 1), rule))
                if self.concrete_leads:
                    for breadth in self._concrete_breadths:
                        j = i + breadth
                        if j > b:
                            break
                        run = word(factors[i:j])
                        for rule in self.concrete_leads.get(run, ()):
                            out.append(Occurrence(ctx(j), rule))
                if i + 1 < b:
                    f2 = factors[i + 1]
                    if isinstance(f1, int):
                        if isinstance(f2, int):
                            if f1 > f2:
                                out.append(Occurrence(ctx(i + 2), self.instance(
                                    Family.DESC_PAIR, (f1, f2))))
                            if saturated:
                                for (x, y) in self.desc_pairs.get((f1, f2), ()):
                                    out.append(Occurrence(ctx(i + 2), self.instance(
                                        Family.P_LEAD_PAIR, (x, y))))
                        elif saturated:
                            for x in self.preimages.get(f1, ()):
                                out.append(Occurrence(ctx(i + 2), self.instance(
                                    Family.P_LEAD_LEFT, (x, f2))))
                    else:
                        if isinstance(f2, Word):
                            out.append(Occurrence(ctx(i + 2), self.instance(
                                Family.BRACKET_PAIR, (f1, f2))))
                        elif saturated:
                            for x in self.preimages.get(f2, ()):
                                out.append(Occurrence(ctx(i + 2), self.instance(
                                    Family.P_LEAD_RIGHT, (f1, x))))
            for i, f in enumerate(factors):
                if isinstance(f, Word):
                    inner = (outer
                             + ((pl + factors[:i], factors[i + 1:] + pr),)
                             + (((), ()),))
                    stack.append((inner, f.factors))
        return out

    def _degenerate_site_rules(self, content_holder: Word) -> list[RuleInstance]:
        """Schematic kernel-letter rules whose computed lead is this bracket."""
        site = word((content_holder,))
        content = content_holder
        rules = []
        if content.breadth >= 1:
            first, last = content.factors[0], content.factors[-1]
            cands: list[tuple] = []
            if isinstance(first, int) and first in self.degenerate:
                if content.breadth == 2 and isinstance(content.factors[1], Word):
                    cands.append(("left", first, content.factors[1]))
                cands.append(("left", first, word(content.factors[1:])))
            if isinstance(last, int) and last in self.degenerate:
                if content.breadth == 2 and isinstance(content.factors[0], Word):
                    cands.append(("right", last, content.factors[0]))
                cands.append(("right", last, word(content.factors[:-1])))
            alg = self.algebra
            seen = set()
            for kind, x, u in cands:
                if (kind, x, u) in seen:
                    continue
                seen.add((kind, x, u))
                raw = (raw_p_lead_left(alg, x, u) if kind == "left"
                       else raw_p_lead_right(alg, u, x))
                if raw.is_zero():
                    continue
                inst = self._finish(Family.EXTENSION, (kind, x, u), raw, None)
                if inst.lead is site:
                    rules.append(inst)
        return rules


_MISSING = object()


def instantiate(family: Family, params: tuple, system: RuleSystem) -> RuleInstance:
    """Build (or fetch) a monic rule instance; validates the leading form."""
    return system.instance(family, params)


def occurrences(w: Word, system: RuleSystem) -> list[Occurrence]:
    return system.occurrences(w)

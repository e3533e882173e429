"""Arithmetic in the quotient algebra and enumeration of its candidate basis.

Elements are stored pre-normalized, so equality of cosets is structural
equality of polynomials.  The candidate linear basis consists of the words
containing no leading-monomial pattern; it is enumerated by generating all
bounded words and filtering with a pattern matcher that is coded
independently of the occurrence scanner used for rewriting, so the two can
cross-validate each other.

When the rule system fails to be confluent at the sizes touched (the
bundled saturated systems do fail on identity-like operators), products of
equivalent elements may normalize differently or exhaust the reduction
budget; the property report records each such failure instead of masking
it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .rules import RuleSystem
from .rewrite import StepBudgetExceeded, normal_form
from .terms import Poly, Word, enumerate_words, letter, unparse_poly, word


class EnvelopingElement:
    """A coset of the operated ideal, kept in normal form."""

    __slots__ = ("system", "poly")

    def __init__(self, system: RuleSystem, poly: Poly, *, _canonical=False):
        self.system = system
        self.poly = poly if _canonical else normal_form(poly, system)

    def __eq__(self, other):
        return (isinstance(other, EnvelopingElement)
                and self.system is other.system and self.poly == other.poly)

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"EnvelopingElement({unparse_poly(self.poly, self.system.algebra.names)})"

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __add__(self, other: "EnvelopingElement") -> "EnvelopingElement":
        return EnvelopingElement(self.system, self.poly + other.poly, _canonical=True)

    def __sub__(self, other: "EnvelopingElement") -> "EnvelopingElement":
        return EnvelopingElement(self.system, self.poly - other.poly, _canonical=True)

    def scalar_mul(self, c) -> "EnvelopingElement":
        return EnvelopingElement(self.system, self.poly.scale(c), _canonical=True)

    def __mul__(self, other: "EnvelopingElement") -> "EnvelopingElement":
        return EnvelopingElement(self.system, self.poly * other.poly)

    def apply_rb(self) -> "EnvelopingElement":
        return EnvelopingElement(self.system, self.poly.op())


def embed(system: RuleSystem, a: Poly) -> EnvelopingElement:
    """Image of a Lie-algebra element (letters are already irreducible)."""
    for w in a.terms:
        if not w.is_letter():
            raise ValueError("embed expects a combination of basis letters")
    return EnvelopingElement(system, a, _canonical=True)


def embed_letter(system: RuleSystem, i: int) -> EnvelopingElement:
    return embed(system, Poly.of(letter(i)))


def multiply(a: EnvelopingElement, b: EnvelopingElement) -> EnvelopingElement:
    return a * b


def add(a: EnvelopingElement, b: EnvelopingElement) -> EnvelopingElement:
    return a + b


def scalar_mul(c, a: EnvelopingElement) -> EnvelopingElement:
    return a.scalar_mul(c)


def apply_rb(a: EnvelopingElement) -> EnvelopingElement:
    return a.apply_rb()


# ---------------------------------------------------------------------------
# Independent pattern matcher (generation side)
# ---------------------------------------------------------------------------


def contains_reducible_pattern(w: Word, system: RuleSystem) -> bool:
    """True iff some subword of ``w`` is a rule leading monomial.

    Independent re-implementation of the matching criterion: direct shape
    predicates over adjacent factors, recursing into bracket contents.
    """
    saturated = system.mode == "T"
    image = system.preimages  # lead letter -> preimage letters
    concrete = system.concrete_leads

    def scan(factors: tuple) -> bool:
        n = len(factors)
        for i, f in enumerate(factors):
            if isinstance(f, Word):
                if f.breadth == 1 and isinstance(f.factors[0], int):
                    return True                      # bracket of a letter
                if saturated and system.degenerate and system._degenerate_site_rules(f):
                    return True
                if scan(f.factors):
                    return True
            if i + 1 < n:
                g = factors[i + 1]
                if isinstance(f, int) and isinstance(g, int):
                    if f > g:
                        return True                  # descending letter pair
                    if saturated and (f, g) in system.desc_pairs:
                        return True                  # descending operator-image pair
                elif isinstance(f, Word) and isinstance(g, Word):
                    return True                      # adjacent brackets
                elif saturated and isinstance(f, int) and isinstance(g, Word):
                    if f in image:
                        return True                  # image letter before a bracket
                elif saturated and isinstance(f, Word) and isinstance(g, int):
                    if g in image:
                        return True                  # image letter after a bracket
        if concrete:
            for lead in concrete:
                lb = lead.breadth
                for i in range(n - lb + 1):
                    if word(factors[i:i + lb]) is lead:
                        return True
        return False

    return scan(w.factors)


def enumerate_irr_basis(system: RuleSystem, max_degree: int, max_depth: int) -> list[Word]:
    """Pattern-free words within bounds, ascending; the candidate basis."""
    return [w for w in enumerate_words(system.algebra.dim, max_degree, max_depth)
            if not contains_reducible_pattern(w, system)]


# ---------------------------------------------------------------------------
# Structural property report
# ---------------------------------------------------------------------------


@dataclass
class PropertyCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class HomReport:
    checks: list[PropertyCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[PropertyCheck]:
        return [c for c in self.checks if not c.ok]

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(PropertyCheck(name, ok, detail))


def _random_element(system: RuleSystem, rng: random.Random,
                    basis_words: list[Word]) -> EnvelopingElement:
    nterms = rng.randint(1, 3)
    terms: dict = {}
    for _ in range(nterms):
        w = basis_words[rng.randrange(len(basis_words))]
        c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
        terms[w] = terms.get(w, Fraction(0)) + c
    return EnvelopingElement(system, Poly(terms), _canonical=True)


def verify_hom_properties(system: RuleSystem, sample_size: int = 200,
                          seed: int = 0) -> HomReport:
    """Exact structural checks of the quotient.

    Basis-level: commutator compatibility and operator compatibility for all
    basis tuples, and injectivity on letters.  Sampled: associativity and
    the Rota-Baxter identity on random elements.  A reduction that exceeds
    its budget is reported as a failing check with the witness inputs.
    """
    alg = system.algebra
    names = alg.names
    report = HomReport()
    lam = alg.weight

    def nf_str(e: EnvelopingElement) -> str:
        return unparse_poly(e.poly, names)

    for i in range(alg.dim):
        for j in range(i):
            try:
                ei, ej = embed_letter(system, i), embed_letter(system, j)
                lhs = ei * ej - ej * ei
                rhs = embed(system, alg.bracket_poly(i, j))
                ok = lhs == rhs
                detail = "" if ok else f"lhs={nf_str(lhs)}, rhs={nf_str(rhs)}"
            except StepBudgetExceeded as exc:
                ok, detail = False, f"budget: {exc}"
            report.record(f"commutator[{names[i]},{names[j]}]", ok, detail)
    for i in range(alg.dim):
        try:
            lhs = embed_letter(system, i).apply_rb()
            rhs = embed(system, alg.p_poly(i))
            ok = lhs == rhs
            detail = "" if ok else f"lhs={nf_str(lhs)}, rhs={nf_str(rhs)}"
        except StepBudgetExceeded as exc:
            ok, detail = False, f"budget: {exc}"
        report.record(f"operator[{names[i]}]", ok, detail)
    distinct = len({normal_form(Poly.of(letter(i)), system).lead()
                    for i in range(alg.dim)}) == alg.dim
    report.record("letters-distinct", distinct)

    rng = random.Random(seed)
    basis_words = enumerate_irr_basis(system, 3, 2)
    rb_bad = assoc_bad = 0
    rb_witness = assoc_witness = ""
    for k in range(sample_size):
        a = _random_element(system, rng, basis_words)
        b = _random_element(system, rng, basis_words)
        c = _random_element(system, rng, basis_words)
        try:
            lhs = a.apply_rb() * b.apply_rb()
            rhs = ((a * b.apply_rb()).apply_rb()
                   + (a.apply_rb() * b).apply_rb()
                   + (a * b).apply_rb().scalar_mul(lam))
            if lhs != rhs and not rb_witness:
                rb_witness = (f"#{k}: a={nf_str(a)}, b={nf_str(b)}: "
                              f"lhs={nf_str(lhs)}, rhs={nf_str(rhs)}")
            rb_bad += lhs != rhs
        except StepBudgetExceeded as exc:
            rb_bad += 1
            if not rb_witness:
                rb_witness = f"#{k}: budget: {exc}"
        try:
            ok = (a * b) * c == a * (b * c)
            if not ok and not assoc_witness:
                assoc_witness = f"#{k}: a={nf_str(a)}, b={nf_str(b)}, c={nf_str(c)}"
            assoc_bad += not ok
        except StepBudgetExceeded as exc:
            assoc_bad += 1
            if not assoc_witness:
                assoc_witness = f"#{k}: budget: {exc}"
    report.record("rota-baxter-identity",
                  rb_bad == 0, f"{rb_bad}/{sample_size} failed; first: {rb_witness}"
                  if rb_bad else f"{sample_size} samples")
    report.record("associativity",
                  assoc_bad == 0, f"{assoc_bad}/{sample_size} failed; first: {assoc_witness}"
                  if assoc_bad else f"{sample_size} samples")
    return report

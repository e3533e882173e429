"""Normal forms and bounded confluence checking for enveloping Rota-Baxter
algebras of finite-dimensional Rota-Baxter Lie algebras."""

from .algebra import (AlgebraFormatError, DegenerateOperatorError, RBLieAlgebra,
                      ValidationReport, load_algebra, load_algebra_file, validate)
from .enveloping import (EnvelopingElement, add, apply_rb, contains_reducible_pattern,
                         embed, embed_letter, enumerate_irr_basis, multiply,
                         scalar_mul, verify_hom_properties)
from .gsb import (CompositionCase, GsbReport, ProbeResult, check_case, check_gsb,
                  completion_probe, enumerate_ambiguities, rule_instances)
from .order import OrderVerdict, compare, leading_monomial
from .rewrite import (ReductionTrace, StepBudgetExceeded, ideal_member, normal_form,
                      reduce_once)
from .rules import Family, Occurrence, RuleInstance, RuleSystem, instantiate, occurrences
from .terms import (Context, ParseError, Poly, UnknownLetterError, Word,
                    ZeroPolynomialError, bracket, breadth, concat, degree, depth,
                    enumerate_words, letter, parse_poly, parse_word, substitute,
                    substitute_poly, unparse_poly, unparse_word, word)

__all__ = [name for name in dir() if not name.startswith("_")]

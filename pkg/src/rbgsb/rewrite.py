"""Reduction of operated polynomials to normal form modulo a rule system.

The deterministic strategy always rewrites the greatest reducible monomial
of the current polynomial, using the least occurrence in the fixed scan
order (family, hole depth, position, parameters).  Under this strategy the
occurrence chosen for a monomial depends on that monomial alone, so the
normal form map is linear; the fast path below exploits this by reducing
each support word once and caching the result per rule system.

Reduction of the saturated system does not terminate on every input: some
rule tails embed their own leading pattern one bracket deeper (see the
rules module).  Every reduction is therefore guarded by a step budget and
an optional word-depth guard; exceeding either raises
:class:`StepBudgetExceeded`, and the offending words are remembered so
later encounters fail fast.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .rules import Occurrence, RuleSystem, _DIVERGENT
from .terms import Poly, Word, unparse_context, unparse_word


class StepBudgetExceeded(RuntimeError):
    def __init__(self, message: str, witness: Word | None = None):
        super().__init__(message)
        self.witness = witness


@dataclass
class TraceStep:
    monomial: Word
    coeff: Fraction
    occurrence: Occurrence
    result_size: int

    def describe(self, names=None) -> str:
        return (f"{self.occurrence.describe(names)} : "
                f"{unparse_word(self.monomial, names)} -> {self.result_size} terms")


@dataclass
class ReductionTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def append(self, step: TraceStep) -> None:
        self.steps.append(step)

    def __iter__(self) -> Iterator[TraceStep]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def format(self, names=None) -> str:
        return "\n".join(s.describe(names) for s in self.steps)


def reduce_once(f: Poly, system: RuleSystem) -> tuple[Poly, TraceStep] | None:
    """One deterministic step; ``None`` when ``f`` is irreducible.

    Rewrites the greatest reducible monomial; every word it introduces is
    strictly smaller in the monomial order.
    """
    for w in sorted(f.terms, key=lambda t: t.key, reverse=True):
        occ = system.first_occurrence(w)
        if occ is not None:
            return _apply(f, w, occ), TraceStep(w, f.terms[w], occ, 0)
    return None


def _apply(f: Poly, w: Word, occ: Occurrence) -> Poly:
    c = f.terms[w]
    acc = dict(f.terms)
    del acc[w]
    for t, ct in occ.rule.tail.terms.items():
        tw = occ.context.substitute(t)
        nc = acc.get(tw, _FZERO) - c * ct
        if nc:
            acc[tw] = nc
        else:
            acc.pop(tw, None)
    return Poly(acc, _normalized=True)


_FZERO = Fraction(0)


def normal_form(f: Poly, system: RuleSystem, *,
                trace: ReductionTrace | None = None,
                rng=None,
                budget: int | None = None) -> Poly:
    """Fixpoint of reduction.

    With ``trace`` the plain whole-polynomial loop records each step.  With
    ``rng`` a randomized strategy (random reducible monomial, random
    occurrence) replaces the deterministic one.  Otherwise a per-word cached
    strategy is used; all three agree whenever they terminate and the system
    is confluent on the inputs touched.
    """
    if rng is not None:
        return _nf_random(f, system, rng, budget)
    if trace is not None:
        return _nf_traced(f, system, trace, budget)
    try:
        acc: dict = {}
        for w, c in f.terms.items():
            part = _nf_word(system, w)
            for t, ct in part.items():
                nc = acc.get(t, _FZERO) + c * ct
                if nc:
                    acc[t] = nc
                else:
                    acc.pop(t, None)
        return Poly(acc, _normalized=True)
    except StepBudgetExceeded:
        # The per-word decomposition can diverge on polynomials whose
        # whole-polynomial reduction terminates: rewriting the greatest
        # monomial first lets mirror terms cancel before they are ever
        # expanded.  Fall back to the literal strategy.
        return _nf_traced(f, system, None, budget)


def ideal_member(f: Poly, system: RuleSystem) -> bool:
    """True iff the normal form vanishes (membership in the operated ideal,
    exact when the system is confluent at the sizes touched)."""
    return normal_form(f, system).is_zero()


def _guard_word(system: RuleSystem, w: Word) -> bool:
    g = system.depth_guard
    return g is not None and w.depth > g


def _nf_word(system: RuleSystem, w0: Word) -> dict:
    """Normal form of a single word as a terms dict, cached on the system."""
    cache = system._nf
    hit = cache.get(w0)
    if hit is _DIVERGENT:
        raise StepBudgetExceeded(
            f"reduction of {unparse_word(w0)} previously exceeded its budget", w0)
    if hit is not None:
        return hit
    budget = system.step_budget
    steps = 0
    # frame: [word, pending list of (coeff, child word), next index, accumulator]
    stack: list[list] = []

    def poison_and_raise(msg: str, witness: Word):
        for fr in stack:
            cache[fr[0]] = _DIVERGENT
        raise StepBudgetExceeded(msg, witness)

    def open_frame(w: Word):
        nonlocal steps
        occ = system.first_occurrence(w)
        if occ is None:
            cache[w] = {w: Fraction(1)}
            return None
        steps += 1
        if steps > budget:
            cache[w] = _DIVERGENT
            poison_and_raise(f"step budget ({budget}) exceeded at "
                             f"{unparse_word(w)}", w)
        pending = []
        for t, ct in occ.rule.tail.terms.items():
            tw = occ.context.substitute(t)
            if _guard_word(system, tw):
                cache[w] = _DIVERGENT
                poison_and_raise(
                    f"depth guard ({system.depth_guard}) exceeded at "
                    f"{unparse_word(tw)}", tw)
            pending.append((-ct, tw))
        return [w, pending, 0, {}]

    frame = open_frame(w0)
    if frame is None:
        return cache[w0]
    stack.append(frame)
    while stack:
        fr = stack[-1]
        w, pending, idx, acc = fr
        if idx == len(pending):
            result = acc
            cache[w] = result
            stack.pop()
            if stack:
                parent = stack[-1]
                coeff, _ = parent[1][parent[2]]
                parent[2] += 1
                pacc = parent[3]
                for t, ct in result.items():
                    nc = pacc.get(t, _FZERO) + coeff * ct
                    if nc:
                        pacc[t] = nc
                    else:
                        pacc.pop(t, None)
            continue
        coeff, child = pending[idx]
        hit = cache.get(child)
        if hit is _DIVERGENT:
            poison_and_raise(
                f"reduction of {unparse_word(child)} previously exceeded its budget",
                child)
        if hit is not None:
            fr[2] += 1
            for t, ct in hit.items():
                nc = acc.get(t, _FZERO) + coeff * ct
                if nc:
                    acc[t] = nc
                else:
                    acc.pop(t, None)
            continue
        sub = open_frame(child)
        if sub is None:
            continue  # cached as irreducible; next pass folds it in
        stack.append(sub)
    return cache[w0]


def _nf_traced(f: Poly, system: RuleSystem, trace: ReductionTrace | None,
               budget: int | None) -> Poly:
    """Whole-polynomial greatest-monomial-first loop.

    Every rewrite introduces only words strictly below the one rewritten, so
    a single descending pass over an agenda with ordered insertions visits
    each monomial exactly when all contributions to it have arrived.
    """
    limit = system.step_budget if budget is None else budget
    guard = system.depth_guard
    terms = dict(f.terms)
    agenda = sorted((t.key, t) for t in terms)    # ascending; walk from the end
    scheduled = set(terms)
    steps = 0
    pos = len(agenda) - 1
    while pos >= 0:
        w = agenda[pos][1]
        pos -= 1
        c = terms.get(w)
        if not c:
            continue
        occ = system.first_occurrence(w)
        if occ is None:
            continue
        steps += 1
        if steps > limit:
            raise StepBudgetExceeded(
                f"step budget ({limit}) exceeded after rewriting "
                f"{unparse_word(w)}", w)
        del terms[w]
        for t, ct in occ.rule.tail.terms.items():
            tw = occ.context.substitute(t)
            if guard is not None and tw.depth > guard:
                raise StepBudgetExceeded(
                    f"depth guard ({guard}) exceeded at {unparse_word(tw)}", tw)
            nc = terms.get(tw, _FZERO) - c * ct
            if nc:
                terms[tw] = nc
            else:
                terms.pop(tw, None)
            if tw not in scheduled:
                scheduled.add(tw)
                insort(agenda, (tw.key, tw), hi=pos + 1)
                pos += 1
        if trace is not None:
            trace.append(TraceStep(w, c, occ, len(terms)))
    return Poly(terms, _normalized=True)


def _nf_random(f: Poly, system: RuleSystem, rng, budget: int | None) -> Poly:
    limit = system.step_budget if budget is None else budget
    cur = f
    steps = 0
    while True:
        reducible = [w for w in sorted(cur.terms, key=lambda t: t.key)
                     if system.first_occurrence(w) is not None]
        if not reducible:
            return cur
        w = reducible[rng.randrange(len(reducible))]
        occs = system.occurrences(w)
        occ = occs[rng.randrange(len(occs))]
        cur = _apply(cur, w, occ)
        steps += 1
        if steps > limit:
            raise StepBudgetExceeded(
                f"step budget ({limit}) exceeded (randomized strategy) at "
                f"{unparse_word(w)}", w)
        if system.depth_guard is not None:
            for t in cur.terms:
                if t.depth > system.depth_guard:
                    raise StepBudgetExceeded(
                        f"depth guard ({system.depth_guard}) exceeded at "
                        f"{unparse_word(t)}", t)

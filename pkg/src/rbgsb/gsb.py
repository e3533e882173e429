"""Bounded critical-pair checking and a completion probe.

Ambiguities between rule instances are enumerated exhaustively below a
degree/depth bound on the ambiguity word: intersection overlaps between
leading monomials, and inclusion of one leading monomial inside another
(including the equal-lead case of two distinct rules).  Each composition is
reduced; a zero normal form certifies triviality.  Nonzero residuals and
reductions that exhaust their budget are reported, never silently dropped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator

from .rules import Family, RuleInstance, RuleSystem
from .rewrite import StepBudgetExceeded, normal_form
from .terms import (Poly, Word, enumerate_words, unparse_context, unparse_poly,
                    unparse_word, word)

INTERSECTION = "intersection"
INCLUDING = "including"

TRIVIAL = "trivial"
NONREDUCED = "non-reduced"
BUDGET = "budget-exceeded"


@dataclass
class CompositionCase:
    index: int
    kind: str                      # INTERSECTION | INCLUDING
    f: RuleInstance
    g: RuleInstance
    ambiguity: Word
    witness: tuple                 # (u, v) words, or (context,) for inclusions
    composition: Poly
    verdict: str | None = None
    residual: Poly | None = None

    def witness_str(self, names=None) -> str:
        if self.kind == INTERSECTION:
            u, v = self.witness
            return f"u={unparse_word(u, names)}, v={unparse_word(v, names)}"
        (q,) = self.witness
        return f"q={unparse_context(q, names)}"


@dataclass(frozen=True)
class FailureRecord:
    index: int
    kind: str
    f_label: str
    g_label: str
    ambiguity: str
    witness: str
    verdict: str
    residual: str | None          # canonical text; None when the budget ran out

    def describe(self) -> str:
        head = (f"[{self.kind}] {self.f_label} / {self.g_label} "
                f"at {self.ambiguity} ({self.witness})")
        if self.verdict == NONREDUCED:
            return head + f" residual: {self.residual}"
        return head + " (reduction exceeded its budget)"


def _failure_record(case: CompositionCase, names) -> FailureRecord:
    return FailureRecord(
        index=case.index,
        kind=case.kind,
        f_label=case.f.label(names),
        g_label=case.g.label(names),
        ambiguity=unparse_word(case.ambiguity, names),
        witness=case.witness_str(names),
        verdict=case.verdict,
        residual=None if case.residual is None else unparse_poly(case.residual, names),
    )


@dataclass
class GsbReport:
    mode: str
    max_degree: int
    max_depth: int
    total_cases: int = 0
    counts: dict = field(default_factory=dict)   # (kind, f_family, g_family) -> n
    failures: list[FailureRecord] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def nonreduced(self) -> list[FailureRecord]:
        return [c for c in self.failures if c.verdict == NONREDUCED]

    def budget_exceeded(self) -> list[FailureRecord]:
        return [c for c in self.failures if c.verdict == BUDGET]


def rule_instances(system: RuleSystem, max_degree: int, max_depth: int) -> list[RuleInstance]:
    """Every rule instance whose leading monomial fits the bounds, sorted."""
    alg = system.algebra
    n = alg.dim
    out: list[RuleInstance] = []
    if max_degree >= 2 and max_depth >= 1:
        for x in range(n):
            out.append(system.instance(Family.BRACKET_LETTER, (x,)))
    if max_degree >= 2:
        for x in range(n):
            for y in range(x):
                out.append(system.instance(Family.DESC_PAIR, (x, y)))
    if system.mode == "T" and max_degree >= 2:
        for (zx, zy), pairs in sorted(system.desc_pairs.items()):
            for (x, y) in pairs:
                out.append(system.instance(Family.P_LEAD_PAIR, (x, y)))
    if max_degree >= 2 and max_depth >= 1:
        inner = enumerate_words(n, max_degree - 2, max_depth - 1)
        for u in inner:
            for v in inner:
                if u.degree + v.degree + 2 <= max_degree:
                    out.append(system.instance(Family.BRACKET_PAIR, (u, v)))
        if system.mode == "T":
            for x in range(n):
                if x in system.degenerate:
                    continue
                for u in inner:
                    if u.degree + 2 <= max_degree:
                        out.append(system.instance(Family.P_LEAD_LEFT, (x, u)))
                        out.append(system.instance(Family.P_LEAD_RIGHT, (u, x)))
    for lead, rules in sorted(system.concrete_leads.items()):
        if lead.degree <= max_degree and lead.depth <= max_depth:
            out.extend(rules)
    out += _degenerate_schematic_instances(system, max_degree, max_depth)
    out.sort(key=RuleInstance.sort_key)
    return out


def _degenerate_schematic_instances(system: RuleSystem, max_degree: int,
                                    max_depth: int) -> list[RuleInstance]:
    """Kernel-letter instances of the two one-sided families, concrete leads."""
    if system.mode != "T" or not system.degenerate:
        return []
    if max_degree < 3 or max_depth < 1:
        return []
    from .rules import raw_p_lead_left, raw_p_lead_right
    alg = system.algebra
    out = []
    for x in sorted(system.degenerate):
        for u in enumerate_words(alg.dim, max_degree - 3, max_depth - 1):
            for raw, params in ((raw_p_lead_left(alg, x, u), ("left", x, u)),
                                (raw_p_lead_right(alg, u, x), ("right", x, u))):
                if raw.is_zero():
                    continue
                inst = system._finish(Family.EXTENSION, params, raw, None)
                if inst.lead.degree <= max_degree and inst.lead.depth <= max_depth:
                    out.append(inst)
    return out


def enumerate_ambiguities(system: RuleSystem, max_degree: int,
                          max_depth: int) -> Iterator[CompositionCase]:
    """Stream every bounded composition case, deterministically indexed.

    Intersections first (overlapping leading monomials with the standard
    strict breadth bounds), then inclusions (one leading monomial as a
    subword of another; equal leads of distinct rules enter via the bare
    hole context).  Bounds apply to the ambiguity word; leading monomials
    are subwords of it, so instances are pre-filtered by the same bounds.
    """
    if max_degree < 0 or max_depth < 0:
        raise ValueError("bounds must be non-negative")
    instances = rule_instances(system, max_degree, max_depth)
    by_prefix: dict = {}
    for g in instances:
        bg = g.lead.breadth
        run_degree = 0
        for o in range(1, bg):
            f0 = g.lead.factors[o - 1]
            run_degree += 1 if isinstance(f0, int) else 1 + f0.degree
            by_prefix.setdefault(g.lead.factors[:o], []).append(
                (g, g.lead.degree - run_degree))
    index = 0
    for f in instances:
        bf = f.lead.breadth
        fdeg = f.lead.degree
        for o in range(1, bf):
            suffix = f.lead.factors[bf - o:]
            for g, extra_degree in by_prefix.get(suffix, ()):
                if fdeg + extra_degree > max_degree:
                    continue
                bg = g.lead.breadth
                w = word(f.lead.factors + g.lead.factors[o:])
                if w.depth > max_depth:
                    continue
                if not (max(bf, bg) < w.breadth < bf + bg):
                    continue
                u = word(g.lead.factors[o:])
                v = word(f.lead.factors[:bf - o])
                composition = f.poly.mul_word(u) - g.poly.mul_word(v, on_left=True)
                yield CompositionCase(index, INTERSECTION, f, g, w, (u, v), composition)
                index += 1
    for f in instances:
        for occ in system.occurrences(f.lead):
            g = occ.rule
            if g.same_rule(f) and occ.context.is_hole():
                continue
            composition = f.poly - occ.context.substitute_poly(g.poly)
            yield CompositionCase(index, INCLUDING, f, g, f.lead,
                                  (occ.context,), composition)
            index += 1


def check_case(case: CompositionCase, system: RuleSystem) -> CompositionCase:
    """Reduce the composition; trivial iff the normal form vanishes."""
    comp = case.composition
    if not comp.is_zero() and not comp.lead() < case.ambiguity:
        raise RuntimeError(
            f"composition lead {unparse_word(comp.lead())} does not cancel below "
            f"the ambiguity {unparse_word(case.ambiguity)}")
    try:
        residual = normal_form(comp, system)
    except StepBudgetExceeded:
        case.verdict = BUDGET
        case.residual = None
        return case
    case.verdict = TRIVIAL if residual.is_zero() else NONREDUCED
    case.residual = None if residual.is_zero() else residual
    return case


def check_gsb(system: RuleSystem, max_degree: int, max_depth: int, *,
              jobs: int = 1) -> GsbReport:
    """Check every bounded composition; report counts and failures."""
    start = time.monotonic()
    report = GsbReport(system.mode, max_degree, max_depth)
    names = system.algebra.names
    if jobs > 1:
        _check_parallel(system, max_degree, max_depth, jobs, report)
    else:
        for case in enumerate_ambiguities(system, max_degree, max_depth):
            check_case(case, system)
            _tally(report, case, names)
    report.failures.sort(key=lambda c: c.index)
    report.elapsed = time.monotonic() - start
    return report


def _tally(report: GsbReport, case: CompositionCase, names) -> None:
    report.total_cases += 1
    key = (case.kind, int(case.f.family), int(case.g.family))
    report.counts[key] = report.counts.get(key, 0) + 1
    if case.verdict != TRIVIAL:
        report.failures.append(_failure_record(case, names))


_WORKER_STATE: dict = {}


def _worker_init(system):
    _WORKER_STATE["system"] = system


def _worker_run(args):
    shard, nshards, max_degree, max_depth = args
    system = _WORKER_STATE["system"]
    names = system.algebra.names
    total = 0
    counts: dict = {}
    failures: list[FailureRecord] = []
    for case in enumerate_ambiguities(system, max_degree, max_depth):
        if case.index % nshards != shard:
            continue
        check_case(case, system)
        total += 1
        key = (case.kind, int(case.f.family), int(case.g.family))
        counts[key] = counts.get(key, 0) + 1
        if case.verdict != TRIVIAL:
            failures.append(_failure_record(case, names))
    return total, counts, failures


def _check_parallel(system, max_degree, max_depth, jobs, report):
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    with ctx.Pool(jobs, _worker_init, (system,)) as pool:
        parts = pool.map(_worker_run,
                         [(s, jobs, max_degree, max_depth) for s in range(jobs)])
    for total, counts, failures in parts:
        report.total_cases += total
        for k, v in counts.items():
            report.counts[k] = report.counts.get(k, 0) + v
        report.failures.extend(failures)


@dataclass
class ProbeResult:
    added: list[RuleInstance]
    rounds_used: int
    reached_fixpoint: bool
    blocked: list[FailureRecord] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.added and not self.blocked and self.reached_fixpoint


def completion_probe(system: RuleSystem, max_degree: int, max_depth: int,
                     max_rounds: int = 4) -> ProbeResult:
    """Saturate by adding normalized nonzero residuals as new monic rules.

    An empty result confirms a passing confluence check independently.
    Budget-limited cases are reported as blocked: the probe can neither
    orient nor dismiss them.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    names = system.algebra.names
    current = system
    added: list[RuleInstance] = []
    blocked: list[FailureRecord] = []
    for round_no in range(1, max_rounds + 1):
        new_rules: list[RuleInstance] = []
        new_leads = set()
        blocked = []
        for case in enumerate_ambiguities(current, max_degree, max_depth):
            check_case(case, current)
            if case.verdict == BUDGET:
                blocked.append(_failure_record(case, names))
            elif case.verdict == NONREDUCED:
                rule_poly = case.residual.monic()
                lead = rule_poly.lead()
                if lead in new_leads:
                    continue
                new_leads.add(lead)
                new_rules.append(RuleInstance(Family.EXTENSION,
                                              ("probe", round_no, lead),
                                              rule_poly, lead, rule_poly.tail()))
        if not new_rules:
            return ProbeResult(added, round_no, True, blocked)
        added.extend(new_rules)
        current = current.extend(new_rules)
    return ProbeResult(added, max_rounds, False, blocked)

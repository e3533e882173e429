"""Finite-dimensional Rota-Baxter Lie algebras: data, validation, file format.

An algebra is given by an ordered basis, sparse bracket structure constants,
a linear operator P (one sparse vector per basis element) and a rational
weight.  The basis declaration order is the well-order on letters: earlier
is smaller.

File format (line oriented, ``#`` starts a comment)::

    weight = <coeff>                       # optionally signed rational
    basis  = <ident> ( ',' <ident> )*
    bracket <ident> <ident> = <poly>       # brackets of basis pairs
    P <ident> = <poly>                     # operator column, default 0

Polynomials on the right-hand sides must be supported on single letters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .terms import ParseError, Poly, letter, parse_poly, unparse_poly

Vec = dict[int, Fraction]  # sparse vector over the basis


class AlgebraFormatError(ValueError):
    """Malformed algebra description (hard error, distinct from axiom failure)."""


@dataclass
class Violation:
    kind: str          # antisymmetry | jacobi | rota-baxter
    witness: tuple     # offending basis indices
    detail: str

    def describe(self, names) -> str:
        labels = ", ".join(names[i] for i in self.witness)
        return f"{self.kind} fails at ({labels}): {self.detail}"


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)


class RBLieAlgebra:
    """A Rota-Baxter Lie algebra with a finite ordered basis.

    ``bracket_table[(i, j)]`` for i > j stores [e_i, e_j]; other pairs follow
    by antisymmetry.  ``p_table[i]`` stores P(e_i).  Missing entries are zero.
    """

    def __init__(self, names: list[str], bracket_table: dict[tuple[int, int], Vec],
                 p_table: dict[int, Vec], weight: Fraction):
        if len(set(names)) != len(names):
            raise AlgebraFormatError("duplicate basis names")
        if not names:
            raise AlgebraFormatError("empty basis")
        self.names = list(names)
        self.dim = len(names)
        self.index = {n: i for i, n in enumerate(names)}
        self.weight = Fraction(weight)
        self.bracket_table = {k: {i: Fraction(c) for i, c in v.items() if c}
                              for k, v in bracket_table.items()}
        self.bracket_table = {k: v for k, v in self.bracket_table.items() if v}
        self.p_table = {k: {i: Fraction(c) for i, c in v.items() if c}
                        for k, v in p_table.items()}
        self.p_table = {k: v for k, v in self.p_table.items() if v}
        for (i, j), v in self.bracket_table.items():
            self._check_indices((i, j), v)
        for i, v in self.p_table.items():
            self._check_indices((i,), v)

    def _check_indices(self, keys, vec):
        for k in keys:
            if not 0 <= k < self.dim:
                raise AlgebraFormatError(f"basis index {k} out of range")
        for k in vec:
            if not 0 <= k < self.dim:
                raise AlgebraFormatError(f"basis index {k} out of range")

    # -- coordinate arithmetic -------------------------------------------

    def bracket_vec(self, i: int, j: int) -> Vec:
        """[e_i, e_j] as a sparse vector."""
        if i == j:
            return {}
        if i > j:
            return dict(self.bracket_table.get((i, j), {}))
        flipped = self.bracket_table.get((j, i), {})
        return {k: -c for k, c in flipped.items()}

    def bracket_vv(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, c in self.bracket_vec(i, j).items():
                    nc = out.get(k, Fraction(0)) + ca * cb * c
                    if nc:
                        out[k] = nc
                    else:
                        out.pop(k, None)
        return out

    def p_vec(self, i: int) -> Vec:
        return dict(self.p_table.get(i, {}))

    def p_vv(self, a: Vec) -> Vec:
        out: Vec = {}
        for i, ca in a.items():
            for k, c in self.p_vec(i).items():
                nc = out.get(k, Fraction(0)) + ca * c
                if nc:
                    out[k] = nc
                else:
                    out.pop(k, None)
        return out

    # -- polynomial-level wrappers ---------------------------------------

    def _poly_to_vec(self, p: Poly) -> Vec:
        vec: Vec = {}
        for w, c in p.terms.items():
            if not w.is_letter():
                raise ValueError(f"not supported on single letters: {unparse_poly(p, self.names)}")
            vec[w.factors[0]] = c
        return vec

    def _vec_to_poly(self, v: Vec) -> Poly:
        return Poly({letter(i): c for i, c in v.items()})

    def bracket_of(self, a: Poly, b: Poly) -> Poly:
        """Bilinear bracket of two letter-supported polynomials."""
        return self._vec_to_poly(self.bracket_vv(self._poly_to_vec(a), self._poly_to_vec(b)))

    def p_of(self, a: Poly) -> Poly:
        """Linear operator applied to a letter-supported polynomial."""
        return self._vec_to_poly(self.p_vv(self._poly_to_vec(a)))

    def p_poly(self, i: int) -> Poly:
        return self._vec_to_poly(self.p_vec(i))

    def bracket_poly(self, i: int, j: int) -> Poly:
        return self._vec_to_poly(self.bracket_vec(i, j))

    def degenerate_letters(self) -> list[int]:
        """Indices with P(e_i) = 0."""
        return [i for i in range(self.dim) if not self.p_table.get(i)]

    # -- axioms ------------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Exact check of antisymmetry storage, Jacobi and the RB identity."""
        violations: list[Violation] = []
        for (i, j) in sorted(self.bracket_table):
            if i == j:
                violations.append(Violation("antisymmetry", (i, i), "[e,e] must be 0"))
            elif i < j:
                mirror = self.bracket_table.get((j, i))
                expect = {k: -c for k, c in self.bracket_table[(i, j)].items()}
                if mirror is None or mirror != expect:
                    violations.append(Violation(
                        "antisymmetry", (i, j),
                        "stored value does not negate the mirrored pair"))
        for i in range(self.dim):
            for j in range(i):
                for k in range(j):
                    acc: Vec = {}
                    for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                        inner = self.bracket_vec(a, b)
                        for t, coeff in self.bracket_vv(inner, {c: Fraction(1)}).items():
                            nc = acc.get(t, Fraction(0)) + coeff
                            if nc:
                                acc[t] = nc
                            else:
                                acc.pop(t, None)
                    if acc:
                        violations.append(Violation(
                            "jacobi", (i, j, k),
                            f"cyclic sum = {unparse_poly(self._vec_to_poly(acc), self.names)}"))
        lam = self.weight
        for i in range(self.dim):
            for j in range(i + 1):
                pi, pj = self.p_vec(i), self.p_vec(j)
                lhs = self.bracket_vv(pi, pj)
                rhs: Vec = {}
                for term in (self.p_vv(self.bracket_vv({i: Fraction(1)}, pj)),
                             self.p_vv(self.bracket_vv(pi, {j: Fraction(1)})),
                             {k: lam * c for k, c in
                              self.p_vv(self.bracket_vec(i, j)).items()}):
                    for t, coeff in term.items():
                        nc = rhs.get(t, Fraction(0)) + coeff
                        if nc:
                            rhs[t] = nc
                        else:
                            rhs.pop(t, None)
                if lhs != rhs:
                    lhs_s = unparse_poly(self._vec_to_poly(lhs), self.names)
                    rhs_s = unparse_poly(self._vec_to_poly(rhs), self.names)
                    violations.append(Violation(
                        "rota-baxter", (i, j), f"lhs = {lhs_s}, rhs = {rhs_s}"))
        return ValidationReport(ok=not violations, violations=violations)


def validate(algebra: RBLieAlgebra) -> ValidationReport:
    return algebra.validate()


# ---------------------------------------------------------------------------
# File loading
# ---------------------------------------------------------------------------


def _parse_signed_coeff(text: str, lineno: int) -> Fraction:
    t = text.strip()
    sign = 1
    if t.startswith(("-", "+")):
        if t[0] == "-":
            sign = -1
        t = t[1:].strip()
    try:
        if "/" in t:
            num, den = t.split("/", 1)
            return sign * Fraction(int(num.strip()), int(den.strip()))
        return sign * Fraction(int(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise AlgebraFormatError(f"line {lineno}: bad rational '{text.strip()}'") from exc


def _letters_only(p: Poly, lineno: int, names) -> Vec:
    vec: Vec = {}
    for w, c in p.terms.items():
        if not w.is_letter():
            raise AlgebraFormatError(
                f"line {lineno}: right-hand side must be a combination of basis letters")
        vec[w.factors[0]] = c
    return vec


def load_algebra(text: str, *, allow_degenerate_p: bool = False) -> RBLieAlgebra:
    """Parse an algebra description; raises AlgebraFormatError when malformed."""
    weight: Fraction | None = None
    names: list[str] | None = None
    raw_brackets: list[tuple[int, str, str, str]] = []
    raw_ps: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("weight"):
            _, _, rhs = line.partition("=")
            if not rhs.strip():
                raise AlgebraFormatError(f"line {lineno}: missing weight value")
            weight = _parse_signed_coeff(rhs, lineno)
        elif line.startswith("basis"):
            _, _, rhs = line.partition("=")
            names = [n.strip() for n in rhs.split(",") if n.strip()]
            if not names:
                raise AlgebraFormatError(f"line {lineno}: empty basis")
        elif line.startswith("bracket"):
            head, eq, rhs = line.partition("=")
            parts = head.split()
            if len(parts) != 3 or not eq:
                raise AlgebraFormatError(f"line {lineno}: expected 'bracket a b = ...'")
            raw_brackets.append((lineno, parts[1], parts[2], rhs.strip()))
        elif line.startswith("P "):
            head, eq, rhs = line.partition("=")
            parts = head.split()
            if len(parts) != 2 or not eq:
                raise AlgebraFormatError(f"line {lineno}: expected 'P a = ...'")
            raw_ps.append((lineno, parts[1], rhs.strip()))
        else:
            raise AlgebraFormatError(f"line {lineno}: unrecognized directive")
    if weight is None:
        raise AlgebraFormatError("missing 'weight' line")
    if names is None:
        raise AlgebraFormatError("missing 'basis' line")
    index = {n: i for i, n in enumerate(names)}

    def parse_rhs(lineno: int, rhs: str) -> Vec:
        if not rhs:
            raise AlgebraFormatError(f"line {lineno}: missing right-hand side")
        if rhs.strip() == "0":
            return {}
        try:
            p = parse_poly(rhs, index)
        except ParseError as exc:
            raise AlgebraFormatError(f"line {lineno}: {exc}") from exc
        return _letters_only(p, lineno, names)

    bracket_table: dict[tuple[int, int], Vec] = {}
    for lineno, a, b, rhs in raw_brackets:
        if a not in index or b not in index:
            raise AlgebraFormatError(f"line {lineno}: unknown basis name")
        i, j = index[a], index[b]
        vec = parse_rhs(lineno, rhs)
        if (i, j) in bracket_table:
            raise AlgebraFormatError(f"line {lineno}: duplicate bracket entry")
        bracket_table[(i, j)] = vec
    # canonicalize to i > j storage, keeping conflicting mirrors for validate()
    canon: dict[tuple[int, int], Vec] = {}
    for (i, j), vec in bracket_table.items():
        if i >= j:
            canon[(i, j)] = vec
        elif (j, i) in bracket_table:
            canon[(i, j)] = vec   # keep both; validate() flags inconsistency
        else:
            canon[(j, i)] = {k: -c for k, c in vec.items()}
    p_table: dict[int, Vec] = {}
    for lineno, a, rhs in raw_ps:
        if a not in index:
            raise AlgebraFormatError(f"line {lineno}: unknown basis name")
        i = index[a]
        if i in p_table:
            raise AlgebraFormatError(f"line {lineno}: duplicate P entry")
        p_table[i] = parse_rhs(lineno, rhs)
    alg = RBLieAlgebra(names, canon, p_table, weight)
    if not allow_degenerate_p:
        dead = alg.degenerate_letters()
        if dead:
            which = ", ".join(names[i] for i in dead)
            raise DegenerateOperatorError(
                f"P vanishes on: {which}; pass allow_degenerate_p to admit kernels")
    return alg


class DegenerateOperatorError(ValueError):
    """P has a kernel on the basis and strict mode is in force."""


def load_algebra_file(path, **kw) -> RBLieAlgebra:
    with open(path, "r", encoding="utf-8") as fh:
        return load_algebra(fh.read(), **kw)

"""Sparse exact multivariate polynomials and monomial-set predicates.

Monomials map 1-based variable indices to positive exponents; polynomials
map monomials to nonzero field coefficients over a declared universe of
``nvars`` variables.  The module also provides the reference polynomials
(elementary symmetric polynomials, the symbolic permanent), the Ryser
inclusion-exclusion evaluator for numeric permanents, and the fullness /
emptiness predicates on monomial supports.

Canonical term order everywhere (display, text format) is graded
lexicographic by variable index, largest terms first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Mapping

from .errors import (
    BadDegree,
    FormatError,
    MixedFields,
    MixedUniverses,
    NotSquare,
    TooLarge,
)
from .field import FieldSpec, FieldValue, kernel

# A monomial key is a tuple of (variable, exponent) pairs, sorted by
# variable, with all exponents positive.  The empty tuple is the constant 1.
MonoKey = tuple


def _merge_keys(a: MonoKey, b: MonoKey) -> MonoKey:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Monomial:
    """A power product of variables, e.g. x1^2*x3.

    Immutable and hashable; the constant monomial 1 has an empty exponent
    map.
    """

    __slots__ = ("key",)

    def __init__(self, exponents: Mapping[int, int] | MonoKey = ()):
        if isinstance(exponents, tuple):
            key = exponents
        else:
            key = tuple(sorted(exponents.items()))
        for v, e in key:
            if v < 1 or e < 1:
                raise FormatError(f"bad exponent entry x{v}^{e}")
        object.__setattr__(self, "key", key)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @staticmethod
    def of(*variables: int) -> "Monomial":
        """Multilinear monomial over the given distinct variable indices."""
        exps: dict[int, int] = {}
        for v in variables:
            exps[v] = exps.get(v, 0) + 1
        return Monomial(exps)

    def degree(self) -> int:
        return sum(e for _, e in self.key)

    def is_multilinear(self) -> bool:
        return all(e == 1 for _, e in self.key)

    def variables(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.key)

    def bitmask(self) -> int:
        """Bitmask of variables (bit v-1 for x_v); requires multilinearity."""
        if not self.is_multilinear():
            raise FormatError("bitmask view needs a multilinear monomial")
        m = 0
        for v, _ in self.key:
            m |= 1 << (v - 1)
        return m

    def exponent(self, v: int) -> int:
        for var, e in self.key:
            if var == v:
                return e
        return 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(_merge_keys(self.key, other.key))

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def grlex_key(self, nvars: int) -> tuple:
        """Sort key putting terms in display order: graded lex, biggest first."""
        dense = [0] * nvars
        for v, e in self.key:
            dense[v - 1] = -e
        return (-self.degree(), tuple(dense))

    def text(self) -> str:
        if not self.key:
            return "1"
        parts = [f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in self.key]
        return "*".join(parts)

    def __repr__(self):
        return f"Monomial({self.text()})"


_ONE = Monomial()


class Polynomial:
    """Sparse polynomial with exact coefficients over a fixed field.

    ``terms`` maps Monomial to nonzero FieldValue; the zero polynomial has
    an empty map.  ``nvars`` declares the variable universe, which must
    cover every index in use.
    """

    __slots__ = ("spec", "nvars", "terms")

    def __init__(self, spec: FieldSpec, nvars: int, terms: Mapping[Monomial, FieldValue] = ()):
        clean = {}
        for m, c in dict(terms).items():
            if c.spec != spec:
                raise MixedFields("coefficient field differs from polynomial field")
            if any(v > nvars for v in m.variables()):
                raise MixedUniverses(f"monomial {m.text()} exceeds universe of {nvars}")
            if not c.is_zero():
                clean[m] = c
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(spec: FieldSpec, nvars: int) -> "Polynomial":
        return Polynomial(spec, nvars)

    @staticmethod
    def constant(c: FieldValue, nvars: int) -> "Polynomial":
        return Polynomial(c.spec, nvars, {_ONE: c})

    @staticmethod
    def variable(v: int, nvars: int, spec: FieldSpec) -> "Polynomial":
        return Polynomial(spec, nvars, {Monomial.of(v): spec.one()})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, m: Monomial) -> FieldValue:
        return self.terms.get(m, self.spec.zero())

    def degree(self) -> int:
        return max((m.degree() for m in self.terms), default=0)

    def is_multilinear(self) -> bool:
        return all(m.is_multilinear() for m in self.terms)

    def constant_value(self) -> FieldValue:
        """The value of a constant polynomial (degree 0)."""
        if self.degree() > 0:
            raise FormatError("polynomial is not constant")
        return self.coefficient(_ONE)

    def support(self) -> "MonomialSet":
        return MonomialSet(frozenset(self.terms), self.nvars)

    def sorted_terms(self) -> list[tuple[Monomial, FieldValue]]:
        """Terms in canonical display order (graded lex, largest first)."""
        return sorted(self.terms.items(), key=lambda t: t[0].grlex_key(self.nvars))

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.spec != other.spec:
            raise MixedFields("polynomials over different fields")
        if self.nvars != other.nvars:
            raise MixedUniverses(f"universes differ: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return Polynomial(self.spec, self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.spec, self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out: dict[Monomial, FieldValue] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                c = c1 * c2
                s = out.get(m)
                out[m] = c if s is None else s + c
        return Polynomial(self.spec, self.nvars, out)

    def scale(self, c: FieldValue) -> "Polynomial":
        if c.spec != self.spec:
            raise MixedFields("scalar field differs from polynomial field")
        return Polynomial(self.spec, self.nvars, {m: k * c for m, k in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.spec == other.spec and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.spec, self.nvars, frozenset(self.terms.items())))

    # -- substitution, derivative, evaluation ------------------------------

    def substitute(self, assignment: Mapping[int, FieldValue]) -> "Polynomial":
        """Specialize some variables to field values; keeps the universe."""
        for v, c in assignment.items():
            if v > self.nvars:
                raise MixedUniverses(f"x{v} outside universe {self.nvars}")
            if c.spec != self.spec:
                raise MixedFields("assignment values must match the field")
        out: dict[Monomial, FieldValue] = {}
        for m, c in self.terms.items():
            kept = {}
            val = c
            for v, e in m.key:
                a = assignment.get(v)
                if a is None:
                    kept[v] = e
                else:
                    for _ in range(e):
                        val = val * a
            mm = Monomial(kept)
            s = out.get(mm)
            out[mm] = val if s is None else s + val
        return Polynomial(self.spec, self.nvars, out)

    def derivative(self, variables: Iterable[int]) -> "Polynomial":
        """Iterated formal partial derivative with respect to a variable set."""
        poly = self
        for v in sorted(set(variables)):
            out: dict[Monomial, FieldValue] = {}
            for m, c in poly.terms.items():
                e = m.exponent(v)
                if e == 0:
                    continue
                exps = dict(m.key)
                if e == 1:
                    del exps[v]
                else:
                    exps[v] = e - 1
                mm = Monomial(exps)
                cc = c * poly.spec.from_int(e)
                s = out.get(mm)
                out[mm] = cc if s is None else s + cc
            poly = Polynomial(poly.spec, poly.nvars, out)
        return poly

    def evaluate(self, assignment: Mapping[int, FieldValue]) -> FieldValue:
        result = self.substitute(assignment)
        if result.degree() > 0:
            missing = sorted(v for m in result.terms for v in m.variables())
            raise MixedUniverses(f"evaluation left variables {missing} unassigned")
        return result.coefficient(_ONE)

    # -- text format -------------------------------------------------------

    def text(self) -> str:
        """Canonical text: terms in graded-lex order, e.g. "x1*x2 - 2*x3"."""
        if not self.terms:
            return "0"
        chunks: list[str] = []
        for m, c in self.sorted_terms():
            coef, negative = _coef_text(c)
            body = m.text()
            if body == "1":
                piece = coef
            elif coef == "1":
                piece = body
            else:
                piece = f"{coef}*{body}"
            if not chunks:
                chunks.append(f"-{piece}" if negative else piece)
            else:
                chunks.append(f" - {piece}" if negative else f" + {piece}")
        return "".join(chunks)

    def __repr__(self):
        return f"Polynomial({self.spec.name()}, {self.text()})"


def _coef_text(c: FieldValue) -> tuple[str, bool]:
    """Coefficient text with its sign split off (sign only used over Q/Qw)."""
    if c.spec.tag == "Fp":
        return str(c.payload), False
    if c.spec.tag == "Q":
        f = c.payload
        if f < 0:
            return (-c).text(), True
        return c.text(), False
    a, b = c.payload
    if b == 0:
        if a < 0:
            return (-c).text(), True
        return c.text(), False
    return f"({c.text()})", False


_VARPOW = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_polynomial(text: str, spec: FieldSpec, nvars: int | None = None) -> Polynomial:
    """Parse the canonical polynomial text format.

    ``nvars`` defaults to the largest variable index present.  The grammar
    accepted is sums/differences of terms ``coef*x1^e1*x3``; coefficients
    over Qw must be parenthesized when they mention w.
    """
    stripped = text.strip()
    if not stripped:
        raise FormatError("empty polynomial text")
    pieces = _split_terms(stripped)
    parsed: list[tuple[dict[int, int], FieldValue]] = []
    maxvar = 0
    for sign, term in pieces:
        coef = spec.one()
        exps: dict[int, int] = {}
        for factor in _split_factors(term):
            m = _VARPOW.match(factor)
            if m:
                v, e = int(m.group(1)), int(m.group(2) or 1)
                if v < 1 or e < 1:
                    raise FormatError(f"bad factor {factor!r}")
                exps[v] = exps.get(v, 0) + e
                maxvar = max(maxvar, v)
            else:
                coef = coef * spec.parse(factor)
        if sign == "-":
            coef = -coef
        parsed.append((exps, coef))
    if nvars is None:
        nvars = maxvar
    if maxvar > nvars:
        raise MixedUniverses(f"x{maxvar} exceeds declared universe {nvars}")
    terms: dict[Monomial, FieldValue] = {}
    for exps, coef in parsed:
        m = Monomial(exps)
        s = terms.get(m)
        terms[m] = coef if s is None else s + coef
    return Polynomial(spec, nvars, terms)


def _split_terms(text: str) -> list[tuple[str, str]]:
    terms: list[tuple[str, str]] = []
    sign, depth, buf = "+", 0, []
    i = 0
    if text[0] in "+-":
        sign = text[0]
        i = 1
    prev = ""
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and prev not in "*/(^" and prev != "":
            terms.append((sign, "".join(buf).strip()))
            sign, buf = ch, []
        else:
            buf.append(ch)
            if not ch.isspace():
                prev = ch
        i += 1
    terms.append((sign, "".join(buf).strip()))
    if any(not t for _, t in terms):
        raise FormatError(f"dangling sign in {text!r}")
    return terms


def _split_factors(term: str) -> list[str]:
    factors: list[str] = []
    depth, buf = 0, []
    for ch in term:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            factors.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    factors.append("".join(buf).strip())
    if any(not f for f in factors):
        raise FormatError(f"empty factor in {term!r}")
    # a bare trailing "w" belongs to its numeric coefficient: "2*w" -> "2*w"
    merged: list[str] = []
    for f in factors:
        if f == "w" and merged and not _VARPOW.match(merged[-1]):
            merged[-1] = merged[-1] + "*w"
        else:
            merged.append(f)
    return merged


@dataclass(frozen=True)
class MonomialSet:
    """A deduplicated set of monomials over a declared universe."""

    support: frozenset[Monomial]
    nvars: int

    def __post_init__(self):
        for m in self.support:
            if any(v > self.nvars for v in m.variables()):
                raise MixedUniverses(f"{m.text()} exceeds universe {self.nvars}")

    def __contains__(self, m: Monomial) -> bool:
        return m in self.support

    def __len__(self):
        return len(self.support)

    def variables(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self.support:
            out |= m.variables()
        return frozenset(out)

    def max_degree(self) -> int:
        return max((m.degree() for m in self.support), default=0)

    def is_multilinear(self) -> bool:
        return all(m.is_multilinear() for m in self.support)

    def is_k_full(self, k: int) -> bool:
        """True when every multilinear degree-k monomial over the universe
        appears (there are C(nvars, k) of them)."""
        if k < 0 or k > self.nvars:
            raise BadDegree(f"k={k} outside [0, {self.nvars}]")
        count = sum(1 for m in self.support if m.degree() == k and m.is_multilinear())
        return count == _binomial(self.nvars, k)

    def is_k_empty(self, k: int) -> bool:
        """True when no monomial of total degree k appears."""
        if k < 0:
            raise BadDegree("k must be nonnegative")
        return all(m.degree() != k for m in self.support)

    def sorted_monomials(self) -> list[Monomial]:
        return sorted(self.support, key=lambda m: m.grlex_key(self.nvars))

    def text(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(m.text() for m in self.sorted_monomials())


def _binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(min(k, n - k)):
        out = out * (n - i) // (i + 1)
    return out


def mon_of(f: Polynomial) -> MonomialSet:
    """The support of f: its monomials with nonzero coefficient."""
    return f.support()


# -- reference polynomials --------------------------------------------------


def elementary_symmetric(n: int, d: int, spec: FieldSpec) -> Polynomial:
    """Sum over all size-d subsets of {x1..xn} of the subset product."""
    if d < 0 or d > n:
        raise BadDegree(f"need 0 <= d <= n, got d={d}, n={n}")
    one = spec.one()
    terms = {Monomial.of(*subset): one for subset in combinations(range(1, n + 1), d)}
    return Polynomial(spec, n, terms)


def permanent_symbolic(n: int, spec: FieldSpec) -> Polynomial:
    """The n x n permanent over variables x_{i,j}, flattened to (i-1)*n + j.

    Capped at n <= 7 (n! terms).
    """
    if n < 1 or n > 7:
        raise TooLarge(f"permanent_symbolic supports 1 <= n <= 7, got {n}")
    one = spec.one()
    terms = {}
    for sigma in permutations(range(n)):
        terms[Monomial.of(*(i * n + sigma[i] + 1 for i in range(n)))] = one
    return Polynomial(spec, n * n, terms)


def ryser_eval(entries: list[list[FieldValue]]) -> FieldValue:
    """Permanent of a square grid by Ryser inclusion-exclusion.

    perm(A) = sum over column subsets S of (-1)^(n-|S|) * prod_i sum_{j in S} a_ij.
    """
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise NotSquare("grid is not square")
    if n == 0:
        raise NotSquare("grid is empty")
    spec = entries[0][0].spec
    for row in entries:
        for v in row:
            if v.spec != spec:
                raise MixedFields("grid mixes fields")
    k = kernel(spec)
    grid = [[v.payload for v in row] for row in entries]
    total = k.zero
    add, mul, neg = k.add, k.mul, k.neg
    for mask in range(1, 1 << n):
        cols = [j for j in range(n) if mask >> j & 1]
        prod = k.one
        for i in range(n):
            s = k.zero
            row = grid[i]
            for j in cols:
                s = add(s, row[j])
            prod = mul(prod, s)
        if (n - len(cols)) % 2:
            prod = neg(prod)
        total = add(total, prod)
    return FieldValue(spec, total)

"""Read-k matrices, affine matrices, and exact determinant machinery.

A SymbolicMatrix holds cells that are either a single variable or a field
constant; an AffineMatrix holds affine linear forms and is the output type
of the affine reduction.  Both support:

* ``symbolic_det`` — exact determinant polynomial via a division-free
  dynamic program over column subsets (state = columns used by the rows
  processed so far), capped at size 22;
* ``symbolic_perm`` — exact permanent polynomial by permutation sum;
* ``det_eval``      — determinant value at a total assignment, by Gaussian
  elimination;
* ``equal_det_probabilistic`` — a random-evaluation screen that can only
  err on the "equal" side;
* ``minmax_rank``   — minimum/maximum rank over all assignments of the
  variables from a prime field;
* JSON round trips that preserve every scalar bit-exactly.

Row, column and variable indices in the public API are 1-based.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import (
    AsymmetricDrop,
    BudgetExceeded,
    DivisionByZero,
    FieldTooSmall,
    FormatError,
    IncompleteAssignment,
    IndexOutOfRange,
    MixedFields,
    MixedUniverses,
    NotSquare,
    TooLarge,
)
from .field import FieldSpec, FieldValue, kernel
from .poly import MonoKey, Monomial, Polynomial

_DET_CAP = 22
_PERM_CAP = 8
_RANK_BUDGET = 10**7


@dataclass(frozen=True)
class Var:
    """A matrix cell holding the single variable x_index."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise IndexOutOfRange(f"variable index must be >= 1, got {self.index}")


Entry = Union[Var, FieldValue]


class SymbolicMatrix:
    """Square matrix whose cells are single variables or field constants."""

    __slots__ = ("spec", "nvars", "entries")

    def __init__(self, spec: FieldSpec, nvars: int, entries: Sequence[Sequence[Entry]]):
        rows = tuple(tuple(row) for row in entries)
        m = len(rows)
        if any(len(row) != m for row in rows):
            raise NotSquare("entry grid is not square")
        for row in rows:
            for e in row:
                if isinstance(e, Var):
                    if e.index > nvars:
                        raise MixedUniverses(f"x{e.index} exceeds universe {nvars}")
                elif isinstance(e, FieldValue):
                    if e.spec != spec:
                        raise MixedFields("constant entry from a different field")
                else:
                    raise FormatError(f"bad entry {e!r}")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("SymbolicMatrix is immutable")

    @property
    def size(self) -> int:
        return len(self.entries)

    @staticmethod
    def build(spec: FieldSpec, nvars: int, grid: Sequence[Sequence]) -> "SymbolicMatrix":
        """Convenience constructor: ints become constants, Var passes through."""
        rows = []
        for row in grid:
            out = []
            for e in row:
                if isinstance(e, (Var, FieldValue)):
                    out.append(e)
                elif isinstance(e, int):
                    out.append(spec.from_int(e))
                else:
                    raise FormatError(f"bad entry {e!r}")
            rows.append(out)
        return SymbolicMatrix(spec, nvars, rows)

    @staticmethod
    def diagonal(spec: FieldSpec, nvars: int, items: Sequence[Entry]) -> "SymbolicMatrix":
        z = spec.zero()
        m = len(items)
        return SymbolicMatrix(
            spec, nvars, [[items[i] if i == j else z for j in range(m)] for i in range(m)]
        )

    # -- read-multiplicity audit --------------------------------------------

    def multiplicities(self) -> dict[int, int]:
        """Occurrence count per variable index (only variables that occur)."""
        counts: dict[int, int] = {}
        for row in self.entries:
            for e in row:
                if isinstance(e, Var):
                    counts[e.index] = counts.get(e.index, 0) + 1
        return counts

    def read_multiplicity(self, v: int) -> int:
        return self.multiplicities().get(v, 0)

    def occurring_variables(self) -> list[int]:
        return sorted(self.multiplicities())

    def verify_read_k(self, k: int) -> bool:
        """True iff every variable occupies at most k cells."""
        if k < 1:
            raise IndexOutOfRange("k must be >= 1")
        return all(c <= k for c in self.multiplicities().values())

    # -- structural operations -----------------------------------------------

    def minor(self, drop_rows: Iterable[int], drop_cols: Iterable[int]) -> "SymbolicMatrix":
        """Submatrix with the named 1-based rows and columns removed."""
        dr, dc = set(drop_rows), set(drop_cols)
        if len(dr) != len(dc):
            raise AsymmetricDrop(f"dropping {len(dr)} rows but {len(dc)} columns")
        m = self.size
        for i in dr | dc:
            if i < 1 or i > m:
                raise IndexOutOfRange(f"index {i} outside 1..{m}")
        keep_r = [i for i in range(m) if i + 1 not in dr]
        keep_c = [j for j in range(m) if j + 1 not in dc]
        return SymbolicMatrix(
            self.spec, self.nvars, [[self.entries[i][j] for j in keep_c] for i in keep_r]
        )

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "SymbolicMatrix":
        """Reorder rows and columns (0-based orders, internal use)."""
        return SymbolicMatrix(
            self.spec,
            self.nvars,
            [[self.entries[i][j] for j in col_order] for i in row_order],
        )

    def scale_row(self, row: int, c: FieldValue) -> "SymbolicMatrix":
        """Scale one all-constant 1-based row by c."""
        i = row - 1
        if any(isinstance(e, Var) for e in self.entries[i]):
            raise FormatError(f"row {row} holds a variable and cannot be scaled")
        rows = [list(r) for r in self.entries]
        rows[i] = [e * c for e in rows[i]]
        return SymbolicMatrix(self.spec, self.nvars, rows)

    # -- JSON ------------------------------------------------------------------

    def to_json_obj(self) -> dict:
        ents = []
        for row in self.entries:
            ents.append(
                [{"var": e.index} if isinstance(e, Var) else {"const": e.text()} for e in row]
            )
        return {"field": self.spec.name(), "nvars": self.nvars, "size": self.size, "entries": ents}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @staticmethod
    def from_json_obj(obj: dict) -> "SymbolicMatrix":
        try:
            spec = FieldSpec.from_name(obj["field"])
            nvars = obj["nvars"]
            rows = []
            for row in obj["entries"]:
                out = []
                for e in row:
                    if "var" in e:
                        out.append(Var(e["var"]))
                    else:
                        out.append(spec.parse(e["const"]))
                rows.append(out)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad matrix JSON: {exc}") from None
        m = SymbolicMatrix(spec, nvars, rows)
        if m.size != obj.get("size", m.size):
            raise FormatError("size field disagrees with entry grid")
        return m

    @staticmethod
    def from_json(text: str) -> "SymbolicMatrix":
        return SymbolicMatrix.from_json_obj(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, SymbolicMatrix):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.nvars == other.nvars
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.spec, self.nvars, self.entries))

    def __repr__(self):
        body = "; ".join(
            " ".join(f"x{e.index}" if isinstance(e, Var) else e.text() for e in row)
            for row in self.entries
        )
        return f"SymbolicMatrix({self.spec.name()}, [{body}])"


class AffineForm:
    """A canonical affine linear form: constant + sum of coef * x_i."""

    __slots__ = ("spec", "const", "coeffs")

    def __init__(self, spec: FieldSpec, const: FieldValue, coeffs: Mapping[int, FieldValue] = ()):
        if const.spec != spec:
            raise MixedFields("constant term from a different field")
        clean = {}
        for v, c in dict(coeffs).items():
            if c.spec != spec:
                raise MixedFields("coefficient from a different field")
            if not c.is_zero():
                clean[v] = c
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("AffineForm is immutable")

    @staticmethod
    def from_entry(e: Entry, spec: FieldSpec) -> "AffineForm":
        if isinstance(e, Var):
            return AffineForm(spec, spec.zero(), {e.index: spec.one()})
        return AffineForm(spec, e)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        coeffs = dict(self.coeffs)
        for v, c in other.coeffs.items():
            s = coeffs.get(v)
            coeffs[v] = c if s is None else s + c
        return AffineForm(self.spec, self.const + other.const, coeffs)

    def scale(self, c: FieldValue) -> "AffineForm":
        return AffineForm(self.spec, self.const * c, {v: k * c for v, k in self.coeffs.items()})

    def evaluate(self, assignment: Mapping[int, FieldValue]) -> FieldValue:
        val = self.const
        for v, c in self.coeffs.items():
            a = assignment.get(v)
            if a is None:
                raise IncompleteAssignment(f"x{v} unassigned")
            val = val + c * a
        return val

    def is_constant(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, AffineForm):
            return NotImplemented
        return self.spec == other.spec and self.const == other.const and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.spec, self.const, frozenset(self.coeffs.items())))

    def text(self) -> str:
        parts = []
        if not self.const.is_zero() or not self.coeffs:
            parts.append(self.const.text())
        for v in sorted(self.coeffs):
            c = self.coeffs[v]
            parts.append(f"x{v}" if c == self.spec.one() else f"{c.text()}*x{v}")
        return " + ".join(parts)

    def __repr__(self):
        return f"AffineForm({self.text()})"


class AffineMatrix:
    """Square matrix of affine linear forms."""

    __slots__ = ("spec", "nvars", "entries")

    def __init__(self, spec: FieldSpec, nvars: int, entries: Sequence[Sequence[AffineForm]]):
        rows = tuple(tuple(row) for row in entries)
        m = len(rows)
        if any(len(row) != m for row in rows):
            raise NotSquare("entry grid is not square")
        for row in rows:
            for e in row:
                if not isinstance(e, AffineForm) or e.spec != spec:
                    raise MixedFields(f"bad affine entry {e!r}")
                if any(v > nvars for v in e.coeffs):
                    raise MixedUniverses("affine form exceeds universe")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("AffineMatrix is immutable")

    @property
    def size(self) -> int:
        return len(self.entries)

    @staticmethod
    def from_symbolic(m: SymbolicMatrix) -> "AffineMatrix":
        return AffineMatrix(
            m.spec,
            m.nvars,
            [[AffineForm.from_entry(e, m.spec) for e in row] for row in m.entries],
        )

    def to_json_obj(self) -> dict:
        ents = []
        for row in self.entries:
            ents.append(
                [
                    {
                        "const": e.const.text(),
                        "coeffs": {str(v): c.text() for v, c in sorted(e.coeffs.items())},
                    }
                    for e in row
                ]
            )
        return {
            "field": self.spec.name(),
            "nvars": self.nvars,
            "size": self.size,
            "affine": True,
            "entries": ents,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @staticmethod
    def from_json_obj(obj: dict) -> "AffineMatrix":
        try:
            spec = FieldSpec.from_name(obj["field"])
            nvars = obj["nvars"]
            rows = []
            for row in obj["entries"]:
                out = []
                for e in row:
                    coeffs = {int(v): spec.parse(c) for v, c in e.get("coeffs", {}).items()}
                    out.append(AffineForm(spec, spec.parse(e["const"]), coeffs))
                rows.append(out)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad affine matrix JSON: {exc}") from None
        return AffineMatrix(spec, nvars, rows)

    @staticmethod
    def from_json(text: str) -> "AffineMatrix":
        return AffineMatrix.from_json_obj(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, AffineMatrix):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.nvars == other.nvars
            and self.entries == other.entries
        )

    def __repr__(self):
        body = "; ".join(" ".join(e.text() for e in row) for row in self.entries)
        return f"AffineMatrix({self.spec.name()}, [{body}])"


Matrix = Union[SymbolicMatrix, AffineMatrix]


def load_matrix_json(text: str) -> Matrix:
    obj = json.loads(text)
    if isinstance(obj, dict) and obj.get("affine"):
        return AffineMatrix.from_json_obj(obj)
    return SymbolicMatrix.from_json_obj(obj)


# -- determinant and permanent ------------------------------------------------


def _entry_terms(e: Entry | AffineForm, spec: FieldSpec) -> list[tuple[MonoKey, object]]:
    """Entry as a list of (monomial key, raw payload) terms; empty if zero."""
    if isinstance(e, Var):
        return [(((e.index, 1),), kernel(spec).one)]
    if isinstance(e, FieldValue):
        return [] if e.is_zero() else [((), e.payload)]
    terms: list[tuple[MonoKey, object]] = []
    if not e.const.is_zero():
        terms.append(((), e.const.payload))
    for v, c in sorted(e.coeffs.items()):
        terms.append((((v, 1),), c.payload))
    return terms


def _mono_mul(key: MonoKey, other: MonoKey) -> MonoKey:
    if not other:
        return key
    if not key:
        return other
    exps = dict(key)
    for v, e in other:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def symbolic_det(m: Matrix) -> Polynomial:
    """Exact determinant polynomial, by subset dynamic programming.

    Division-free: state = bitmask of columns consumed by the processed
    rows; the permutation sign is accumulated from the inversions each
    column choice introduces.  Capped at size 22.
    """
    n = m.size
    if n > _DET_CAP:
        raise TooLarge(f"determinant capped at size {_DET_CAP}, got {n}")
    spec = m.spec
    k = kernel(spec)
    if n == 0:
        return Polynomial.constant(spec.one(), m.nvars)
    rows = [[_entry_terms(e, spec) for e in row] for row in m.entries]
    add, mul, neg, is_zero = k.add, k.mul, k.neg, k.is_zero
    # dp: column-mask -> {monomial key: payload}
    dp: dict[int, dict[MonoKey, object]] = {0: {(): k.one}}
    for r in range(n):
        row = rows[r]
        nxt: dict[int, dict[MonoKey, object]] = {}
        for mask, poly in dp.items():
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    continue
                terms = row[j]
                if not terms:
                    continue
                flip = (mask >> (j + 1)).bit_count() & 1
                bucket = nxt.get(mask | bit)
                if bucket is None:
                    bucket = nxt[mask | bit] = {}
                for mono, coef in poly.items():
                    for emono, ecoef in terms:
                        c = mul(coef, ecoef)
                        if flip:
                            c = neg(c)
                        key = _mono_mul(mono, emono)
                        s = bucket.get(key)
                        bucket[key] = c if s is None else add(s, c)
        # dropping zero entries keeps later layers sparse
        dp = {
            mask: {mo: c for mo, c in poly.items() if not is_zero(c)}
            for mask, poly in nxt.items()
        }
        dp = {mask: poly for mask, poly in dp.items() if poly}
        if not dp:
            return Polynomial.zero(spec, m.nvars)
    final = dp.get((1 << n) - 1, {})
    return Polynomial(
        spec, m.nvars, {Monomial(mo): FieldValue(spec, c) for mo, c in final.items()}
    )


def symbolic_perm(m: Matrix) -> Polynomial:
    """Exact permanent polynomial by summing over all permutations."""
    n = m.size
    if n > _PERM_CAP:
        raise TooLarge(f"permanent capped at size {_PERM_CAP}, got {n}")
    spec = m.spec
    k = kernel(spec)
    if n == 0:
        return Polynomial.constant(spec.one(), m.nvars)
    rows = [[_entry_terms(e, spec) for e in row] for row in m.entries]
    acc: dict[MonoKey, object] = {}
    add, mul = k.add, k.mul
    for sigma in permutations(range(n)):
        partial: list[tuple[MonoKey, object]] = [((), k.one)]
        for i in range(n):
            terms = rows[i][sigma[i]]
            if not terms:
                partial = []
                break
            partial = [
                (_mono_mul(mo, emo), mul(c, ec)) for mo, c in partial for emo, ec in terms
            ]
        for mo, c in partial:
            s = acc.get(mo)
            acc[mo] = c if s is None else add(s, c)
    return Polynomial(
        spec,
        m.nvars,
        {Monomial(mo): FieldValue(spec, c) for mo, c in acc.items() if not k.is_zero(c)},
    )


# -- numeric evaluation ---------------------------------------------------------


def _numeric_grid(m: Matrix, assignment: Mapping[int, FieldValue]) -> list[list[object]]:
    spec = m.spec
    grid = []
    for row in m.entries:
        out = []
        for e in row:
            if isinstance(e, Var):
                a = assignment.get(e.index)
                if a is None:
                    raise IncompleteAssignment(f"x{e.index} unassigned")
                if a.spec != spec:
                    raise MixedFields("assignment value from a different field")
                out.append(a.payload)
            elif isinstance(e, FieldValue):
                out.append(e.payload)
            else:
                out.append(e.evaluate(assignment).payload)
        grid.append(out)
    return grid


def _det_gauss(grid: list[list[object]], spec: FieldSpec):
    """In-place exact Gaussian elimination; returns the determinant payload."""
    k = kernel(spec)
    n = len(grid)
    det = k.one
    sub, mul, div, is_zero = k.sub, k.mul, k.div, k.is_zero
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not is_zero(grid[r][col]):
                piv = r
                break
        if piv is None:
            return k.zero
        if piv != col:
            grid[piv], grid[col] = grid[col], grid[piv]
            det = k.neg(det)
        pval = grid[col][col]
        det = mul(det, pval)
        for r in range(col + 1, n):
            f = grid[r][col]
            if is_zero(f):
                continue
            ratio = div(f, pval)
            prow = grid[col]
            row = grid[r]
            for c in range(col, n):
                row[c] = sub(row[c], mul(ratio, prow[c]))
    return det


def det_eval(m: Matrix, assignment: Mapping[int, FieldValue]) -> FieldValue:
    """Determinant value at a total assignment (exact, O(size^3) field ops)."""
    if m.size == 0:
        return m.spec.one()
    grid = _numeric_grid(m, assignment)
    return FieldValue(m.spec, _det_gauss(grid, m.spec))


def _rank_gauss(grid: list[list[object]], spec: FieldSpec) -> int:
    k = kernel(spec)
    nrows = len(grid)
    ncols = len(grid[0]) if nrows else 0
    sub, mul, div, is_zero = k.sub, k.mul, k.div, k.is_zero
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if not is_zero(grid[r][col]):
                piv = r
                break
        if piv is None:
            continue
        grid[piv], grid[rank] = grid[rank], grid[piv]
        pval = grid[rank][col]
        for r in range(rank + 1, nrows):
            f = grid[r][col]
            if is_zero(f):
                continue
            ratio = div(f, pval)
            prow = grid[rank]
            row = grid[r]
            for c in range(col, ncols):
                row[c] = sub(row[c], mul(ratio, prow[c]))
        rank += 1
        if rank == nrows:
            break
    return rank


class EqualityProbe(NamedTuple):
    """Outcome of the random-evaluation determinant comparison.

    ``agree=False`` is conclusive (the witness point distinguishes the
    determinants); ``agree=True`` only says all sampled points matched.
    """

    agree: bool
    witness: dict[int, FieldValue] | None


def _sample_value(spec: FieldSpec, rng: random.Random) -> FieldValue:
    if spec.tag == "Fp":
        return spec.from_int(rng.randrange(spec.p))
    if spec.tag == "Q":
        return spec.from_int(rng.randint(-(10**6), 10**6))
    return spec.eisenstein(rng.randint(-(10**6), 10**6), rng.randint(-(10**6), 10**6))


def equal_det_probabilistic(
    m: Matrix, n: Matrix, trials: int = 12, seed: int = 0
) -> EqualityProbe:
    """Compare det(m) and det(n) at random points.

    Over Fp the modulus must exceed 4 * max(size) so each trial errs with
    probability at most 1/4; over Q and Qw integer points are drawn from
    [-10^6, 10^6].
    """
    if m.spec != n.spec:
        raise MixedFields("matrices over different fields")
    if m.nvars != n.nvars:
        raise MixedUniverses("matrices declare different universes")
    spec = m.spec
    if spec.tag == "Fp" and spec.p <= 4 * max(m.size, n.size, 1):
        raise FieldTooSmall(f"need p > {4 * max(m.size, n.size)} for a sound margin")
    rng = random.Random(seed)
    variables = sorted(set(_matrix_variables(m)) | set(_matrix_variables(n)))
    for _ in range(max(1, trials)):
        point = {v: _sample_value(spec, rng) for v in variables}
        if det_eval(m, point) != det_eval(n, point):
            return EqualityProbe(False, point)
    return EqualityProbe(True, None)


def _matrix_variables(m: Matrix) -> set[int]:
    if isinstance(m, SymbolicMatrix):
        return set(m.multiplicities())
    out: set[int] = set()
    for row in m.entries:
        for e in row:
            out |= set(e.coeffs)
    return out


def minmax_rank(m: SymbolicMatrix, p: int) -> tuple[int, int]:
    """Exact (minrank, maxrank) of m over all F_p assignments of its variables.

    Only variables that actually occur are enumerated; the enumeration
    budget p**(occurring variables) is capped at 10**7.  A matrix over Q is
    reduced mod p entry-wise (denominators must be invertible).
    """
    spec = FieldSpec("Fp", p)
    if m.spec.tag == "Fp":
        if m.spec.p != p:
            raise MixedFields(f"matrix lives over Fp:{m.spec.p}, asked for p={p}")
    elif m.spec.tag != "Q":
        raise MixedFields("rank enumeration supports matrices over Q or Fp")
    variables = m.occurring_variables()
    if p ** len(variables) > _RANK_BUDGET:
        raise BudgetExceeded(
            f"{p}**{len(variables)} assignments exceed the {_RANK_BUDGET} budget"
        )
    base: list[list[object]] = []
    slots: list[tuple[int, int, int]] = []  # (row, col, position in variables)
    pos = {v: i for i, v in enumerate(variables)}
    for i, row in enumerate(m.entries):
        out = []
        for j, e in enumerate(row):
            if isinstance(e, Var):
                slots.append((i, j, pos[e.index]))
                out.append(0)
            elif m.spec.tag == "Fp":
                out.append(e.payload)
            else:
                f = e.payload
                if f.denominator % p == 0:
                    raise DivisionByZero(f"denominator of {e.text()} vanishes mod {p}")
                out.append(f.numerator * pow(f.denominator, -1, p) % p)
        base.append(out)
    lo, hi = m.size + 1, -1
    total = p ** len(variables)
    for idx in range(total):
        vals = []
        x = idx
        for _ in variables:
            vals.append(x % p)
            x //= p
        grid = [row[:] for row in base]
        for i, j, s in slots:
            grid[i][j] = vals[s]
        r = _rank_gauss(grid, spec)
        lo = min(lo, r)
        hi = max(hi, r)
        if lo == 0 and hi == m.size:
            break
    return lo, hi

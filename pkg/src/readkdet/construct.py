"""Generators for the explicit read-once matrices and their field analysis.

Every generator self-checks its defining property before returning:

* ``sym_read_once``            — read-once matrices for the elementary
  symmetric polynomials of degree 1, n-1 and n (the degrees expressible
  over every field);
* ``symmetric_support_matrix`` — a read-once matrix whose determinant has
  exactly the support of the degree-d elementary symmetric polynomial,
  over any field with at least n elements;
* ``s42_witness``              — the 6x6 read-once matrix computing the
  degree-2 elementary symmetric polynomial on four variables, which exists
  precisely over fields containing a root of r**2 - r + 1;
* ``classify_field_s42``       — decides that root's existence per field;
* ``perm6_projection``         — the 6x6 read-once grid whose permanent is
  4 times that same polynomial.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    FieldNotAdmitting,
    FieldTooSmall,
    RetryBudgetExhausted,
    SelfCheckFailed,
    UnsupportedDegree,
)
from .field import RATIONALS, FieldSpec, FieldValue, solve_unit_quadratic
from .poly import elementary_symmetric, mon_of
from .symmat import SymbolicMatrix, Var, symbolic_det, symbolic_perm

_REAL_OBSTRUCTION = "(ps)^2 + (rq)^2 = (ps)(rq) has no nonzero real solution"
_RESIDUE_OBSTRUCTION = "-3 is a quadratic non-residue mod {p}"


def sym_read_once(n: int, d: int, spec: FieldSpec) -> SymbolicMatrix:
    """Read-once matrix with determinant exactly S_n^d, for d in {1, n-1, n}.

    d = n is the plain variable diagonal; d = n-1 borders the diagonal with
    a row of ones and a column of minus-ones; d = 1 puts the variables on
    the border of a constant identity block instead.
    """
    if n < 1:
        raise UnsupportedDegree(f"need n >= 1, got {n}")
    zero, one, neg = spec.zero(), spec.one(), spec.from_int(-1)
    if d == n:
        m = SymbolicMatrix.diagonal(spec, n, [Var(i) for i in range(1, n + 1)])
    elif d == n - 1 and n >= 2:
        grid = [[zero] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            grid[i][i] = Var(i + 1)
            grid[i][n] = neg
            grid[n][i] = one
        m = SymbolicMatrix(spec, n, grid)
    elif d == 1:
        grid = [[zero] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            grid[i][i] = one
            grid[i][n] = neg
            grid[n][i] = Var(i + 1)
        m = SymbolicMatrix(spec, n, grid)
    else:
        raise UnsupportedDegree(f"only d in {{1, n-1, n}} is constructible, got d={d}")
    if symbolic_det(m) != elementary_symmetric(n, d, spec):
        raise SelfCheckFailed(f"S_{n}^{d} construction lost determinant equality")
    return m


def symmetric_support_matrix(
    n: int,
    d: int,
    spec: FieldSpec,
    nodes: Sequence[FieldValue] | None = None,
    retries: int = 100,
) -> SymbolicMatrix:
    """Read-once matrix whose determinant support equals mon(S_n^d).

    Built as the block matrix [[D, A], [C, B]] with D the variable diagonal,
    B an all-ones block of size t = n - d + 1, the columns of C truncated
    Vandermonde vectors (1, a_i, ..., a_i^(k-1), 0) over distinct nodes a_i,
    and A the transpose of C.  The support equality is verified before
    returning; if a custom or default node choice ever failed it, fresh
    random node sets are tried up to ``retries`` times.
    """
    if not 1 <= d <= n:
        raise UnsupportedDegree(f"need 1 <= d <= n, got d={d}, n={n}")
    if spec.tag == "Fp" and spec.p < n:
        raise FieldTooSmall(f"need {n} distinct nodes but the field has {spec.p} elements")
    target = mon_of(elementary_symmetric(n, d, spec))
    if nodes is None:
        nodes = [spec.from_int(i) for i in range(n)]
    elif len(nodes) != n or len(set(nodes)) != n:
        raise UnsupportedDegree(f"need {n} distinct nodes, got {len(nodes)}")
    rng = random.Random(1)
    for _ in range(max(1, retries)):
        m = _assemble_support_matrix(n, d, spec, nodes)
        if mon_of(symbolic_det(m)) == target:
            return m
        nodes = _random_nodes(n, spec, rng)
    raise RetryBudgetExhausted(f"no node set matched mon(S_{n}^{d}) within {retries} tries")


def _assemble_support_matrix(n, d, spec, nodes) -> SymbolicMatrix:
    k = n - d
    t = k + 1
    zero, one = spec.zero(), spec.one()
    size = n + t
    grid = [[zero] * size for _ in range(size)]
    for i in range(n):
        grid[i][i] = Var(i + 1)
        acc = one
        for row in range(k):
            grid[n + row][i] = acc
            grid[i][n + row] = acc
            acc = acc * nodes[i]
        # the last coordinate of every Vandermonde column stays zero
    for i in range(t):
        for j in range(t):
            grid[n + i][n + j] = one
    return SymbolicMatrix(spec, n, grid)


def _random_nodes(n: int, spec: FieldSpec, rng: random.Random) -> list[FieldValue]:
    if spec.tag == "Fp":
        return [spec.from_int(v) for v in rng.sample(range(spec.p), n)]
    picks = rng.sample(range(-(10**6), 10**6), n)
    if spec.tag == "Q":
        return [spec.from_int(v) for v in picks]
    return [spec.eisenstein(v, rng.randint(0, 1)) for v in picks]


@dataclass(frozen=True)
class FieldClassification:
    """Whether a field carries a root of r**2 - r + 1 (and hence the 6x6
    read-once witness for the degree-2 symmetric polynomial on 4 variables)."""

    admitting: bool
    r: FieldValue | None = None
    reason: str | None = None


def classify_field_s42(spec: FieldSpec) -> FieldClassification:
    """Decide expressibility of S_4^2 as a read-once determinant over spec.

    Admitting fields return an explicit root r of r**2 - r + 1; over a prime
    field the answer agrees with exhaustive search (for p > 3 a root exists
    exactly when p = 1 mod 3).  The rationals embed in the reals, where the
    coefficient system forces (ps)^2 + (rq)^2 = (ps)(rq) with all four
    factors nonzero, which no real point satisfies.
    """
    if spec.tag == "Q":
        return FieldClassification(False, reason=_REAL_OBSTRUCTION)
    if spec.tag == "Qw":
        return FieldClassification(True, r=spec.omega())
    root = solve_unit_quadratic(spec.p)
    if root is None:
        return FieldClassification(False, reason=_RESIDUE_OBSTRUCTION.format(p=spec.p))
    return FieldClassification(True, r=spec.from_int(root))


def s42_witness(spec: FieldSpec) -> SymbolicMatrix:
    """The 6x6 read-once matrix with determinant exactly S_4^2.

    Exists over Q(w) (take r = w) and over prime fields containing a root
    of r**2 - r + 1; other supported fields raise FieldNotAdmitting with
    the obstruction.
    """
    verdict = classify_field_s42(spec)
    if not verdict.admitting:
        raise FieldNotAdmitting(verdict.reason)
    r = verdict.r
    rinv = r.inverse()
    zero, one = spec.zero(), spec.one()
    grid = [
        [Var(1), zero, zero, zero, one, zero],
        [zero, Var(2), zero, zero, zero, one],
        [zero, zero, Var(3), zero, one, rinv],
        [zero, zero, zero, Var(4), one, one],
        [one, zero, one, one, zero, zero],
        [zero, one, r, one, zero, zero],
    ]
    m = SymbolicMatrix(spec, 4, grid)
    if symbolic_det(m) != elementary_symmetric(4, 2, spec):
        raise SelfCheckFailed("witness determinant is not S_4^2")
    return m


def perm6_projection() -> tuple[SymbolicMatrix, bool]:
    """The 6x6 read-once grid whose permanent equals 4 * S_4^2 over Q.

    Returns the matrix and the result of the full 720-term verification.
    """
    spec = RATIONALS
    zero, one = spec.zero(), spec.one()
    grid = [
        [Var(1), zero, zero, zero, one, one],
        [zero, Var(2), zero, zero, one, one],
        [zero, zero, Var(3), zero, one, one],
        [zero, zero, zero, Var(4), one, one],
        [one, one, one, one, zero, zero],
        [one, one, one, one, zero, zero],
    ]
    m = SymbolicMatrix(spec, 4, grid)
    target = elementary_symmetric(4, 2, spec).scale(spec.from_int(4))
    return m, symbolic_perm(m) == target

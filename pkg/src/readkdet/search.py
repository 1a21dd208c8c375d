"""Bounded exhaustive search for read-once witnesses over tiny prime fields,
plus the fullness certificate for non-expressible monomial sets.

The search enumerates every read-once matrix of each size up to the cap:
the target's variables are placed injectively into cells and the remaining
cells range over all field constants.  Completeness under the prunings:

* Row/column symmetry.  Permuting rows and columns changes the determinant
  only by sign, which preserves support and is absorbed in exact mode by
  also accepting the negated target (realizable by one row swap).  Each
  equivalence class therefore keeps a representative whose variable cells,
  listed in variable order, use rows and columns in first-occurrence order
  (a restricted-growth normal form).
* Variable restriction.  A witness containing a variable absent from the
  target has a determinant independent of it, so substituting any constant
  for that variable gives an equally small witness without it; searching
  matrices whose variables are exactly the target's loses nothing.
* Degree pruning.  A size-m determinant has degree at most m, and a
  monomial whose variables share a row or column of the placement cannot
  appear in the determinant; placements failing either test for some
  target monomial are skipped.

Exhaustion claims are reported per (field, size) pair only.  Every found
witness is re-verified outside the search loop with the full symbolic
determinant.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations, product
from typing import Union

from .errors import MixedFields, TargetTooLarge
from .field import FieldSpec
from .poly import MonomialSet, Polynomial, mon_of
from .symmat import SymbolicMatrix, Var, symbolic_det

_MAX_VARS = 4
_MAX_SIZE = 5
_SEARCH_PRIMES = (2, 3, 5)

Target = Union[MonomialSet, Polynomial]


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one witness search.

    A MonomialSet target asks for support equality, a Polynomial target for
    exact determinant equality.  ``max_size`` defaults to min(3 * number of
    target variables, 5); ``canonical=False`` disables symmetry pruning
    (only useful for validating the pruning itself on tiny instances).
    """

    target: Target
    field: FieldSpec
    max_size: int | None = None
    node_budget: int = 10**8
    seed: int = 0
    canonical: bool = True

    def __post_init__(self):
        if self.field.tag != "Fp" or self.field.p not in _SEARCH_PRIMES:
            raise TargetTooLarge(f"search runs over F_p with p in {_SEARCH_PRIMES}")
        if isinstance(self.target, Polynomial) and self.target.spec != self.field:
            raise MixedFields("exact-mode target must live over the search field")

    def support_only(self) -> bool:
        return isinstance(self.target, MonomialSet)

    def effective_max_size(self) -> int:
        if self.max_size is not None:
            size = self.max_size
        else:
            variables = _target_variables(self.target)
            size = min(3 * max(1, len(variables)), _MAX_SIZE)
        if size < 1 or size > _MAX_SIZE:
            raise TargetTooLarge(f"max_size must stay within 1..{_MAX_SIZE}, got {size}")
        return size


@dataclass(frozen=True)
class SearchOutcome:
    """Found(witness) / ExhaustedUpTo(size) / BudgetExceeded(nodes)."""

    status: str
    witness: SymbolicMatrix | None = None
    exhausted_size: int | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


def _target_variables(target: Target) -> list[int]:
    if isinstance(target, MonomialSet):
        return sorted(target.variables())
    return sorted(target.support().variables())


def _target_masks(target: Target, positions: dict[int, int]):
    """Target as {bitmask: coefficient payload} (support mode: coeff None).

    Returns None when some monomial is not multilinear: no read-once
    determinant contains a square, so no witness can exist.
    """
    masks = {}
    if isinstance(target, MonomialSet):
        for m in target.support:
            if not m.is_multilinear():
                return None
            bits = 0
            for v in m.variables():
                bits |= 1 << positions[v]
            masks[bits] = None
        return masks
    for m, c in target.terms.items():
        if not m.is_multilinear():
            return None
        bits = 0
        for v in m.variables():
            bits |= 1 << positions[v]
        masks[bits] = c.payload
    return masks


def _rgs_placements(m: int, k: int):
    """Variable placements in row/column first-occurrence normal form."""
    out: list[tuple[tuple[int, int], ...]] = []

    def extend(cells: tuple, rmax: int, cmax: int):
        if len(cells) == k:
            out.append(cells)
            return
        for r in range(min(rmax + 1, m - 1) + 1):
            for c in range(min(cmax + 1, m - 1) + 1):
                if (r, c) in cells:
                    continue
                extend(cells + ((r, c),), max(rmax, r), max(cmax, c))

    if k == 0:
        return [()]
    # the first variable always normalizes to cell (0, 0)
    extend(((0, 0),), 0, 0)
    return out


def _all_placements(m: int, k: int):
    cells = [(i, j) for i in range(m) for j in range(m)]
    return list(permutations(cells, k))


def _placement_admits(placement, masks) -> bool:
    """Every target monomial's cells must use distinct rows and columns."""
    for bits in masks:
        rows = set()
        cols = set()
        count = 0
        b = bits
        while b:
            pos = (b & -b).bit_length() - 1
            b &= b - 1
            r, c = placement[pos]
            rows.add(r)
            cols.add(c)
            count += 1
        if len(rows) != count or len(cols) != count:
            return False
    return True


def _perm_structures(m: int, placement):
    """Per permutation: (sign, variable bitmask, constant cell ids)."""
    var_at = {cell: pos for pos, cell in enumerate(placement)}
    structures = []
    for sigma in permutations(range(m)):
        sign = _sign(sigma)
        bits = 0
        consts = []
        for i in range(m):
            pos = var_at.get((i, sigma[i]))
            if pos is None:
                consts.append(i * m + sigma[i])
            else:
                bits |= 1 << pos
        structures.append((sign, bits, tuple(consts)))
    return structures


def _sign(sigma) -> int:
    inv = 0
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j]:
                inv += 1
    return -1 if inv & 1 else 1


def search_rod(config: SearchConfig) -> SearchOutcome:
    """Exhaustive search for a read-once witness of the target.

    Found outcomes carry a witness verified with the full symbolic
    determinant; ExhaustedUpTo(s) certifies that no read-once matrix of
    size <= s over the configured field matches the target.
    """
    p = config.field.p
    variables = _target_variables(config.target)
    if len(variables) > _MAX_VARS:
        raise TargetTooLarge(f"search supports at most {_MAX_VARS} variables")
    max_size = config.effective_max_size()
    positions = {v: i for i, v in enumerate(variables)}
    masks = _target_masks(config.target, positions)
    if masks is None:
        # a read-once determinant is multilinear; nothing to search
        return SearchOutcome("exhausted", exhausted_size=max_size)
    support_only = config.support_only()
    maxdeg = max((bits.bit_count() for bits in masks), default=0)
    k = len(variables)
    rng = random.Random(config.seed)
    points = [[rng.randrange(p) for _ in range(k)] for _ in range(3)]
    target_evals = None
    if not support_only:
        target_evals = [_eval_masks(masks, pt, p) for pt in points]
        neg_evals = [-e % p for e in target_evals]

    nodes = 0
    for m in range(1, max_size + 1):
        if m < maxdeg or m * m < k:
            continue  # provably no witness at this size
        placements = _rgs_placements(m, k) if config.canonical else _all_placements(m, k)
        structures_cache = {}
        const_cells = m * m - k
        for placement in placements:
            if not _placement_admits(placement, masks):
                continue
            structures = structures_cache.get(placement)
            if structures is None:
                structures = structures_cache[placement] = _perm_structures(m, placement)
            placed = {cell for cell in placement}
            free = [i * m + j for i in range(m) for j in range(m) if (i, j) not in placed]
            values = [0] * (m * m)
            for fill in product(range(p), repeat=const_cells):
                nodes += 1
                if nodes > config.node_budget:
                    return SearchOutcome("budget_exceeded", nodes=nodes)
                for cell, val in zip(free, fill):
                    values[cell] = val
                if not support_only:
                    for pt, te, ne in zip(points, target_evals, neg_evals):
                        ev = _eval_candidate(structures, values, pt, p)
                        if ev != te and (m < 2 or ev != ne):
                            break
                    else:
                        hit = _match_exact(structures, values, masks, p, m)
                        if hit is not None:
                            witness = _build_witness(config, m, placement, values, hit)
                            if witness is not None:
                                return SearchOutcome("found", witness=witness, nodes=nodes)
                    continue
                acc = _expand_support(structures, values, p)
                if acc is not None and set(acc) == set(masks):
                    witness = _build_witness(config, m, placement, values, False)
                    if witness is not None:
                        return SearchOutcome("found", witness=witness, nodes=nodes)
    return SearchOutcome("exhausted", exhausted_size=max_size, nodes=nodes)


def _eval_masks(masks, point, p) -> int:
    total = 0
    for bits, coef in masks.items():
        term = coef % p
        b = bits
        while b:
            pos = (b & -b).bit_length() - 1
            b &= b - 1
            term = term * point[pos] % p
        total = (total + term) % p
    return total


def _eval_candidate(structures, values, point, p) -> int:
    total = 0
    for sign, bits, consts in structures:
        term = 1
        for cell in consts:
            v = values[cell]
            if v == 0:
                term = 0
                break
            term *= v
        if term == 0:
            continue
        b = bits
        while b:
            pos = (b & -b).bit_length() - 1
            b &= b - 1
            term *= point[pos]
        total += term if sign > 0 else -term
    return total % p


def _expand_symbolic(structures, values, p) -> dict[int, int]:
    acc: dict[int, int] = {}
    for sign, bits, consts in structures:
        term = sign
        for cell in consts:
            v = values[cell]
            if v == 0:
                term = 0
                break
            term *= v
        if term == 0:
            continue
        acc[bits] = (acc.get(bits, 0) + term) % p
    return {bits: c for bits, c in acc.items() if c}


def _expand_support(structures, values, p):
    return _expand_symbolic(structures, values, p)


def _match_exact(structures, values, masks, p, m):
    """None, or False for a direct match, or True when the negated target
    matched (fixable by one row swap when m >= 2)."""
    acc = _expand_symbolic(structures, values, p)
    if set(acc) != set(masks):
        return None
    if all(acc[b] == masks[b] % p for b in acc):
        return False
    if m >= 2 and all(acc[b] == -masks[b] % p for b in acc):
        return True
    return None


def _build_witness(config: SearchConfig, m, placement, values, negate) -> SymbolicMatrix | None:
    """Assemble and re-verify a candidate; None if verification fails."""
    spec = config.field
    variables = _target_variables(config.target)
    grid: list[list] = [[spec.from_int(values[i * m + j]) for j in range(m)] for i in range(m)]
    for pos, (r, c) in enumerate(placement):
        grid[r][c] = Var(variables[pos])
    if negate and m >= 2:
        grid[0], grid[1] = grid[1], grid[0]
    nvars = config.target.nvars
    witness = SymbolicMatrix(spec, nvars, grid)
    if not witness.verify_read_k(1):
        return None
    det = symbolic_det(witness)
    if not det.is_multilinear():
        return None
    if config.support_only():
        ok = mon_of(det) == MonomialSet(frozenset(config.target.support), nvars)
    else:
        ok = det == config.target
    return witness if ok else None


# -- fullness certificate ---------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Non-expressibility certificate from fullness/emptiness structure.

    When a multilinear support is n-full, (n-1)-empty and (n-2)-empty yet
    k-full for some floor((n-1)/2) <= k < n, no read-once matrix over any
    field has that support; the verdict then reads "NotExpressible".
    Supports outside those hypotheses get "Inapplicable".
    """

    n: int
    n_full: bool
    n_minus_1_empty: bool
    n_minus_2_empty: bool
    k_full_witnesses: tuple[int, ...]
    verdict: str
    note: str = ""

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "n_full": self.n_full,
            "n_minus_1_empty": self.n_minus_1_empty,
            "n_minus_2_empty": self.n_minus_2_empty,
            "k_full_witnesses": list(self.k_full_witnesses),
            "verdict": self.verdict,
            "note": self.note,
        }


def certify_support(s: MonomialSet) -> Certificate:
    """Evaluate the fullness certificate for a monomial set.

    The hypotheses need n = nvars >= 4; below that they are contradictory
    and the certificate is Inapplicable by definition.
    """
    n = s.nvars
    if n < 4:
        return Certificate(
            n, False, False, False, (), "Inapplicable",
            note=f"the hypotheses need at least 4 variables, got {n}",
        )
    n_full = s.is_k_full(n)
    e1 = s.is_k_empty(n - 1)
    e2 = s.is_k_empty(n - 2)
    lo = (n - 1) // 2
    witnesses = tuple(k for k in range(lo, n) if s.is_k_full(k))
    if n_full and e1 and e2 and witnesses:
        return Certificate(
            n, n_full, e1, e2, witnesses, "NotExpressible",
            note=(
                f"{n}-full, {n - 1}-empty and {n - 2}-empty, yet "
                f"{witnesses[0]}-full: no read-once determinant over any "
                "field has this support"
            ),
        )
    return Certificate(
        n, n_full, e1, e2, witnesses, "Inapplicable",
        note="the fullness/emptiness hypotheses do not all hold",
    )

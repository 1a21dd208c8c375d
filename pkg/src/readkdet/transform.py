"""Determinant-preserving transformations of read-k matrices.

The operations here never change the determinant:

* ``substitute_matrix``  — specialize variables to constants;
* ``derivative_minor``   — for read-once input, the minor computing an
  iterated partial derivative (with the cofactor sign folded back in so the
  result's determinant equals the derivative exactly);
* ``block_product``      — block-diagonal join, multiplying determinants;
* ``reduce_to_affine``   — rewrite a read-k matrix as an affine matrix of
  dimension at most k times the number of occurring variables;
* ``compress_read_once`` — shrink a read-once matrix to size at most three
  times the number of occurring variables, staying read-once;
* ``abp_to_read_once``   — turn an occurrence-one algebraic branching
  program into a read-once matrix computing its path polynomial.

Every structural rewrite self-checks determinant equality (symbolically on
small inputs, by random evaluation above that) and raises SelfCheckFailed
rather than returning a wrong matrix.
"""

from __future__ import annotations

import json
import random
from typing import Mapping, Sequence, Union

from .errors import (
    FormatError,
    MixedFields,
    MixedUniverses,
    NotOccurrenceOne,
    NotReadOnce,
    ReadBoundViolated,
    SelfCheckFailed,
    TooLarge,
    ZeroDeterminant,
)
from .field import FieldSpec, FieldValue, kernel
from .poly import Polynomial
from .symmat import (
    AffineForm,
    AffineMatrix,
    Entry,
    SymbolicMatrix,
    Var,
    _det_gauss,
    _sample_value,
    det_eval,
    equal_det_probabilistic,
    symbolic_det,
)

# symbolic self-checks up to this size; random-evaluation checks above
_SYM_CHECK_CAP = 14


def substitute_matrix(m: SymbolicMatrix, assignment: Mapping[int, FieldValue]) -> SymbolicMatrix:
    """Replace assigned variables by constant cells."""
    for c in assignment.values():
        if c.spec != m.spec:
            raise MixedFields("assignment values must match the matrix field")
    rows = []
    for row in m.entries:
        out = []
        for e in row:
            if isinstance(e, Var) and e.index in assignment:
                out.append(assignment[e.index])
            else:
                out.append(e)
        rows.append(out)
    return SymbolicMatrix(m.spec, m.nvars, rows)


def block_product(m1: SymbolicMatrix, m2: SymbolicMatrix) -> SymbolicMatrix:
    """Block-diagonal join; det(result) = det(m1) * det(m2)."""
    if m1.spec != m2.spec:
        raise MixedFields("block product needs a common field")
    nvars = max(m1.nvars, m2.nvars)
    z = m1.spec.zero()
    s1, s2 = m1.size, m2.size
    rows = []
    for i in range(s1):
        rows.append(list(m1.entries[i]) + [z] * s2)
    for i in range(s2):
        rows.append([z] * s1 + list(m2.entries[i]))
    return SymbolicMatrix(m1.spec, nvars, rows)


def _variable_cells(m: SymbolicMatrix) -> dict[int, tuple[int, int]]:
    cells: dict[int, tuple[int, int]] = {}
    for i, row in enumerate(m.entries):
        for j, e in enumerate(row):
            if isinstance(e, Var):
                cells[e.index] = (i, j)
    return cells


def derivative_minor(m: SymbolicMatrix, variables) -> SymbolicMatrix | None:
    """Minor whose determinant equals the iterated partial derivative.

    Returns None when the derivative is identically zero: some requested
    variable is absent, or two of them share a row or column.  Otherwise the
    rows and columns holding the variables are removed and the cofactor sign
    is folded back in (by a row swap, or a bordered -1 block when the minor
    is too small to swap), so that det(result) equals the derivative of
    det(m) exactly.
    """
    if not m.verify_read_k(1):
        raise NotReadOnce("derivative minors need a read-once matrix")
    wanted = sorted(set(variables))
    cells = _variable_cells(m)
    picked = []
    for v in wanted:
        cell = cells.get(v)
        if cell is None:
            return None
        picked.append(cell)
    rows = [c[0] for c in picked]
    cols = [c[1] for c in picked]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        return None
    # cofactor sign: peel cells off one by one, using positions within the
    # shrinking matrix
    parity = 0
    rem_rows = list(range(m.size))
    rem_cols = list(range(m.size))
    for ri, ci in sorted(picked):
        parity ^= (rem_rows.index(ri) + rem_cols.index(ci)) & 1
        rem_rows.remove(ri)
        rem_cols.remove(ci)
    minor = m.minor({r + 1 for r in rows}, {c + 1 for c in cols})
    if not parity:
        return minor
    if minor.size >= 2:
        order = list(range(minor.size))
        order[0], order[1] = order[1], order[0]
        return minor.permuted(order, list(range(minor.size)))
    neg_one = m.spec.from_int(-1)
    if minor.size == 1 and isinstance(minor.entries[0][0], FieldValue):
        return SymbolicMatrix(m.spec, m.nvars, [[minor.entries[0][0] * neg_one]])
    if minor.size == 0:
        return SymbolicMatrix(m.spec, m.nvars, [[neg_one]])
    z = m.spec.zero()
    return SymbolicMatrix(m.spec, m.nvars, [[minor.entries[0][0], z], [z, neg_one]])


# -- shared linear algebra on raw payload grids ---------------------------------


def _perm_parity(order: Sequence[int]) -> int:
    inv = 0
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                inv += 1
    return inv & 1


def _grid_det(grid: list[list[object]], spec: FieldSpec):
    return _det_gauss([row[:] for row in grid], spec)


def _independent_columns(grid: list[list[object]], spec: FieldSpec, limit: int | None = None) -> list[int]:
    """Greedy leftmost maximal independent column set of a payload grid."""
    k = kernel(spec)
    nrows = len(grid)
    ncols = len(grid[0]) if nrows else 0
    basis: list[list[object]] = []  # echelonized columns
    pivots: list[int] = []  # pivot row of each basis vector
    chosen: list[int] = []
    for j in range(ncols):
        if limit is not None and len(chosen) == limit:
            break
        vec = [grid[i][j] for i in range(nrows)]
        for b, piv in zip(basis, pivots):
            if not k.is_zero(vec[piv]):
                ratio = k.div(vec[piv], b[piv])
                vec = [k.sub(vec[i], k.mul(ratio, b[i])) for i in range(nrows)]
        piv = next((i for i in range(nrows) if not k.is_zero(vec[i])), None)
        if piv is None:
            continue
        basis.append(vec)
        pivots.append(piv)
        chosen.append(j)
    return chosen


def _solve_system(a: list[list[object]], b: list[list[object]], spec: FieldSpec) -> list[list[object]]:
    """Solve a @ x = b exactly for square invertible a (payload grids)."""
    k = kernel(spec)
    n = len(a)
    q = len(b[0]) if b else 0
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if not k.is_zero(aug[r][col]))
        if piv != col:
            aug[piv], aug[col] = aug[col], aug[piv]
        pval = aug[col][col]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            if k.is_zero(f):
                continue
            ratio = k.div(f, pval)
            for c in range(col, n + q):
                aug[r][c] = k.sub(aug[r][c], k.mul(ratio, aug[col][c]))
    return [[k.div(aug[i][n + j], aug[i][i]) for j in range(q)] for i in range(n)]


def _payload(e: Entry) -> object:
    if isinstance(e, Var):
        raise FormatError("expected a constant cell")
    return e.payload


def _nonzero_det(m: SymbolicMatrix, rng_seed: int = 0) -> bool | None:
    """Cheap nonzero test: True if a random point certifies det != 0."""
    rng = random.Random(rng_seed)
    variables = m.occurring_variables()
    for _ in range(24):
        point = {v: _sample_value(m.spec, rng) for v in variables}
        if not det_eval(m, point).is_zero():
            return True
    return None


def _normalize_blocks(m: SymbolicMatrix) -> tuple[SymbolicMatrix, int, int, int]:
    """Permute rows/columns so all variables sit in the leading principal
    block.

    Returns (permuted matrix, principal block size, parity of the combined
    permutation, number of trailing constant rows).
    """
    var_rows = sorted(
        {i for i, row in enumerate(m.entries) if any(isinstance(e, Var) for e in row)}
    )
    var_cols = sorted(
        {
            j
            for j in range(m.size)
            if any(isinstance(row[j], Var) for row in m.entries)
        }
    )
    mdim = max(len(var_rows), len(var_cols))
    row_order = var_rows + [i for i in range(m.size) if i not in set(var_rows)]
    col_order = var_cols + [j for j in range(m.size) if j not in set(var_cols)]
    parity = _perm_parity(row_order) ^ _perm_parity(col_order)
    return m.permuted(row_order, col_order), mdim, parity, m.size - mdim


def reduce_to_affine(m: SymbolicMatrix, k: int) -> AffineMatrix:
    """Rewrite a read-k matrix as an affine matrix of dimension <= k * n.

    n counts the variables that actually occur.  The rewrite permutes all
    variables into the leading principal block, eliminates the trailing
    constant rows against an invertible column subset, and folds the pivot
    determinant and every permutation / block-triangularity sign into one
    row, so det is preserved exactly (self-checked).

    A matrix whose determinant is the zero polynomial reduces to the 1x1
    zero matrix by convention.
    """
    if not m.verify_read_k(k):
        raise ReadBoundViolated(f"a variable occurs more than {k} times")
    spec = m.spec
    occurring = m.occurring_variables()

    f = symbolic_det(m) if m.size <= _SYM_CHECK_CAP else None
    if f is not None and f.is_zero():
        return AffineMatrix(spec, m.nvars, [[AffineForm(spec, spec.zero())]])
    if f is None and _nonzero_det(m) is None:
        f = symbolic_det(m)  # rare: all probes zero, settle it exactly
        if f.is_zero():
            return AffineMatrix(spec, m.nvars, [[AffineForm(spec, spec.zero())]])

    if not occurring:
        value = f if f is not None else symbolic_det(m)
        return AffineMatrix(spec, m.nvars, [[AffineForm(spec, value.constant_value())]])

    permuted, mdim, parity, p = _normalize_blocks(m)
    if p == 0:
        result = AffineMatrix.from_symbolic(m)
        _check_affine_reduction(m, result, f, k, len(occurring))
        return result

    size = m.size
    bottom = [[_payload(permuted.entries[i][j]) for j in range(size)] for i in range(mdim, size)]
    j1 = _independent_columns(bottom, spec, limit=p)
    if len(j1) < p:
        # dependent constant rows force det(m) = 0
        return AffineMatrix(spec, m.nvars, [[AffineForm(spec, spec.zero())]])
    in_j1 = set(j1)
    j2 = [j for j in range(size) if j not in in_j1]
    parity ^= _perm_parity(j1 + j2)

    t1 = [[bottom[i][j] for j in j1] for i in range(p)]
    t2 = [[bottom[i][j] for j in j2] for i in range(p)]
    kk = kernel(spec)
    neg_t2 = [[kk.neg(x) for x in row] for row in t2]
    g = _solve_system(t1, neg_t2, spec)  # p x mdim, t1 @ g = -t2
    c = _grid_det(t1, spec)

    top = permuted.entries[:mdim]
    u = [[AffineForm.from_entry(top[i][j], spec) for j in j1] for i in range(mdim)]
    v = [[AffineForm.from_entry(top[i][j], spec) for j in j2] for i in range(mdim)]
    for i in range(mdim):
        for j in range(mdim):
            acc = v[i][j]
            for l in range(p):
                coef = g[l][j]
                if kk.is_zero(coef):
                    continue
                acc = acc + u[i][l].scale(FieldValue(spec, coef))
            v[i][j] = acc

    gamma = FieldValue(spec, c)
    if parity ^ ((mdim * p) & 1):
        gamma = -gamma
    v[0] = [e.scale(gamma) for e in v[0]]
    result = AffineMatrix(spec, m.nvars, v)
    _check_affine_reduction(m, result, f, k, len(occurring))
    return result


def _check_affine_reduction(
    m: SymbolicMatrix, result: AffineMatrix, f: Polynomial | None, k: int, n_occ: int
):
    if result.size > max(1, k * n_occ) or result.size > m.size:
        raise SelfCheckFailed(
            f"dimension {result.size} exceeds bound min({m.size}, {k}*{n_occ})"
        )
    if f is not None:
        if symbolic_det(result) != f:
            raise SelfCheckFailed("affine reduction changed the determinant")
    else:
        if not equal_det_probabilistic(m, result, trials=16).agree:
            raise SelfCheckFailed("affine reduction changed the determinant")


def compress_read_once(m: SymbolicMatrix) -> SymbolicMatrix:
    """Shrink a read-once matrix to size <= 3 * n preserving det exactly.

    n counts occurring variables.  Matrices already within the bound pass
    through unchanged.  The constant columns outside the variable block are
    reduced to a maximal independent set, the constant rows eliminated
    against the freed columns, and the leftover scalar (pivot determinant
    and permutation signs) is folded into a constant row, or a bordered 1x1
    block when the result has no constant row.
    """
    if not m.verify_read_k(1):
        raise NotReadOnce("compression is defined for read-once matrices")
    spec = m.spec
    f = symbolic_det(m)
    if f.is_zero():
        raise ZeroDeterminant("determinant is the zero polynomial")
    occurring = m.occurring_variables()
    n = len(occurring)
    if n == 0:
        return SymbolicMatrix(spec, m.nvars, [[f.constant_value()]])
    if m.size <= 3 * n:
        return m

    permuted, mdim, parity, p = _normalize_blocks(m)
    size = m.size
    kk = kernel(spec)

    # constant blocks around the variable block Q: R above, [C | D] below
    right = [[_payload(permuted.entries[i][j]) for j in range(mdim, size)] for i in range(mdim)]
    bot = [[_payload(permuted.entries[i][j]) for j in range(size)] for i in range(mdim, size)]

    s1 = _independent_columns(right, spec)
    r = len(s1)
    dep = [j for j in range(p) if j not in set(s1)]
    if r and dep:
        # column operations zeroing the dependent R columns; the same ops
        # update the D block below
        a = [[right[i][j] for j in s1] for i in range(mdim)]
        rhs = [[right[i][j] for j in dep] for i in range(mdim)]
        lam = _solve_least(a, rhs, spec)  # r x len(dep)
        for col_idx, j in enumerate(dep):
            for i in range(p):
                acc = bot[i][mdim + j]
                for t, s in enumerate(s1):
                    acc = kk.sub(acc, kk.mul(lam[t][col_idx], bot[i][mdim + s]))
                bot[i][mdim + j] = acc
    parity ^= _perm_parity(list(range(mdim)) + [mdim + j for j in s1] + [mdim + j for j in dep])

    # row operations leaving exactly one nonzero per freed column, so the
    # non-pivot bottom rows become zero across the freed block
    dep_cols = [mdim + j for j in dep]
    pivots: list[int] = []
    used: set[int] = set()
    for col in dep_cols:
        piv = next((i for i in range(p) if i not in used and not kk.is_zero(bot[i][col])), None)
        if piv is None:
            raise SelfCheckFailed("freed columns lost rank despite nonzero determinant")
        used.add(piv)
        pivots.append(piv)
        pval = bot[piv][col]
        prow = bot[piv]
        for i in range(p):
            if i == piv or kk.is_zero(bot[i][col]):
                continue
            ratio = kk.div(bot[i][col], pval)
            row = bot[i]
            for cc in range(size):
                row[cc] = kk.sub(row[cc], kk.mul(ratio, prow[cc]))

    keep_rows = [i for i in range(p) if i not in used]
    parity ^= _perm_parity(keep_rows + pivots)
    det_d2 = kk.one
    for col, piv in zip(dep_cols, pivots):
        det_d2 = kk.mul(det_d2, bot[piv][col])

    rows: list[list[Entry]] = []
    for i in range(mdim):
        rows.append(
            [permuted.entries[i][j] for j in range(mdim)]
            + [FieldValue(spec, right[i][j]) for j in s1]
        )
    for i in keep_rows:
        rows.append(
            [FieldValue(spec, bot[i][j]) for j in range(mdim)]
            + [FieldValue(spec, bot[i][mdim + j]) for j in s1]
        )
    gamma = FieldValue(spec, det_d2)
    if parity:
        gamma = -gamma
    result = SymbolicMatrix(spec, m.nvars, rows)
    if gamma != spec.one():
        if r:
            result = result.scale_row(result.size, gamma)
        else:
            z = spec.zero()
            grown = [list(row) + [z] for row in rows]
            grown.append([z] * len(rows) + [gamma])
            result = SymbolicMatrix(spec, m.nvars, grown)

    if result.size > 3 * n or not result.verify_read_k(1):
        raise SelfCheckFailed(f"compressed size {result.size} misses the 3n bound")
    if symbolic_det(result) != f:
        raise SelfCheckFailed("compression changed the determinant")
    return result


def _solve_least(a: list[list[object]], b: list[list[object]], spec: FieldSpec) -> list[list[object]]:
    """Solve a @ x = b for a tall full-column-rank a (consistent systems)."""
    k = kernel(spec)
    nrows, ncols = len(a), len(a[0])
    q = len(b[0]) if b and b[0] else 0
    aug = [list(a[i]) + list(b[i]) for i in range(nrows)]
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if not k.is_zero(aug[r][col])), None)
        if piv is None:
            raise SelfCheckFailed("column set unexpectedly dependent")
        if piv != row:
            aug[piv], aug[row] = aug[row], aug[piv]
        pval = aug[row][col]
        for rr in range(nrows):
            if rr == row:
                continue
            f = aug[rr][col]
            if k.is_zero(f):
                continue
            ratio = k.div(f, pval)
            for cc in range(col, ncols + q):
                aug[rr][cc] = k.sub(aug[rr][cc], k.mul(ratio, aug[row][cc]))
        row += 1
    return [
        [k.div(aug[i][ncols + j], aug[i][i]) for j in range(q)] for i in range(ncols)
    ]


# -- algebraic branching programs -----------------------------------------------


class ABP:
    """Layered algebraic branching program with occurrence-one edge labels.

    Edges run from layer l to layer l+1 and are labeled by a variable or a
    constant; each variable labels at most one edge.  The program computes
    the sum over source-to-sink paths of the product of edge labels.
    """

    __slots__ = ("spec", "nvars", "layers", "vertices", "edges", "source", "sink")

    def __init__(
        self,
        spec: FieldSpec,
        nvars: int,
        vertices: Mapping[int, int],
        edges: Sequence[tuple[int, int, Entry]],
        source: int,
        sink: int,
    ):
        verts = dict(vertices)
        if source not in verts or sink not in verts:
            raise FormatError("source and sink must be vertices")
        if source == sink:
            raise FormatError("source and sink must differ")
        seen_vars: set[int] = set()
        seen_pairs: set[tuple[int, int]] = set()
        cleaned = []
        for u, v, label in edges:
            if u not in verts or v not in verts:
                raise FormatError(f"edge ({u}, {v}) uses unknown vertices")
            if verts[v] != verts[u] + 1:
                raise FormatError(f"edge ({u}, {v}) does not advance one layer")
            if (u, v) in seen_pairs:
                raise FormatError(f"parallel edge ({u}, {v}) not supported")
            seen_pairs.add((u, v))
            if isinstance(label, Var):
                if label.index in seen_vars:
                    raise NotOccurrenceOne(f"x{label.index} labels two edges")
                if label.index > nvars:
                    raise MixedUniverses(f"x{label.index} exceeds universe {nvars}")
                seen_vars.add(label.index)
            elif isinstance(label, FieldValue):
                if label.spec != spec:
                    raise MixedFields("edge constant from a different field")
            else:
                raise FormatError(f"bad edge label {label!r}")
            cleaned.append((u, v, label))
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "layers", 1 + max(verts.values()) - min(verts.values()))
        object.__setattr__(self, "vertices", dict(verts))
        object.__setattr__(self, "edges", tuple(cleaned))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "sink", sink)

    def __setattr__(self, name, value):
        raise AttributeError("ABP is immutable")

    def path_polynomial(self) -> Polynomial:
        """Sum over source-to-sink paths of the product of edge labels."""
        spec, nvars = self.spec, self.nvars
        out_edges: dict[int, list[tuple[int, Entry]]] = {}
        for u, v, label in self.edges:
            out_edges.setdefault(u, []).append((v, label))
        memo: dict[int, Polynomial] = {self.sink: Polynomial.constant(spec.one(), nvars)}

        def walk(v: int) -> Polynomial:
            hit = memo.get(v)
            if hit is not None:
                return hit
            total = Polynomial.zero(spec, nvars)
            for w, label in out_edges.get(v, ()):
                piece = walk(w)
                if isinstance(label, Var):
                    piece = piece * Polynomial.variable(label.index, nvars, spec)
                else:
                    piece = piece.scale(label)
                total = total + piece
            memo[v] = total
            return total

        return walk(self.source)

    # -- JSON -------------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "field": self.spec.name(),
            "nvars": self.nvars,
            "layers": self.layers,
            "vertices": [
                {"id": v, "layer": l} for v, l in sorted(self.vertices.items())
            ],
            "edges": [
                {
                    "from": u,
                    "to": v,
                    "label": {"var": e.index} if isinstance(e, Var) else {"const": e.text()},
                }
                for u, v, e in self.edges
            ],
            "source": self.source,
            "sink": self.sink,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @staticmethod
    def from_json_obj(obj: dict) -> "ABP":
        try:
            spec = FieldSpec.from_name(obj.get("field", "Q"))
            vertices = {v["id"]: v["layer"] for v in obj["vertices"]}
            edges = []
            maxvar = 0
            for e in obj["edges"]:
                label = e["label"]
                if "var" in label:
                    ent: Entry = Var(label["var"])
                    maxvar = max(maxvar, label["var"])
                else:
                    ent = spec.parse(label["const"])
                edges.append((e["from"], e["to"], ent))
            nvars = obj.get("nvars", maxvar)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad ABP JSON: {exc}") from None
        return ABP(spec, nvars, vertices, edges, obj["source"], obj["sink"])

    @staticmethod
    def from_json(text: str) -> "ABP":
        return ABP.from_json_obj(json.loads(text))


def abp_to_read_once(program: ABP) -> SymbolicMatrix:
    """Read-once matrix whose determinant is the ABP's path polynomial.

    Uses the edge-adjacency construction: unit diagonal on every vertex
    except source and sink, plus a sink-to-source back edge.  In a layered
    program all source-sink paths share one length L, so weighting the back
    edge by (-1)^L makes the determinant equal the path polynomial exactly
    (self-checked).
    """
    spec = program.spec
    order = sorted(program.vertices, key=lambda v: (program.vertices[v], v))
    idx = {v: i for i, v in enumerate(order)}
    size = len(order)
    if size > 18:
        raise TooLarge(f"ABP with {size} vertices exceeds the conversion cap")
    z = spec.zero()
    one = spec.one()
    grid: list[list[Entry]] = [[z] * size for _ in range(size)]
    for v in order:
        if v not in (program.source, program.sink):
            grid[idx[v]][idx[v]] = one
    for u, v, label in program.edges:
        grid[idx[u]][idx[v]] = label
    span = program.vertices[program.sink] - program.vertices[program.source]
    back = one if span % 2 == 0 else spec.from_int(-1)
    grid[idx[program.sink]][idx[program.source]] = back
    result = SymbolicMatrix(spec, program.nvars, grid)
    if not result.verify_read_k(1):
        raise SelfCheckFailed("conversion produced a repeated variable")
    if symbolic_det(result) != program.path_polynomial():
        raise SelfCheckFailed("conversion changed the path polynomial")
    return result

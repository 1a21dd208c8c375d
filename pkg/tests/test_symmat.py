import random

import pytest

from readkdet.errors import (
    AsymmetricDrop,
    BudgetExceeded,
    FieldTooSmall,
    IncompleteAssignment,
    IndexOutOfRange,
    MixedFields,
    NotSquare,
    TooLarge,
)
from readkdet.field import EISENSTEIN, RATIONALS, prime_field
from readkdet.poly import elementary_symmetric, parse_polynomial
from readkdet.symmat import (
    AffineForm,
    AffineMatrix,
    SymbolicMatrix,
    Var,
    det_eval,
    equal_det_probabilistic,
    load_matrix_json,
    minmax_rank,
    symbolic_det,
    symbolic_perm,
)

from helpers import random_read_k_matrix, random_value

Q = RATIONALS
F101 = prime_field(101)


def bordered_s32(spec=Q):
    return SymbolicMatrix.build(
        spec, 3,
        [[Var(1), 0, 0, -1], [0, Var(2), 0, -1], [0, 0, Var(3), -1], [1, 1, 1, 0]],
    )


def test_read_multiplicity_audit():
    m = SymbolicMatrix.build(Q, 1, [[Var(1), Var(1)], [1, 2]])
    assert not m.verify_read_k(1)
    assert m.verify_read_k(2)
    assert m.read_multiplicity(1) == 2
    const = SymbolicMatrix.build(Q, 0, [[1, 2], [3, 4]])
    assert const.verify_read_k(1)


def test_symbolic_det_examples():
    assert symbolic_det(SymbolicMatrix.diagonal(Q, 2, [Var(1), Var(2)])).text() == "x1*x2"
    assert symbolic_det(bordered_s32()) == elementary_symmetric(3, 2, Q)
    twice = SymbolicMatrix.build(Q, 1, [[Var(1), 1], [1, Var(1)]])
    assert symbolic_det(twice).text() == "x1^2 - 1"


def test_symbolic_det_size_zero_and_cap():
    assert symbolic_det(SymbolicMatrix(Q, 0, [])).text() == "1"
    big = SymbolicMatrix.diagonal(Q, 0, [Q.one()] * 23)
    with pytest.raises(TooLarge):
        symbolic_det(big)


def test_det_eval_examples():
    m = SymbolicMatrix.diagonal(Q, 2, [Var(1), Var(2)])
    assert det_eval(m, {1: Q.from_int(2), 2: Q.from_int(3)}) == Q.from_int(6)
    ones = {i: Q.one() for i in (1, 2, 3)}
    assert det_eval(bordered_s32(), ones) == Q.from_int(3)
    singular = SymbolicMatrix.build(Q, 0, [[1, 1], [1, 1]])
    assert det_eval(singular, {}) == Q.zero()
    with pytest.raises(IncompleteAssignment):
        det_eval(m, {1: Q.one()})


def test_det_eval_agrees_with_symbolic():
    rng = random.Random(6)
    for spec in (Q, F101, EISENSTEIN):
        for _ in range(20):
            size = rng.randint(1, 5)
            m = random_read_k_matrix(rng, spec, size, rng.randint(1, 3), 2)
            point = {v: random_value(spec, rng) for v in range(1, m.nvars + 1)}
            assert det_eval(m, point) == symbolic_det(m).evaluate(point)


def test_row_multilinearity():
    rng = random.Random(7)
    for _ in range(20):
        size = rng.randint(2, 5)
        m = random_read_k_matrix(rng, F101, size, 2, 1)
        row_a = [random_value(F101, rng) for _ in range(size)]
        row_b = [random_value(F101, rng) for _ in range(size)]
        alpha, beta = random_value(F101, rng), random_value(F101, rng)
        combined = [alpha * a + beta * b for a, b in zip(row_a, row_b)]
        i = rng.randrange(size)

        def with_row(row):
            rows = [list(r) for r in m.entries]
            rows[i] = row
            return SymbolicMatrix(F101, m.nvars, rows)

        point = {v: random_value(F101, rng) for v in range(1, 3)}
        lhs = det_eval(with_row(combined), point)
        rhs = alpha * det_eval(with_row(row_a), point) + beta * det_eval(with_row(row_b), point)
        assert lhs == rhs


def test_permutation_changes_sign():
    m = bordered_s32()
    swapped = m.permuted([1, 0, 2, 3], [0, 1, 2, 3])
    assert symbolic_det(swapped) == symbolic_det(m).scale(Q.from_int(-1))
    rotated = m.permuted([0, 1, 2, 3], [1, 2, 0, 3])  # even cycle of 3 columns
    assert symbolic_det(rotated) == symbolic_det(m)


def test_minor_examples():
    d3 = SymbolicMatrix.diagonal(Q, 3, [Var(1), Var(2), Var(3)])
    assert d3.minor({1}, {1}) == SymbolicMatrix.diagonal(Q, 3, [Var(2), Var(3)])
    assert d3.minor(set(), set()) == d3
    sub = bordered_s32().minor({1, 2}, {1, 2})
    assert sub == SymbolicMatrix.build(Q, 3, [[Var(3), -1], [1, 0]])
    with pytest.raises(AsymmetricDrop):
        d3.minor({1}, set())
    with pytest.raises(IndexOutOfRange):
        d3.minor({4}, {1})


def test_minor_never_raises_multiplicity():
    rng = random.Random(8)
    for _ in range(20):
        m = random_read_k_matrix(rng, Q, 4, 3, 2)
        drops = set(rng.sample(range(1, 5), 2))
        sub = m.minor(drops, set(rng.sample(range(1, 5), 2)))
        for v in range(1, 4):
            assert sub.read_multiplicity(v) <= m.read_multiplicity(v)


def test_minmax_rank_examples():
    f3 = prime_field(3)
    assert minmax_rank(SymbolicMatrix(f3, 1, [[Var(1)]]), 3) == (0, 1)
    eye = SymbolicMatrix.build(Q, 0, [[1, 0], [0, 1]])
    assert minmax_rank(eye, 2) == (2, 2)
    f2 = prime_field(2)
    m = SymbolicMatrix.build(f2, 2, [[Var(1), 1], [1, Var(2)]])
    assert minmax_rank(m, 2) == (1, 2)


def test_minmax_rank_minor_bound():
    rng = random.Random(9)
    f3 = prime_field(3)
    for _ in range(12):
        size = rng.randint(2, 4)
        m = random_read_k_matrix(rng, f3, size, rng.randint(1, 3), 1)
        lo, hi = minmax_rank(m, 3)
        assert 0 <= lo <= hi <= size
        i = rng.randint(1, size)
        j = rng.randint(1, size)
        lo2, hi2 = minmax_rank(m.minor({i}, {j}), 3)
        assert lo - 2 <= lo2 <= lo


def test_minmax_rank_budget():
    f5 = prime_field(5)
    m = SymbolicMatrix.diagonal(f5, 12, [Var(i) for i in range(1, 13)])
    with pytest.raises(BudgetExceeded):
        minmax_rank(m, 5)
    with pytest.raises(MixedFields):
        minmax_rank(SymbolicMatrix(f5, 1, [[Var(1)]]), 3)


def test_equal_det_probabilistic():
    m = SymbolicMatrix.diagonal(Q, 2, [Var(1), Var(2)])
    assert equal_det_probabilistic(m, m).agree
    tri = SymbolicMatrix.build(Q, 2, [[Var(1), 1], [0, Var(2)]])
    probe = equal_det_probabilistic(m, tri)
    assert probe.agree
    assert symbolic_det(m) == symbolic_det(tri)
    other = SymbolicMatrix.build(Q, 2, [[Var(1), 0], [0, Var(1)]])
    probe = equal_det_probabilistic(m, other, seed=3)
    assert not probe.agree
    assert probe.witness is not None
    assert det_eval(m, probe.witness) != det_eval(other, probe.witness)


def test_equal_det_needs_large_field():
    f3 = prime_field(3)
    m = SymbolicMatrix.diagonal(f3, 1, [Var(1)])
    with pytest.raises(FieldTooSmall):
        equal_det_probabilistic(m, m)


def test_symbolic_perm_vs_det_on_diagonal():
    m = SymbolicMatrix.diagonal(Q, 3, [Var(1), Var(2), Var(3)])
    assert symbolic_perm(m) == symbolic_det(m)
    grid = SymbolicMatrix.build(Q, 2, [[Var(1), 1], [1, Var(2)]])
    assert symbolic_perm(grid) == parse_polynomial("x1*x2 + 1", Q, nvars=2)


def test_json_round_trip_bit_exact():
    rng = random.Random(10)
    for spec in (Q, prime_field(13), EISENSTEIN):
        for _ in range(10):
            m = random_read_k_matrix(rng, spec, rng.randint(1, 4), 2, 2)
            again = SymbolicMatrix.from_json(m.to_json())
            assert again == m
            assert again.to_json() == m.to_json()


def test_affine_json_round_trip():
    spec = Q
    form = AffineForm(spec, spec.from_int(2), {1: spec.from_fraction(1, 3)})
    a = AffineMatrix(spec, 1, [[form]])
    again = load_matrix_json(a.to_json())
    assert isinstance(again, AffineMatrix)
    assert again == a
    assert again.to_json() == a.to_json()


def test_grid_must_be_square():
    with pytest.raises(NotSquare):
        SymbolicMatrix.build(Q, 1, [[1, 2], [3]])

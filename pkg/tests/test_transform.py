import random

import pytest

from readkdet.errors import (
    FormatError,
    NotOccurrenceOne,
    NotReadOnce,
    ReadBoundViolated,
    ZeroDeterminant,
)
from readkdet.field import RATIONALS, prime_field
from readkdet.poly import elementary_symmetric, parse_polynomial
from readkdet.symmat import SymbolicMatrix, Var, symbolic_det
from readkdet.transform import (
    ABP,
    abp_to_read_once,
    block_product,
    compress_read_once,
    derivative_minor,
    reduce_to_affine,
    substitute_matrix,
)

from helpers import (
    enumerate_path_polynomial,
    random_abp,
    random_read_k_matrix,
    random_read_once_matrix,
    random_value,
)

Q = RATIONALS
F101 = prime_field(101)


def bordered(spec, n):
    grid = [[spec.zero()] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        grid[i][i] = Var(i + 1)
        grid[i][n] = spec.from_int(-1)
        grid[n][i] = spec.one()
    return SymbolicMatrix(spec, n, grid)


def test_substitute_examples():
    d = SymbolicMatrix.diagonal(Q, 2, [Var(1), Var(2)])
    sub = substitute_matrix(d, {1: Q.from_int(5)})
    assert symbolic_det(sub).text() == "5*x2"
    assert substitute_matrix(d, {}) == d
    m = bordered(Q, 3)
    sub = substitute_matrix(m, {3: Q.zero()})
    assert symbolic_det(sub) == elementary_symmetric(3, 2, Q).substitute({3: Q.zero()})


def test_substitution_commutes_with_det():
    rng = random.Random(11)
    for _ in range(40):
        m = random_read_once_matrix(rng, F101, rng.randint(2, 5), 3)
        assignment = {v: random_value(F101, rng) for v in range(1, 3) if rng.random() < 0.7}
        assert symbolic_det(substitute_matrix(m, assignment)) == \
            symbolic_det(m).substitute(assignment)


def test_derivative_minor_examples():
    d = SymbolicMatrix.diagonal(Q, 2, [Var(1), Var(2)])
    assert symbolic_det(derivative_minor(d, [1])).text() == "x2"
    shared = SymbolicMatrix.build(Q, 2, [[Var(1), Var(2)], [1, 1]])
    assert derivative_minor(shared, [1, 2]) is None
    m = bordered(Q, 3)
    assert symbolic_det(derivative_minor(m, [1])) == parse_polynomial("x2 + x3", Q, nvars=3)
    assert derivative_minor(m, [1, 2, 3]) is not None  # distinct rows and columns


def test_derivative_minor_absent_variable_is_zero():
    d = SymbolicMatrix.diagonal(Q, 3, [Var(1), Var(2), Q.one()])
    assert derivative_minor(d, [3]) is None


def test_derivative_minor_sign_fix():
    m = SymbolicMatrix.build(Q, 2, [[0, Var(1)], [Var(2), 0]])
    sub = derivative_minor(m, [1])
    assert symbolic_det(sub) == symbolic_det(m).derivative([1])  # -x2
    both = derivative_minor(m, [1, 2])
    assert symbolic_det(both) == symbolic_det(m).derivative([1, 2])  # -1


def test_derivative_minor_requires_read_once():
    twice = SymbolicMatrix.build(Q, 1, [[Var(1), Var(1)], [1, 1]])
    with pytest.raises(NotReadOnce):
        derivative_minor(twice, [1])


def test_derivative_minor_randomized():
    rng = random.Random(12)
    for spec in (Q, F101):
        for _ in range(40):
            m = random_read_once_matrix(rng, spec, rng.randint(2, 5), 4)
            det = symbolic_det(m)
            subsets = [[1], [2], [3], [4], [1, 2], [2, 3], [1, 4], [3, 4]]
            s = subsets[rng.randrange(len(subsets))]
            minor = derivative_minor(m, s)
            expected = det.derivative(s)
            if minor is None:
                assert expected.is_zero()
            else:
                assert symbolic_det(minor) == expected


def test_block_product_examples():
    d1 = SymbolicMatrix.diagonal(Q, 1, [Var(1)])
    d2 = SymbolicMatrix.diagonal(Q, 2, [Var(2)])
    joined = block_product(d1, d2)
    assert symbolic_det(joined).text() == "x1*x2"
    padded = block_product(bordered(Q, 2), SymbolicMatrix.build(Q, 2, [[1]]))
    assert symbolic_det(padded) == symbolic_det(bordered(Q, 2))
    with_var = block_product(bordered(Q, 2), SymbolicMatrix.diagonal(Q, 3, [Var(3)]))
    assert symbolic_det(with_var) == parse_polynomial("x1*x3 + x2*x3", Q, nvars=3)


def test_block_product_multiplies_determinants():
    rng = random.Random(13)
    for _ in range(30):
        a = random_read_k_matrix(rng, F101, rng.randint(1, 4), 2, 2)
        b = random_read_k_matrix(rng, F101, rng.randint(1, 4), 2, 2)
        assert symbolic_det(block_product(a, b)) == symbolic_det(a) * symbolic_det(b)


def test_reduce_to_affine_examples():
    d = SymbolicMatrix.diagonal(Q, 2, [Var(1), Var(2)])
    out = reduce_to_affine(d, 1)
    assert out.size == 2
    assert symbolic_det(out).text() == "x1*x2"

    m = SymbolicMatrix.build(Q, 2, [[Var(1), 0, 1], [0, Var(2), 1], [1, 1, 1]])
    out = reduce_to_affine(m, 1)
    assert out.size == 2
    assert symbolic_det(out) == parse_polynomial("x1*x2 - x1 - x2", Q, nvars=2)

    twice = SymbolicMatrix.build(Q, 1, [[Var(1), 1], [1, Var(1)]])
    out = reduce_to_affine(twice, 2)
    assert out.size == 2
    assert symbolic_det(out).text() == "x1^2 - 1"


def test_reduce_to_affine_zero_determinant():
    z = SymbolicMatrix.build(Q, 1, [[Var(1), Var(1) if False else Q.zero()], [0, 0]])
    out = reduce_to_affine(z, 1)
    assert out.size == 1
    assert symbolic_det(out).is_zero()


def test_reduce_to_affine_read_bound():
    twice = SymbolicMatrix.build(Q, 1, [[Var(1), 1], [1, Var(1)]])
    with pytest.raises(ReadBoundViolated):
        reduce_to_affine(twice, 1)


def test_reduce_to_affine_randomized():
    rng = random.Random(14)
    for trial in range(60):
        spec = Q if trial % 2 else F101
        k = 1 + trial % 2
        m = random_read_k_matrix(rng, spec, rng.randint(2, 7), rng.randint(1, 4), k)
        out = reduce_to_affine(m, k)
        det = symbolic_det(m)
        assert symbolic_det(out) == det
        if not det.is_zero():
            assert out.size <= max(1, k * len(m.occurring_variables()))


def test_compress_passthrough_within_bound():
    m = bordered(Q, 3)  # size 4 <= 9
    assert compress_read_once(m) is m


def test_compress_padded_example():
    pad = SymbolicMatrix.diagonal(Q, 2, [Q.one()] * 7)
    big = block_product(bordered(Q, 2), pad)
    assert big.size == 10
    out = compress_read_once(big)
    assert out.size <= 6
    assert out.verify_read_k(1)
    assert symbolic_det(out) == parse_polynomial("x1 + x2", Q, nvars=2)


def test_compress_single_variable():
    m = SymbolicMatrix.diagonal(Q, 1, [Var(1), Q.one(), Q.one(), Q.one(), Q.one()])
    out = compress_read_once(m)
    assert out.size <= 3
    assert symbolic_det(out).text() == "x1"


def test_compress_rejects_zero_and_read_two():
    z = SymbolicMatrix.build(Q, 1, [[Var(1), 0], [0, 0]])
    with pytest.raises(ZeroDeterminant):
        compress_read_once(z)
    twice = SymbolicMatrix.build(Q, 1, [[Var(1), 1], [1, Var(1)]])
    with pytest.raises(NotReadOnce):
        compress_read_once(twice)


def test_compress_randomized():
    rng = random.Random(15)
    done = 0
    while done < 40:
        spec = Q if done % 2 else F101
        nv = rng.randint(1, 3)
        m = random_read_once_matrix(rng, spec, rng.randint(nv + 1, 9), nv)
        if symbolic_det(m).is_zero():
            continue
        out = compress_read_once(m)
        assert out.verify_read_k(1)
        assert out.size <= 3 * len(m.occurring_variables())
        assert symbolic_det(out) == symbolic_det(m)
        done += 1


def test_abp_examples():
    single = ABP(Q, 1, {0: 0, 1: 1}, [(0, 1, Var(1))], 0, 1)
    assert symbolic_det(abp_to_read_once(single)).text() == "x1"

    path = ABP(Q, 2, {0: 0, 1: 1, 2: 2}, [(0, 1, Var(1)), (1, 2, Var(2))], 0, 2)
    assert symbolic_det(abp_to_read_once(path)).text() == "x1*x2"

    two = ABP(
        Q, 4,
        {0: 0, 1: 1, 2: 1, 3: 2},
        [(0, 1, Var(1)), (1, 3, Var(2)), (0, 2, Var(3)), (2, 3, Var(4))],
        0, 3,
    )
    m = abp_to_read_once(two)
    assert m.verify_read_k(1)
    assert symbolic_det(m) == enumerate_path_polynomial(two)


def test_abp_validation():
    with pytest.raises(NotOccurrenceOne):
        ABP(Q, 1, {0: 0, 1: 1, 2: 2}, [(0, 1, Var(1)), (1, 2, Var(1))], 0, 2)
    with pytest.raises(FormatError):
        ABP(Q, 1, {0: 0, 1: 2}, [(0, 1, Var(1))], 0, 1)  # skips a layer
    with pytest.raises(FormatError):
        ABP(Q, 1, {0: 0}, [], 0, 0)  # source equals sink


def test_abp_randomized_against_path_enumeration():
    rng = random.Random(16)
    for _ in range(40):
        spec = Q if rng.random() < 0.5 else F101
        program = random_abp(rng, spec)
        m = abp_to_read_once(program)
        assert m.verify_read_k(1)
        assert symbolic_det(m) == enumerate_path_polynomial(program)


def test_abp_json_round_trip():
    rng = random.Random(17)
    program = random_abp(rng, Q)
    again = ABP.from_json(program.to_json())
    assert again.to_json() == program.to_json()
    assert enumerate_path_polynomial(again) == enumerate_path_polynomial(program)

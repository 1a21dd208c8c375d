import random

import pytest

from readkdet.errors import DivisionByZero, MixedFields, NotPrime, TooLarge
from readkdet.field import (
    EISENSTEIN,
    RATIONALS,
    FieldSpec,
    is_prime,
    prime_field,
    solve_unit_quadratic,
    sqrt_neg3,
)

from helpers import random_value

Q = RATIONALS
W = EISENSTEIN


def test_rational_addition():
    assert (Q.from_fraction(1, 2) + Q.from_fraction(1, 3)).text() == "5/6"


def test_prime_field_multiplication():
    f3 = prime_field(3)
    assert (f3.from_int(2) * f3.from_int(2)) == f3.from_int(1)


def test_omega_square_is_omega_minus_one():
    w = W.omega()
    assert w * w == W.omega() - W.one()
    assert (w * w).text() == "-1+1*w"


def test_omega_matches_unit_quadratic():
    w = W.omega()
    # w is a root of r^2 - r + 1
    assert w * w - w + W.one() == W.zero()


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        Q.one() / Q.zero()


def test_mixed_fields_rejected():
    with pytest.raises(MixedFields):
        Q.one() + prime_field(5).one()


def test_field_axioms_randomized():
    rng = random.Random(0)
    for spec in (Q, prime_field(101), W):
        for _ in range(80):
            a, b, c = (random_value(spec, rng, -9, 9) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert (a * b) * c == a * (b * c)
            assert a + spec.zero() == a
            assert a * spec.one() == a
            if not b.is_zero():
                assert (a * b) / b == a


def test_conjugation_fixes_rationals_and_squares_to_identity():
    rng = random.Random(1)
    for _ in range(40):
        v = random_value(W, rng, -9, 9)
        assert v.conjugate().conjugate() == v
        plain = W.from_fraction(rng.randint(-9, 9), rng.randint(1, 9))
        assert plain.conjugate() == plain


def test_value_text_round_trip():
    rng = random.Random(2)
    for spec in (Q, prime_field(7), W):
        for _ in range(60):
            v = random_value(spec, rng, -20, 20)
            if spec is Q and rng.random() < 0.5:
                v = v / spec.from_int(rng.randint(1, 9))
            assert spec.parse(v.text()) == v


def test_field_name_round_trip():
    for spec in (Q, W, prime_field(31)):
        assert FieldSpec.from_name(spec.name()) == spec


def test_not_prime_rejected():
    with pytest.raises(NotPrime):
        prime_field(21)
    with pytest.raises(TooLarge):
        prime_field(2**31 + 11)


def test_is_prime_spot_checks():
    assert is_prime(2) and is_prime(3) and is_prime(101) and is_prime(2**31 - 1)
    assert not is_prime(1) and not is_prime(561) and not is_prime(2**31 - 2)


def test_sqrt_neg3_examples():
    assert sqrt_neg3(7) == 2  # 2*2 = 4 = -3 mod 7
    assert sqrt_neg3(5) is None
    assert sqrt_neg3(3) == 0


def test_solve_unit_quadratic_examples():
    assert solve_unit_quadratic(3) == 2
    assert solve_unit_quadratic(7) == 3
    assert solve_unit_quadratic(5) is None
    assert solve_unit_quadratic(2) is None


def test_number_theory_rejects_composites():
    with pytest.raises(NotPrime):
        sqrt_neg3(15)
    with pytest.raises(NotPrime):
        solve_unit_quadratic(9)


def test_root_existence_matches_mod3_rule():
    # for 3 < p: a root of r^2 - r + 1 exists iff -3 is a square iff p = 1 mod 3
    p = 3
    while p < 2000:
        p += 2
        if not is_prime(p):
            continue
        has_unit = solve_unit_quadratic(p) is not None
        has_sqrt = sqrt_neg3(p) is not None
        assert has_unit == has_sqrt == (p % 3 == 1), p


def test_large_prime_uses_modular_square_root():
    p = 1000003  # above the scan threshold
    assert is_prime(p)
    y = sqrt_neg3(p)
    if p % 3 == 1:
        assert y is not None and (y * y + 3) % p == 0
    else:
        assert y is None
    r = solve_unit_quadratic(p)
    if p % 3 == 1:
        assert r is not None and (r * r - r + 1) % p == 0
    else:
        assert r is None


def test_solutions_are_smallest():
    for p in (7, 13, 19, 31, 103):
        r = solve_unit_quadratic(p)
        assert r == min(x for x in range(p) if (x * x - x + 1) % p == 0)
        y = sqrt_neg3(p)
        assert y == min(x for x in range(p) if (x * x + 3) % p == 0)

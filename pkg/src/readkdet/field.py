"""Exact arithmetic over the three supported coefficient fields.

Supported domains:

* ``Q``  — the rationals, stored as reduced fractions of arbitrary-precision
  integers.
* ``Fp`` — a prime field with modulus p < 2**31, stored as residues in [0, p).
* ``Qw`` — the quadratic extension Q(w) with w**2 = w - 1.  The generator w
  behaves exactly like the complex number (1 + sqrt(3)*i)/2, a primitive
  sixth root of unity, so complex witnesses can be checked without floats.

All values are immutable and every operation is pure, so values may be freely
shared between threads.

Besides the field types this module provides the number-theoretic helpers
used by the field classification of the degree-two symmetric witness:
``sqrt_neg3`` (square roots of -3 mod p) and ``solve_unit_quadratic``
(roots of r**2 - r + 1 mod p).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, FormatError, MixedFields, NotPrime, TooLarge

_MAX_PRIME = 2**31

# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact for n < 2**64)."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == q:
            return True
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Identifies one of the supported coefficient fields.

    ``tag`` is ``"Q"``, ``"Fp"`` or ``"Qw"``; ``p`` is the modulus for
    ``"Fp"`` and None otherwise.
    """

    tag: str
    p: int | None = None

    def __post_init__(self):
        if self.tag in ("Q", "Qw"):
            if self.p is not None:
                raise FormatError(f"{self.tag} takes no modulus")
        elif self.tag == "Fp":
            if self.p is None:
                raise FormatError("Fp needs a modulus")
            if self.p >= _MAX_PRIME:
                raise TooLarge(f"modulus must stay below 2**31, got {self.p}")
            if not is_prime(self.p):
                raise NotPrime(f"{self.p} is not prime")
        else:
            raise FormatError(f"unknown field tag {self.tag!r}")

    # -- construction ------------------------------------------------------

    def zero(self) -> "FieldValue":
        return self.from_int(0)

    def one(self) -> "FieldValue":
        return self.from_int(1)

    def from_int(self, n: int) -> "FieldValue":
        if self.tag == "Q":
            return FieldValue(self, Fraction(n))
        if self.tag == "Fp":
            return FieldValue(self, n % self.p)
        return FieldValue(self, (Fraction(n), Fraction(0)))

    def from_fraction(self, num: int, den: int = 1) -> "FieldValue":
        if self.tag == "Q":
            return FieldValue(self, Fraction(num, den))
        if self.tag == "Fp":
            if den % self.p == 0:
                raise DivisionByZero(f"denominator {den} vanishes mod {self.p}")
            return FieldValue(self, num * pow(den, -1, self.p) % self.p)
        return FieldValue(self, (Fraction(num, den), Fraction(0)))

    def omega(self) -> "FieldValue":
        """The generator w of Q(w); only defined for the Qw field."""
        if self.tag != "Qw":
            raise MixedFields("omega only exists in Qw")
        return FieldValue(self, (Fraction(0), Fraction(1)))

    def eisenstein(self, a, b) -> "FieldValue":
        """Build a + b*w over Qw from ints or Fractions."""
        if self.tag != "Qw":
            raise MixedFields("eisenstein values only exist in Qw")
        return FieldValue(self, (Fraction(a), Fraction(b)))

    # -- text encoding -----------------------------------------------------

    def name(self) -> str:
        """Stable text name: "Q", "Fp:<p>" or "Qw"."""
        return f"Fp:{self.p}" if self.tag == "Fp" else self.tag

    @staticmethod
    def from_name(name: str) -> "FieldSpec":
        if name == "Q":
            return RATIONALS
        if name == "Qw":
            return EISENSTEIN
        if name.startswith("Fp:"):
            try:
                p = int(name[3:])
            except ValueError:
                raise FormatError(f"bad field name {name!r}") from None
            return FieldSpec("Fp", p)
        raise FormatError(f"bad field name {name!r}")

    def parse(self, text: str) -> "FieldValue":
        """Parse the canonical scalar text produced by FieldValue.text()."""
        text = text.strip()
        if self.tag == "Qw":
            return _parse_qw(self, text)
        try:
            if "/" in text:
                num, den = text.split("/")
                return self.from_fraction(int(num), int(den))
            return self.from_int(int(text))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad scalar text {text!r}") from None


def _parse_qw(spec: FieldSpec, text: str) -> "FieldValue":
    body = text[1:-1].strip() if text.startswith("(") and text.endswith(")") else text
    if "w" not in body:
        try:
            return spec.eisenstein(Fraction(body), 0)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad Qw scalar {text!r}") from None
    # split "a+b*w" / "a-b*w" at the sign introducing the w part
    try:
        head, _, wpart = body.rpartition("*w") if "*w" in body else (body[:-1], "", "")
        # head now holds "a+b" or "a-b"; find the splitting sign (skip index 0)
        for i in range(len(head) - 1, 0, -1):
            if head[i] in "+-" and head[i - 1] not in "+-/*":
                a, b = head[:i], head[i:]
                break
        else:
            a, b = "0", head  # pure "b*w"
        bfrac = Fraction(1) if b in ("+", "") else (Fraction(-1) if b == "-" else Fraction(b))
        return spec.eisenstein(Fraction(a), bfrac)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad Qw scalar {text!r}") from None


RATIONALS = FieldSpec("Q")
EISENSTEIN = FieldSpec("Qw")


def prime_field(p: int) -> FieldSpec:
    return FieldSpec("Fp", p)


class FieldValue:
    """One exact field element, bound to its FieldSpec.

    Payload by field: a Fraction over Q, an int residue over Fp, and a pair
    (a, b) of Fractions meaning a + b*w over Qw.
    """

    __slots__ = ("spec", "payload")

    def __init__(self, spec: FieldSpec, payload):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "payload", payload)

    def __setattr__(self, name, value):
        raise AttributeError("FieldValue is immutable")

    def _check(self, other: "FieldValue"):
        if not isinstance(other, FieldValue):
            raise TypeError(f"expected FieldValue, got {type(other).__name__}")
        if self.spec != other.spec:
            raise MixedFields(f"{self.spec.name()} vs {other.spec.name()}")

    def is_zero(self) -> bool:
        if self.spec.tag == "Qw":
            return self.payload == (0, 0)
        return self.payload == 0

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        self._check(other)
        k = kernel(self.spec)
        return FieldValue(self.spec, k.add(self.payload, other.payload))

    def __sub__(self, other):
        self._check(other)
        k = kernel(self.spec)
        return FieldValue(self.spec, k.sub(self.payload, other.payload))

    def __mul__(self, other):
        self._check(other)
        k = kernel(self.spec)
        return FieldValue(self.spec, k.mul(self.payload, other.payload))

    def __truediv__(self, other):
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("division by zero field element")
        k = kernel(self.spec)
        return FieldValue(self.spec, k.div(self.payload, other.payload))

    def __neg__(self):
        k = kernel(self.spec)
        return FieldValue(self.spec, k.neg(self.payload))

    def inverse(self) -> "FieldValue":
        return self.spec.one() / self

    def conjugate(self) -> "FieldValue":
        """Qw conjugation a + b*w -> (a+b) - b*w; identity on Q and Fp."""
        if self.spec.tag != "Qw":
            return self
        a, b = self.payload
        return FieldValue(self.spec, (a + b, -b))

    def __eq__(self, other):
        if not isinstance(other, FieldValue):
            return NotImplemented
        return self.spec == other.spec and self.payload == other.payload

    def __hash__(self):
        return hash((self.spec, self.payload))

    def text(self) -> str:
        """Canonical scalar text; FieldSpec.parse inverts it bit-exactly."""
        if self.spec.tag == "Fp":
            return str(self.payload)
        if self.spec.tag == "Q":
            return _frac_text(self.payload)
        a, b = self.payload
        if b == 0:
            return _frac_text(a)
        sign = "+" if b >= 0 else "-"
        return f"{_frac_text(a)}{sign}{_frac_text(abs(b))}*w"

    def __repr__(self):
        return f"FieldValue({self.spec.name()}, {self.text()})"


def _frac_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


class _Kernel:
    """Raw payload arithmetic for hot loops (no FieldValue allocation)."""

    __slots__ = ("spec", "zero", "one", "add", "sub", "mul", "neg", "div", "is_zero")

    def __init__(self, spec, zero, one, add, sub, mul, neg, div, is_zero):
        self.spec = spec
        self.zero = zero
        self.one = one
        self.add = add
        self.sub = sub
        self.mul = mul
        self.neg = neg
        self.div = div
        self.is_zero = is_zero


_KERNELS: dict[FieldSpec, _Kernel] = {}


def kernel(spec: FieldSpec) -> _Kernel:
    """Return the raw-payload arithmetic kernel for a field.

    Payloads over Q may be plain ints (kept as ints for speed) or Fractions;
    division always promotes to Fraction.  Over Fp payloads are reduced ints.
    Over Qw payloads are (a, b) pairs of ints/Fractions.
    """
    k = _KERNELS.get(spec)
    if k is not None:
        return k
    if spec.tag == "Q":
        k = _Kernel(
            spec, 0, 1,
            lambda a, b: a + b,
            lambda a, b: a - b,
            lambda a, b: a * b,
            lambda a: -a,
            lambda a, b: Fraction(a) / Fraction(b),
            lambda a: a == 0,
        )
    elif spec.tag == "Fp":
        p = spec.p
        k = _Kernel(
            spec, 0, 1 % p,
            lambda a, b: (a + b) % p,
            lambda a, b: (a - b) % p,
            lambda a, b: (a * b) % p,
            lambda a: -a % p,
            lambda a, b: a * pow(b, p - 2, p) % p,
            lambda a: a == 0,
        )
    else:
        def qw_mul(x, y):
            a, b = x
            c, d = y
            bd = b * d
            return (a * c - bd, a * d + b * c + bd)

        def qw_div(x, y):
            c, d = y
            n = Fraction(c * c + c * d + d * d)
            a, b = qw_mul(x, (c + d, -d))  # multiply by the conjugate of y
            return (a / n, b / n)

        k = _Kernel(
            spec, (0, 0), (1, 0),
            lambda x, y: (x[0] + y[0], x[1] + y[1]),
            lambda x, y: (x[0] - y[0], x[1] - y[1]),
            qw_mul,
            lambda x: (-x[0], -x[1]),
            qw_div,
            lambda x: x[0] == 0 and x[1] == 0,
        )
    _KERNELS[spec] = k
    return k


def _require_prime(p: int):
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


def sqrt_neg3(p: int) -> int | None:
    """Smallest y with y*y = -3 (mod p), or None if -3 is a non-residue.

    Scans residues for p below 10**6 and falls back to Tonelli-Shanks above.
    """
    _require_prime(p)
    a = -3 % p
    if p < 10**6:
        # roots pair up as {y, p - y}, so the smaller one is <= p // 2
        for y in range(p // 2 + 1):
            if (y * y - a) % p == 0:
                return y
        return None
    y = _tonelli_shanks(a, p)
    return None if y is None else min(y, p - y)


def _tonelli_shanks(a: int, p: int) -> int | None:
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return r


def solve_unit_quadratic(p: int) -> int | None:
    """Smallest residue r with r*r - r + 1 = 0 (mod p), or None.

    Such an r exists exactly when -3 is a square mod p (the discriminant of
    the quadratic is -3); equivalently, for p > 3, when p = 1 (mod 3).
    """
    _require_prime(p)
    if p < 10**6:
        for r in range(p):
            if (r * r - r + 1) % p == 0:
                return r
        return None
    if p == 2:
        return None
    y = _tonelli_shanks(-3 % p, p)
    if y is None:
        return None
    inv2 = pow(2, -1, p)
    return min((1 + y) * inv2 % p, (1 - y) * inv2 % p)

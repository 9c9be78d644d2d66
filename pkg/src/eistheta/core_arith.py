"""Exact scalars, truncated q-series and small number-theoretic helpers.

Everything here is pure and immutable.  Rationals are :class:`fractions.Fraction`;
the optional extended float mode is provided by :mod:`mpmath`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import mpmath

Rational = Fraction
Number = Union[int, Fraction]

DEFAULT_PRECISION = 20


class InvalidInputError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


class PrecisionMismatchError(ValueError):
    """Raised by strict q-series arithmetic on unequal precisions."""


# ---------------------------------------------------------------------------
# floating point modes


def set_extended_precision(enabled: bool, bits: int = 128) -> None:
    """Switch the mpmath working precision used by the numeric layer."""
    mpmath.mp.prec = bits if enabled else 53


def extended_precision_enabled() -> bool:
    return mpmath.mp.prec > 53


# ---------------------------------------------------------------------------
# Hermite polynomials


@dataclass(frozen=True)
class HermitePoly:
    """Physicist's Hermite polynomial, ``coeffs[k]`` is the coefficient of t^k."""

    degree: int
    coeffs: tuple[int, ...]

    def __call__(self, t: complex | float) -> complex | float:
        acc: complex | float = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "HermitePoly":
        if self.degree == 0:
            return HermitePoly(0, (0,))
        return HermitePoly(self.degree - 1, tuple(k * c for k, c in enumerate(self.coeffs) if k))


_HERMITE_CACHE: dict[int, HermitePoly] = {0: HermitePoly(0, (1,))}


def hermite_poly(d: int) -> HermitePoly:
    """Return H_d = (2t - d/dt)^d 1 via H_{d+1} = 2t H_d - H_d'."""
    if d < 0:
        raise InvalidInputError("degree must be non-negative")
    top = max(_HERMITE_CACHE)
    while top < d:
        h = _HERMITE_CACHE[top]
        nxt = [0] * (top + 2)
        for k, c in enumerate(h.coeffs):
            nxt[k + 1] += 2 * c
            if k:
                nxt[k - 1] -= k * c
        top += 1
        _HERMITE_CACHE[top] = HermitePoly(top, tuple(nxt))
    return _HERMITE_CACHE[d]


def hermite_eval(d: int, t):
    """Evaluate H_d(t) by the three-term recurrence (works for floats, complex, mpf)."""
    if d == 0:
        return 1 + 0 * t
    h0, h1 = 1 + 0 * t, 2 * t
    for k in range(1, d):
        h0, h1 = h1, 2 * t * h1 - 2 * k * h0
    return h1


# ---------------------------------------------------------------------------
# truncated q-series


def _frac(x: Number | str) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class QSeries:
    """Power series sum_{n<=precision} c_n q^n with exact rational coefficients."""

    precision: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.precision < 0:
            raise InvalidInputError("precision must be >= 0")
        if len(self.coeffs) != self.precision + 1:
            raise InvalidInputError("coefficient list must have length precision + 1")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Number], precision: int | None = None) -> "QSeries":
        cs = [_frac(c) for c in coeffs]
        if precision is None:
            precision = len(cs) - 1
        cs = (cs + [Fraction(0)] * (precision + 1))[: precision + 1]
        return cls(precision, tuple(cs))

    @classmethod
    def zero(cls, precision: int = DEFAULT_PRECISION) -> "QSeries":
        return cls(precision, (Fraction(0),) * (precision + 1))

    @classmethod
    def one(cls, precision: int = DEFAULT_PRECISION) -> "QSeries":
        return cls.from_coeffs([1], precision)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, precision: int) -> "QSeries":
        if precision > self.precision:
            raise InvalidInputError("cannot raise the precision of a truncated series")
        return QSeries(precision, self.coeffs[: precision + 1])

    def _align(self, other: "QSeries", strict: bool) -> tuple["QSeries", "QSeries"]:
        if self.precision == other.precision:
            return self, other
        if strict:
            raise PrecisionMismatchError(f"{self.precision} != {other.precision}")
        m = min(self.precision, other.precision)
        return self.truncate(m), other.truncate(m)

    def add(self, other: "QSeries", strict: bool = False) -> "QSeries":
        a, b = self._align(other, strict)
        return QSeries(a.precision, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    def mul(self, other: "QSeries", strict: bool = False) -> "QSeries":
        a, b = self._align(other, strict)
        out = [Fraction(0)] * (a.precision + 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j in range(a.precision + 1 - i):
                    out[i + j] += x * b.coeffs[j]
        return QSeries(a.precision, tuple(out))

    def scale(self, c: Number) -> "QSeries":
        c = _frac(c)
        return QSeries(self.precision, tuple(c * x for x in self.coeffs))

    def __add__(self, other: "QSeries") -> "QSeries":
        return self.add(other)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self.add(other.scale(-1))

    def __neg__(self) -> "QSeries":
        return self.scale(-1)

    def __mul__(self, other: "QSeries | Number") -> "QSeries":
        if isinstance(other, QSeries):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.precision == other.precision and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.precision, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> list[list[int]]:
        return [[c.numerator, c.denominator] for c in self.coeffs]

    def __str__(self) -> str:
        terms = [f"{c}q^{n}" if n else str(c) for n, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) + f" + O(q^{self.precision + 1})" if terms else f"O(q^{self.precision + 1})"


def qseries_ops(a: QSeries, b: QSeries, op: str = "add", strict: bool = False) -> QSeries:
    """Dispatch ``add``/``sub``/``mul`` on two series (result precision = min)."""
    if op == "add":
        return a.add(b, strict)
    if op == "sub":
        return a.add(b.scale(-1), strict)
    if op == "mul":
        return a.mul(b, strict)
    raise InvalidInputError(f"unknown q-series op {op!r}")


# ---------------------------------------------------------------------------
# Dedekind sums and divisor functions


def _sawtooth(x: Fraction) -> Fraction:
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - Fraction(1, 2)


def dedekind_sum_naive(d: int, c: int) -> Fraction:
    """Direct summation of s(d,c); O(c), used as an oracle."""
    if c <= 0 or math.gcd(d, c) != 1:
        raise InvalidInputError("dedekind_sum needs c > 0 and gcd(d, c) = 1")
    return sum((_sawtooth(Fraction(k, c)) * _sawtooth(Fraction(k * d, c)) for k in range(1, c)), Fraction(0))


def dedekind_sum(d: int, c: int) -> Fraction:
    """s(d, c) by the reciprocity law, O(log c)."""
    if c <= 0 or math.gcd(d, c) != 1:
        raise InvalidInputError("dedekind_sum needs c > 0 and gcd(d, c) = 1")
    sign = 1
    total = Fraction(0)
    a, b = d % c, c
    # s(a,b) with 0 <= a < b; s(-a,b) = -s(a,b) handled through the reduction above
    while b > 1 and a:
        total += sign * (Fraction(-1, 4) + Fraction(a * a + b * b + 1, 12 * a * b))
        sign = -sign
        a, b = b % a, a
    return total


def divisors(n: int) -> list[int]:
    if n <= 0:
        raise InvalidInputError("divisors needs n >= 1")
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def sigma1_p(n: int, p: int) -> Fraction:
    """Sum of the divisors of n that are prime to p."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    return Fraction(sum(d for d in divisors(n) if d % p))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------------------
# continued fractions


def continued_fraction_digits(x: Number) -> list[int]:
    x = _frac(x)
    a, b = x.numerator, x.denominator
    digits = []
    while True:
        q, r = divmod(a, b)
        digits.append(q)
        if r == 0:
            return digits
        a, b = b, r


def continued_fraction(x: Number) -> list[Fraction]:
    """Convergents p_k/q_k of the simple continued fraction of x."""
    return [Fraction(p, q) for p, q in convergent_pairs(x)]


def convergent_pairs(x: Number) -> list[tuple[int, int]]:
    """Convergents as unreduced integer pairs (p_k, q_k) with q_k > 0."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in continued_fraction_digits(x):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def as_fraction_pair(x: Fraction) -> tuple[int, int]:
    return x.numerator, x.denominator


def frac_pairs(values: Sequence[Fraction]) -> list[list[int]]:
    return [[v.numerator, v.denominator] for v in values]

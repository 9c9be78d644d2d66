"""Geometric route: exact crossing counts of a closed geodesic with Hecke translates of
{0, oo}, the Eisenstein period from the eta transformation law, and the q-expansion.

Points on the axis of gamma are handled through the Mobius map
h(x) = s (x - w) / (x - w'), which sends the repelling fixed point w to 0, the attracting
point w' to oo and the axis to the positive imaginary axis; gamma acts there as t -> k t.
A geodesic with real endpoints alpha, beta crosses the axis iff h(alpha) h(beta) < 0, at
height t with t^2 = -h(alpha) h(beta).  The fundamental segment is t0^2 <= t^2 < k^2 t0^2.
All of these tests are done in Q(sqrt(trace^2 - 4)).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core_arith import QSeries, dedekind_sum
from .kernels import crossing_candidates
from .lattice_cycles import (
    ClosedGeodesic,
    NotHyperbolicError,
    SpecialCycleN2,
    TestFunction,
    UnsupportedError,
    make_test_function_gamma0,
    special_cycle_components_n2,
)

# Sign relating the counts below (sign +1 when the crossing geodesic passes from the
# h > 0 side to the h < 0 side) to the q-expansion coefficients.  Fixed once by comparing
# with the homological intersection number at p = 11, n = 1; see tests/test_geometric_lift.py.
ORIENTATION_SIGN = 1


class DegeneracyError(ArithmeticError):
    """Raised if an exact crossing test is degenerate; cannot occur for rational endpoints."""


# ---------------------------------------------------------------------------
# exact arithmetic in Q(sqrt(D))


@dataclass(frozen=True)
class QuadSurd:
    """a + b sqrt(D) with a, b rational and D a positive non-square integer."""

    a: Fraction
    b: Fraction
    D: int

    @staticmethod
    def rational(x: Fraction | int, D: int) -> "QuadSurd":
        return QuadSurd(Fraction(x), Fraction(0), D)

    def _coerce(self, other: "QuadSurd | Fraction | int") -> "QuadSurd":
        if isinstance(other, QuadSurd):
            if other.D != self.D:
                raise ValueError("mixing different quadratic fields")
            return other
        return QuadSurd(Fraction(other), Fraction(0), self.D)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a * o.a + self.b * o.b * self.D, self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def conj(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def inverse(self) -> "QuadSurd":
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("zero in Q(sqrt(D))")
        return QuadSurd(self.a / nm, -self.b / nm, self.D)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 D
        diff = self.a * self.a - self.b * self.b * self.D
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        if self.a and self.b and (self.a > 0) != (self.b > 0):
            # a + b sqrt(D) = norm / (a - b sqrt(D)) avoids cancellation
            return float(self.norm()) / (float(self.a) - float(self.b) * math.sqrt(self.D))
        return float(self.a) + float(self.b) * math.sqrt(self.D)


# ---------------------------------------------------------------------------
# the fundamental segment


@dataclass(frozen=True)
class FundamentalSegment:
    """The arc z0 -> gamma z0 of the axis of gamma.

    ``t0sq`` is the squared h-height of z0; the default 1/k centres the arc on the top of
    the axis semicircle."""

    gamma: tuple[int, int, int, int]
    p: int
    w: QuadSurd  # repelling fixed point
    wp: QuadSurd  # attracting fixed point
    s: int
    k: QuadSurd  # multiplier > 1
    t0sq: QuadSurd

    @property
    def disc(self) -> int:
        return self.w.D

    def h(self, x: Fraction | None) -> QuadSurd:
        if x is None:
            return QuadSurd.rational(self.s, self.disc)
        return (QuadSurd.rational(x, self.disc) - self.w) / (QuadSurd.rational(x, self.disc) - self.wp) * self.s

    def h_inverse_float(self, u: complex) -> complex:
        w, wp = float(self.w), float(self.wp)
        return (w - u * self.s * wp) / (1 - u * self.s)

    @property
    def z0(self) -> complex:
        return self.h_inverse_float(1j * math.sqrt(float(self.t0sq)))

    @property
    def z1(self) -> complex:
        return self.h_inverse_float(1j * math.sqrt(float(self.t0sq)) * float(self.k))

    def extent(self) -> tuple[float, float, float]:
        """(x_min, x_max, y_min) of the arc."""
        a, b = self.z0, self.z1
        return min(a.real, b.real), max(a.real, b.real), min(a.imag, b.imag)

    def with_base_point(self, t0sq: QuadSurd | Fraction | int) -> "FundamentalSegment":
        t = t0sq if isinstance(t0sq, QuadSurd) else QuadSurd.rational(t0sq, self.disc)
        if t.sign() <= 0:
            raise ValueError("t0sq must be positive")
        return FundamentalSegment(self.gamma, self.p, self.w, self.wp, self.s, self.k, t)

    def contains_height_sq(self, tsq: QuadSurd) -> bool:
        return self.t0sq <= tsq and tsq < self.k * self.k * self.t0sq


def fundamental_segment(Z: ClosedGeodesic | Sequence[int], p: int | None = None) -> FundamentalSegment:
    if not isinstance(Z, ClosedGeodesic):
        Z = ClosedGeodesic(tuple(Z), p)  # type: ignore[arg-type]
    a, b, c, d = Z.gamma
    if abs(a + d) <= 2:
        raise NotHyperbolicError("gamma is not hyperbolic")
    D = (a + d) ** 2 - 4
    root = QuadSurd(Fraction(0), Fraction(1), D)
    r1 = (QuadSurd.rational(a - d, D) - root) / (2 * c)
    r2 = (QuadSurd.rational(a - d, D) + root) / (2 * c)
    # repelling point: |c w + d| < 1
    m1 = r1 * c + d
    w, wp = (r1, r2) if (m1 * m1) < 1 else (r2, r1)
    mult = w * c + d
    k = (mult * mult).inverse()
    s = (w - wp).sign()
    return FundamentalSegment(Z.gamma, Z.p, w, wp, s, k, k.inverse())


# ---------------------------------------------------------------------------
# crossings


@dataclass(frozen=True)
class CrossingCertificate:
    """One crossing: the vector (v1, v2, w1, w2), its sign, and the exact squared height."""

    vector: tuple[int, int, int, int]
    sign: int
    height_sq: QuadSurd
    weight: Fraction


def crossing_sign(seg: FundamentalSegment, alpha: Fraction | None, beta: Fraction | None) -> tuple[int, QuadSurd | None]:
    """Sign of the crossing of the geodesic alpha -> beta with the segment, or 0."""
    ha, hb = seg.h(alpha), seg.h(beta)
    sa, sb = ha.sign(), hb.sign()
    if sa == 0 or sb == 0:
        raise DegeneracyError("geodesic endpoint on the axis")
    if sa == sb:
        return 0, None
    tsq = -(ha * hb)
    if not seg.contains_height_sq(tsq):
        return 0, None
    return (1 if sa > 0 else -1), tsq


def _chi_weight(chi: TestFunction, A: int, B: int, C: int, D: int) -> Fraction:
    val = chi((A, C, D, -B)) + chi((-A, -C, -D, B))
    return Fraction(val) / 2 if val else Fraction(0)


def _matrix_candidates(seg: FundamentalSegment, n: int, box_scale: float) -> list[tuple[int, int, int, int]]:
    xlo, xhi, ymin = seg.extent()
    pad = (box_scale - 1.0) * (xhi - xlo + 1.0)
    xlo, xhi = xlo - pad - 1e-9, xhi + pad + 1e-9
    cd_max = box_scale * n / (2.0 * ymin) * (1 + 1e-9) + 1e-9
    kf, tf = float(seg.k), float(seg.t0sq)
    out = list(
        crossing_candidates(n, seg.p, cd_max, xlo, xhi, float(seg.w), float(seg.wp), float(seg.s), tf, kf * kf * tf)
    )
    # vertical components: C = 0 (endpoint oo is M oo) and D = 0 (M 0 = oo)
    for D in range(1, n + 1):
        if n % D == 0:
            A = n // D
            for B in range(math.floor(xlo * D) - 1, math.ceil(xhi * D) + 2):
                out.append((A, B, 0, D))
    C = seg.p
    while C <= n:
        if n % C == 0:
            B = -(n // C)
            for A in range(math.floor(xlo * C) - 1, math.ceil(xhi * C) + 2):
                out.append((A, B, C, 0))
        C += seg.p
    return out


def crossing_certificates(
    seg: FundamentalSegment, n: int, chi: TestFunction, box_scale: float = 1.0
) -> list[CrossingCertificate]:
    if chi.N != 2:
        raise UnsupportedError("crossing counts are implemented for N = 2 only")
    out = []
    for A, B, C, D in _matrix_candidates(seg, n, box_scale):
        wt = _chi_weight(chi, A, B, C, D)
        if not wt:
            continue
        alpha = None if D == 0 else Fraction(B, D)
        beta = None if C == 0 else Fraction(A, C)
        sgn, tsq = crossing_sign(seg, alpha, beta)
        if sgn:
            out.append(CrossingCertificate((A, C, D, -B), sgn, tsq, wt))  # type: ignore[arg-type]
    return out


def crossing_number(
    seg: FundamentalSegment, cycle: SpecialCycleN2 | int, chi: TestFunction | None = None, box_scale: float = 1.0
) -> Fraction:
    """Signed intersection of the closed geodesic with Z_n(chi) = T_n{0, oo} on X_0(p)."""
    n = cycle.n if isinstance(cycle, SpecialCycleN2) else int(cycle)
    if chi is None:
        chi = make_test_function_gamma0(seg.p, 2)
    return sum((c.sign * c.weight for c in crossing_certificates(seg, n, chi, box_scale)), Fraction(0))


# ---------------------------------------------------------------------------
# Eisenstein period


def rademacher_phi(g: Sequence[int]) -> Fraction:
    """Rademacher's Phi: log eta(g z) - log eta(z) = (1/2) log((cz+d)/i) + pi i Phi(g)/12."""
    a, b, c, d = g
    if c < 0 or (c == 0 and d < 0):
        a, b, c, d = -a, -b, -c, -d
    if c == 0:
        return Fraction(b, d)
    return Fraction(a + d, c) - 12 * dedekind_sum(d, c)


def eisenstein_period(gamma: Sequence[int], p: int) -> Fraction:
    """int_{z}^{gamma z} E_2^(p)(t) dt for gamma in Gamma_0(p) (independent of z)."""
    a, b, c, d = gamma
    if c % p:
        raise ValueError("gamma must lie in Gamma_0(p)")
    conj = (a, p * b, c // p, d)
    return (rademacher_phi(conj) - rademacher_phi(gamma)) / 24


def constant_term(seg: FundamentalSegment | ClosedGeodesic, p: int | None = None) -> Fraction:
    """Constant term of the lift: the period of the weight-two Eisenstein form E_2^(p) dz
    along the closed geodesic.  Its E_2^(p)-coefficient is (24/(p-1)) times this."""
    gamma = seg.gamma
    p = seg.p if p is None else p
    if abs(gamma[0] + gamma[3]) <= 2:
        raise NotHyperbolicError("gamma is not hyperbolic")
    return eisenstein_period(gamma, p)


def e2p_numeric(z: complex, p: int, terms: int = 400) -> complex:
    """E_2^(p)(z) from its q-expansion (floating point, used to check the exact period)."""
    q = cmath.exp(2j * math.pi * z)
    total = complex((p - 1) / 24)
    qn = 1.0 + 0j
    for n in range(1, terms + 1):
        qn *= q
        s = sum(d for d in range(1, n + 1) if n % d == 0 and d % p)
        total += s * qn
        if abs(qn) * n * n < 1e-18:
            break
    return total


# ---------------------------------------------------------------------------
# assembled q-expansion


@dataclass(frozen=True)
class LiftResult:
    p: int
    gamma: tuple[int, int, int, int]
    route: str
    constant: Fraction
    coeffs: QSeries  # coefficient of q^n at index n, including the constant at 0

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "gamma": list(self.gamma),
            "route": self.route,
            "constant": [self.constant.numerator, self.constant.denominator],
            "coeffs": [[c.numerator, c.denominator] for c in self.coeffs.coeffs[1:]],
        }

    @staticmethod
    def from_json(text: str) -> "LiftResult":
        d = json.loads(text)
        const = Fraction(*d["constant"])
        cs = [const] + [Fraction(n, m) for n, m in d["coeffs"]]
        return LiftResult(d["p"], tuple(d["gamma"]), d["route"], const, QSeries.from_coeffs(cs))


def geometric_qexpansion(
    gamma: ClosedGeodesic | Sequence[int],
    p: int,
    chi: TestFunction | None = None,
    Q: int = 20,
    box_scale: float = 1.0,
) -> LiftResult:
    """Constant term plus ORIENTATION_SIGN * crossing numbers with Z_n(chi), 1 <= n <= Q."""
    Z = gamma if isinstance(gamma, ClosedGeodesic) else ClosedGeodesic(tuple(gamma), p)  # type: ignore[arg-type]
    if chi is None:
        chi = make_test_function_gamma0(p, 2)
    seg = fundamental_segment(Z)
    if chi.lattice_tag == "gamma0_example":
        const = constant_term(seg)
    elif is_odd(chi):
        const = Fraction(0)
    else:
        raise UnsupportedError("the constant term is known for the Gamma_0(p) test function and odd ones")
    coeffs = [const]
    for n in range(1, Q + 1):
        coeffs.append(ORIENTATION_SIGN * crossing_number(seg, n, chi, box_scale))
    return LiftResult(p, Z.gamma, "geometric", coeffs[0], QSeries.from_coeffs(coeffs))


def is_odd(chi: TestFunction) -> bool:
    """chi(-v) = -chi(v) for every residue."""
    m = chi.modulus
    return all(chi.at_key(tuple(-x % m for x in k)) == -v for k, v in chi.values.items())


def special_cycle(p: int, n: int, chi: TestFunction | None = None) -> SpecialCycleN2:
    return special_cycle_components_n2(p, chi or make_test_function_gamma0(p, 2), n)

"""Test functions, finite Fourier transforms, orbit representatives and geodesics.

Discriminant-group conventions: the lattice is L = pZ^N, so D_L = p^{-1}Z^N / pZ^N.
An element v of D_L is stored as the integer vector k = p*v reduced mod p^2.  A test
function is a table on D_L x D_L keyed by the concatenated 2N-tuple of such residues.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .core_arith import InvalidInputError, divisors, is_prime

Scalar = complex | Fraction


class EmptyCycleError(ValueError):
    """The special cycle of a vector with B(v) <= 0 is empty."""


class UnsupportedError(ValueError):
    """Requested structure is outside the implemented cases."""


class NotRepresentedError(ValueError):
    """No Gamma_0(p) quadratic form of the requested discriminant exists."""


# ---------------------------------------------------------------------------
# exact cyclotomic reduction


def _poly_divmod(num: list[int], den: list[int]) -> list[int]:
    """Remainder of integer polynomial division by a monic polynomial (low degree first)."""
    num = list(num)
    dd = len(den) - 1
    for top in range(len(num) - 1, dd - 1, -1):
        c = num[top]
        if c:
            for j in range(dd + 1):
                num[top - dd + j] -= c * den[j]
    return num[:dd] if dd else []


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for top in range(len(num) - 1, dd - 1, -1):
        c = num[top]
        out[top - dd] = c
        if c:
            for j in range(dd + 1):
                num[top - dd + j] -= c * den[j]
    return out


_CYCLO: dict[int, list[int]] = {}


def cyclotomic_poly(m: int) -> list[int]:
    """Coefficients (low degree first) of the m-th cyclotomic polynomial."""
    if m not in _CYCLO:
        poly = [-1] + [0] * (m - 1) + [1]
        for d in divisors(m):
            if d < m:
                poly = _poly_exact_div(poly, cyclotomic_poly(d))
        _CYCLO[m] = poly
    return _CYCLO[m]


def cyclotomic_to_scalar(coeffs: Sequence[Fraction], m: int) -> Scalar:
    """Value of sum coeffs[j] zeta_m^j: a Fraction when rational, else a complex."""
    phi = cyclotomic_poly(m)
    den = 1
    for c in coeffs:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    rem = _poly_divmod(ints, phi) if len(phi) > 1 else []
    if all(r == 0 for r in rem[1:]):
        return Fraction(rem[0] if rem else 0, den)
    z = cmath.exp(2j * math.pi / m)
    return sum(complex(c) * z**j for j, c in enumerate(coeffs))


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class HalfFunction:
    """A function on D_L = p^{-1}Z^N / pZ^N, keyed by p*v mod p^2."""

    N: int
    p: int
    values: Mapping[tuple[int, ...], Scalar]

    def __call__(self, key: tuple[int, ...]) -> Scalar:
        return self.values.get(tuple(k % (self.p * self.p) for k in key), 0)

    def fourier(self) -> "HalfFunction":
        """Finite Fourier transform on D_L with kernel e(B(w, w')) and |D_L|^{-1/2}."""
        m = self.p * self.p
        out: dict[tuple[int, ...], Scalar] = {}
        items = [(k, v) for k, v in self.values.items() if v != 0]
        exact = all(isinstance(v, (int, Fraction)) for _, v in items)
        scale = Fraction(1, self.p**self.N)
        for kp in itertools.product(range(m), repeat=self.N):
            if exact:
                acc = [Fraction(0)] * m
                for k, v in items:
                    acc[sum(a * b for a, b in zip(k, kp)) % m] += Fraction(v)
                val = cyclotomic_to_scalar(acc, m)
                val = val * scale if isinstance(val, Fraction) else val * float(scale)
            else:
                val = sum(complex(v) * cmath.exp(2j * math.pi * (sum(a * b for a, b in zip(k, kp)) % m) / m) for k, v in items)
                val *= float(scale)
            if val != 0:
                out[kp] = val
        return HalfFunction(self.N, self.p, out)


@dataclass(frozen=True)
class TestFunction:
    """A function chi on D_L + D_L with an optional splitting chi(v,w) = chi1(v) chi2(w)."""

    N: int
    p: int
    lattice_tag: str
    values: Mapping[tuple[int, ...], Scalar]
    split: tuple[HalfFunction, HalfFunction] | None = None
    good_for_constant_term: bool = False

    __test__ = False  # not a pytest class

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values.values())

    @property
    def modulus(self) -> int:
        return self.p * self.p

    def key(self, vec: Sequence[Fraction | int]) -> tuple[int, ...] | None:
        """Residue key of a rational 2N-vector, or None when it lies outside L^vee."""
        out = []
        for x in vec:
            y = Fraction(x) * self.p
            if y.denominator != 1:
                return None
            out.append(y.numerator % self.modulus)
        return tuple(out)

    def __call__(self, vec: Sequence[Fraction | int]) -> Scalar:
        k = self.key(vec)
        return 0 if k is None else self.values.get(k, 0)

    def at_key(self, key: tuple[int, ...]) -> Scalar:
        return self.values.get(tuple(k % self.modulus for k in key), 0)

    def support(self) -> list[tuple[int, ...]]:
        return [k for k, v in self.values.items() if v != 0]

    def to_json(self) -> dict:
        def enc(v: Scalar):
            if isinstance(v, (int, Fraction)):
                f = Fraction(v)
                return [f.numerator, f.denominator]
            return [complex(v).real, complex(v).imag]

        return {
            "N": self.N,
            "p": self.p,
            "lattice": self.lattice_tag,
            "values": [[list(k), enc(v)] for k, v in sorted(self.values.items())],
        }


def test_function_from_split(chi1: HalfFunction, chi2: HalfFunction, tag: str = "pZ^(2N)") -> TestFunction:
    vals = {}
    for k1, a in chi1.values.items():
        for k2, b in chi2.values.items():
            if a != 0 and b != 0:
                vals[k1 + k2] = a * b
    return TestFunction(chi1.N, chi1.p, tag, vals, (chi1, chi2), good_for_constant_term=chi1.values.get((0,) * chi1.N, 0) == 0)


def _residues(N: int, p: int, pred: Callable[[tuple[int, ...]], bool]) -> dict[tuple[int, ...], Fraction]:
    """Indicator of the integer vectors v (mod pZ^N) satisfying pred, as a D_L table."""
    out = {}
    for v in itertools.product(range(p), repeat=N):
        if pred(v):
            out[tuple(p * x for x in v)] = Fraction(1)
    return out


def integral_indicator(N: int, p: int) -> HalfFunction:
    """The characteristic function of Z^N inside D_L."""
    return HalfFunction(N, p, _residues(N, p, lambda v: True))


@functools.lru_cache(maxsize=None)
def make_test_function_gamma0(p: int, N: int) -> TestFunction:
    """chi = 1 on {v : (v_1,p)=1, v_i in pZ for i >= 2} x Z^N."""
    if not is_prime(p):
        raise InvalidInputError("p must be prime")
    chi1 = HalfFunction(N, p, _residues(N, p, lambda v: v[0] % p != 0 and all(x == 0 for x in v[1:])))
    return test_function_from_split(chi1, integral_indicator(N, p), tag="gamma0_example")


def make_unit_test_function(p: int, N: int) -> TestFunction:
    """chi = 1 on vectors whose v-entries are all prime to p, times Z^N."""
    chi1 = HalfFunction(N, p, _residues(N, p, lambda v: all(x % p for x in v)))
    return test_function_from_split(chi1, integral_indicator(N, p))


def make_point_test_function(p: int, v0: Sequence[int], N: int | None = None) -> TestFunction:
    """chi1 = point mass at the integer class v0 (mod p), chi2 = 1_{Z^N}."""
    N = len(v0) if N is None else N
    chi1 = HalfFunction(N, p, {tuple((p * x) % (p * p) for x in v0): Fraction(1)})
    return test_function_from_split(chi1, integral_indicator(N, p))


def make_odd_test_function(p: int) -> TestFunction:
    """A synthetic N=2 function with chi(-v) = -chi(v): the sign of the residue of v_1
    (+1 on 1..(p-1)/2, -1 above) on the Gamma_0 support."""
    if p < 3:
        raise InvalidInputError("need an odd prime")
    half = (p - 1) // 2
    vals = {(p * a, 0): Fraction(1 if a <= half else -1) for a in range(1, p)}
    chi1 = HalfFunction(2, p, vals)
    tf = test_function_from_split(chi1, integral_indicator(2, p), tag="odd_synthetic")
    return tf


def finite_fourier_transform_2(chi: TestFunction) -> TestFunction:
    """F_2(chi)(v0, w0') = |D_L|^{-1/2} sum_{w0} chi(v0, w0) e(B(w0, w0'))."""
    N, p = chi.N, chi.p
    if chi.split is not None:
        chi1, chi2 = chi.split
        hat2 = chi2.fourier()
        out = test_function_from_split(chi1, hat2, chi.lattice_tag)
        return out
    by_v: dict[tuple[int, ...], dict[tuple[int, ...], Scalar]] = {}
    for k, v in chi.values.items():
        by_v.setdefault(k[:N], {})[k[N:]] = v
    vals = {}
    for kv, row in by_v.items():
        hat = HalfFunction(N, p, row).fourier()
        for kw, val in hat.values.items():
            vals[kv + kw] = val
    return TestFunction(N, p, chi.lattice_tag, vals)


def all_keys(N: int, p: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(p * p), repeat=2 * N)


def hermitian_inner(chi: TestFunction, other: TestFunction) -> complex:
    keys = set(chi.values) | set(other.values)
    return sum(complex(chi.at_key(k)) * complex(other.at_key(k)).conjugate() for k in keys)


def is_good(chi: TestFunction) -> bool:
    """True iff chi splits and chi_1 vanishes on the zero coset."""
    if chi.split is None:
        raise UnsupportedError("goodness is only defined for split test functions")
    return chi.split[0](tuple([0] * chi.N)) == 0


def is_good_for(Q: Sequence[Sequence[int]], chi: TestFunction) -> bool:
    """True iff v -> chi_1(Qv) is good, i.e. chi_1 vanishes at Q*0 = 0 and on every
    coset whose Q-image lies in the zero class."""
    if chi.split is None:
        raise UnsupportedError("goodness is only defined for split test functions")
    chi1 = chi.split[0]
    m = chi.p * chi.p
    for k in itertools.product(range(m), repeat=chi.N):
        img = tuple(sum(Q[i][j] * k[j] for j in range(chi.N)) % m for i in range(chi.N))
        if all(x == 0 for x in img) and chi1(k) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# orbit representatives for SL_N(Z)


@dataclass(frozen=True, order=True)
class OrbitRep:
    """Normal form (D e_1, (w1, r)) with D*w1 = n and r in (Z/w1)^{N-1}."""

    N: int
    n: int
    D: int
    w1: int
    r: tuple[int, ...]

    def as_row(self) -> tuple[int, ...]:
        return (self.D, self.w1) + self.r

    def vector(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.D,) + (0,) * (self.N - 1), (self.w1,) + self.r


def orbit_representatives(N: int, n: int) -> list[OrbitRep]:
    if N < 1 or n < 1:
        raise InvalidInputError("need N >= 1 and n >= 1")
    out = []
    for w1 in divisors(n):
        D = n // w1
        for r in itertools.product(range(w1), repeat=N - 1):
            out.append(OrbitRep(N, n, D, w1, tuple(r)))
    return sorted(out, key=lambda o: (o.D, o.w1, o.r))


def _reduce_column(v: list[int]) -> tuple[list[list[int]], int]:
    """Unimodular g with g v = D e_1 (D = gcd >= 0), by pairwise Euclid from the bottom."""
    N = len(v)
    g = [[int(i == j) for j in range(N)] for i in range(N)]
    v = list(v)

    def row_op(i: int, j: int, q: int) -> None:  # row_i -= q row_j
        v[i] -= q * v[j]
        for c in range(N):
            g[i][c] -= q * g[j][c]

    def swap_neg(i: int, j: int) -> None:  # (row_i, row_j) -> (row_j, -row_i), det 1
        v[i], v[j] = v[j], -v[i]
        g[i], g[j] = g[j], [-x for x in g[i]]

    for i in range(N - 1, 0, -1):
        while v[i] != 0:
            if v[i - 1] != 0:
                row_op(i - 1, i, v[i - 1] // v[i])
            swap_neg(i - 1, i)
    if v[0] < 0:
        if N == 1:
            return g, v[0]
        # multiply rows 0 and 1 by -1 (det +1)
        v[0] = -v[0]
        g[0] = [-x for x in g[0]]
        g[1] = [-x for x in g[1]]
    return g, v[0]


def normal_form(v: Sequence[int], w: Sequence[int]) -> OrbitRep:
    """Reduce (v, w) with B(v, w) = n > 0 to the normal form of orbit_representatives."""
    N = len(v)
    n = sum(a * b for a, b in zip(v, w))
    if n <= 0:
        raise InvalidInputError("normal form needs B(v) > 0")
    if N == 1:
        D = abs(v[0])
        return OrbitRep(1, n, D, n // D, ())
    g, D = _reduce_column(list(v))
    wp = _adjugate_t_apply(g, w)
    w1 = wp[0]
    assert D * w1 == n
    return OrbitRep(N, n, D, w1, tuple(x % w1 for x in wp[1:]))


def _adjugate_t_apply(g: list[list[int]], w: Sequence[int]) -> list[int]:
    """g^{-t} w for det g = 1 via exact Fraction Gaussian elimination."""
    N = len(g)
    # solve g^t x = w
    A = [[Fraction(g[j][i]) for j in range(N)] + [Fraction(w[i])] for i in range(N)]
    for col in range(N):
        piv = next(r for r in range(col, N) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(N):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    x = [A[i][N] / A[i][i] for i in range(N)]
    assert all(t.denominator == 1 for t in x)
    return [int(t) for t in x]


def brute_force_orbits(N: int, n: int, bound: int | None = None) -> set[OrbitRep]:
    """Normal forms of every integer (v, w) with entries in [-bound, bound] and B(v) = n."""
    bound = n if bound is None else bound
    rng = range(-bound, bound + 1)
    seen = set()
    for v in itertools.product(rng, repeat=N):
        if not any(v):
            continue
        for w in itertools.product(rng, repeat=N):
            if sum(a * b for a, b in zip(v, w)) == n:
                seen.add(normal_form(v, w))
    return seen


# ---------------------------------------------------------------------------
# N = 2 geodesics


@dataclass(frozen=True)
class GeodesicComponent:
    """Geodesic in H oriented from ``start`` to ``end`` (None encodes the cusp infinity).

    Semicircles also carry (A, B, C) with A(a^2+b^2) + B a + C = 0."""

    kind: str
    start: Fraction | None
    end: Fraction | None
    abc: tuple[int, int, int] | None = None
    weight: Scalar = Fraction(1)
    orientation: int = 1

    @property
    def vertical_at(self) -> Fraction | None:
        if self.kind != "vertical":
            return None
        return self.start if self.end is None else self.end

    def discriminant(self) -> int | None:
        if self.abc is None:
            return None
        A, B, C = self.abc
        return B * B - 4 * A * C


def geodesic_from_vector(vec: Sequence[int]) -> GeodesicComponent:
    """Geodesic of v = (v1, v2, w1, w2): endpoints v1/v2 and -w2/w1, oriented -w2/w1 -> v1/v2."""
    v1, v2, w1, w2 = (int(x) for x in vec)
    n = v1 * w1 + v2 * w2
    if n <= 0:
        raise EmptyCycleError("the cycle of a vector with B(v) <= 0 is empty")
    end = None if v2 == 0 else Fraction(v1, v2)
    start = None if w1 == 0 else Fraction(-w2, w1)
    if w1 == 0 or v2 == 0:
        return GeodesicComponent("vertical", start, end)
    return GeodesicComponent("semicircle", start, end, (v2 * w1, v2 * w2 - v1 * w1, -v1 * w2))


@dataclass(frozen=True)
class SpecialCycleN2:
    p: int
    n: int
    components: tuple[GeodesicComponent, ...]
    reps: tuple[tuple[int, int, int], ...]


def hecke_representatives(n: int, p: int) -> list[tuple[int, int, int]]:
    """(d, d', b) with dd' = n, (d, p) = 1, 0 <= b < d'."""
    return [(d, n // d, b) for d in divisors(n) if d % p for b in range(n // d)]


def special_cycle_components_n2(p: int, chi: TestFunction, n: int) -> SpecialCycleN2:
    """The components {b/d', oo} of Z_n(chi) = T_n{0, oo}."""
    if chi.N != 2 or chi.lattice_tag != "gamma0_example" or chi.p != p:
        raise UnsupportedError("special cycles are implemented for the Gamma_0(p) test function")
    reps = hecke_representatives(n, p)
    comps = tuple(GeodesicComponent("vertical", Fraction(b, dp), None) for _, dp, b in reps)
    return SpecialCycleN2(p, n, comps, tuple(reps))


# ---------------------------------------------------------------------------
# closed geodesics from quadratic forms


@dataclass(frozen=True)
class ClosedGeodesic:
    """Hyperbolic gamma = (a b; c d) in Gamma_0(p)."""

    gamma: tuple[int, int, int, int]
    p: int
    form: tuple[int, int, int] | None = None
    disc: int | None = None

    def __post_init__(self) -> None:
        a, b, c, d = self.gamma
        if a * d - b * c != 1:
            raise InvalidInputError("gamma must have determinant 1")
        if c % self.p:
            raise InvalidInputError("gamma must lie in Gamma_0(p)")
        if abs(a + d) <= 2:
            raise NotHyperbolicError("gamma is not hyperbolic")

    @property
    def trace(self) -> int:
        return self.gamma[0] + self.gamma[3]

    @property
    def fixed_quadratic(self) -> tuple[int, int, int]:
        """(c, d - a, -b): gamma x = x iff c x^2 + (d - a) x - b = 0."""
        a, b, c, d = self.gamma
        return (c, d - a, -b)

    @property
    def axis_disc(self) -> int:
        return self.trace**2 - 4

    def inverse(self) -> "ClosedGeodesic":
        a, b, c, d = self.gamma
        return ClosedGeodesic((d, -b, -c, a), self.p, self.form, self.disc)

    def conjugate(self, delta: Sequence[int]) -> "ClosedGeodesic":
        """delta gamma delta^{-1}."""
        return ClosedGeodesic(mat_mul(mat_mul(tuple(delta), self.gamma), mat_inv(tuple(delta))), self.p, None, self.disc)


class NotHyperbolicError(InvalidInputError):
    pass


def mat_mul(x: Sequence[int], y: Sequence[int]) -> tuple[int, int, int, int]:
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_inv(x: Sequence[int]) -> tuple[int, int, int, int]:
    a, b, c, d = x
    return (d, -b, -c, a)


def pell_fundamental(D: int, search_limit: int = 10**6) -> tuple[int, int]:
    """Smallest t, u > 0 with t^2 - D u^2 = 4."""
    if D <= 0 or math.isqrt(D) ** 2 == D:
        raise InvalidInputError("D must be a positive non-square")
    for u in range(1, search_limit):
        t2 = D * u * u + 4
        t = math.isqrt(t2)
        if t * t == t2:
            return t, u
    # continued fraction of sqrt(D) for x^2 - D y^2 = 1, then (2x, 2y)
    a0 = math.isqrt(D)
    m, d, a = 0, 1, a0
    p0, p1, q0, q1 = 1, a0, 0, 1
    while p1 * p1 - D * q1 * q1 != 1:
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    return 2 * p1, 2 * q1


def gamma0_forms(D: int, p: int, count: int = 1) -> list[tuple[int, int, int]]:
    """Forms [A, B, C] of discriminant D with A = p*m, smallest first."""
    if D <= 0 or D % 4 not in (0, 1) or math.isqrt(D) ** 2 == D:
        raise InvalidInputError("D must be a positive non-square discriminant")
    out = []
    m = 1
    while len(out) < count and m <= 64:
        A = p * m
        for B in range(0, 2 * A):
            if (B * B - D) % (4 * A) == 0:
                out.append((A, B, (B * B - D) // (4 * A)))
                if len(out) >= count:
                    break
        m += 1
    if not out:
        raise NotRepresentedError(f"no form of discriminant {D} with p | A for p = {p}")
    return out


def automorph(disc: int, p: int, index: int = 0) -> ClosedGeodesic:
    """Automorph of a Gamma_0(p) form of discriminant ``disc`` from the Pell unit."""
    D = disc
    if D <= 0 or D % 4 not in (0, 1) or math.isqrt(D) ** 2 == D:
        raise InvalidInputError("D must be a positive non-square discriminant")
    level = max(p, 1)
    forms = gamma0_forms(D, level, index + 1)
    if len(forms) <= index:
        raise NotRepresentedError(f"fewer than {index + 1} forms of discriminant {D} at p = {p}")
    A, B, C = forms[index]
    t, u = pell_fundamental(D)
    gamma = ((t - B * u) // 2, -C * u, A * u, (t + B * u) // 2)
    return ClosedGeodesic(gamma, level, (A, B, C), D)

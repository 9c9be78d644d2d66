"""Spectral route: the lift of a closed geodesic from Eisenstein and cusp-form periods.

The lift is (24/(p-1)) (int_Z omega_E) E_2^(p) minus, for each rational newform f,
c * (L(f,1) / (i pi ||f||^2)) (int_Z omega_f^+) f.  Every factor is a PeriodSymbol built
from modular-symbol data, so the Omega-monomials cancel symbolically and each coefficient
is an exact rational.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import linalg as la
from . import modsym as ms
from .core_arith import InvalidInputError, QSeries, divisors, sigma1_p
from .geometric_lift import LiftResult, constant_term, eisenstein_period, fundamental_segment
from .lattice_cycles import ClosedGeodesic, UnsupportedError

# Normalisation constant c relating the period-symbol product to the coefficient of f.
# Fixed once against the intersection numbers at p = 11 and checked at every supported level
# in tests/test_spectral_lift.py.
SPECTRAL_CALIBRATION = Fraction(-1, 2)


class PeriodCancellationError(ArithmeticError):
    """Raised when an Omega-monomial survives where a rational number is expected."""


def eisenstein_series_E2p(p: int, Q: int = 20) -> QSeries:
    """(p-1)/24 + sum_n sigma_1^(p)(n) q^n."""
    return QSeries.from_coeffs([Fraction(p - 1, 24)] + [sigma1_p(n, p) for n in range(1, Q + 1)])


def newform_qseries(f: ms.Eigenform, Q: int) -> QSeries:
    if len(f.an) <= Q:
        raise InvalidInputError("eigenform table is shorter than the requested precision")
    return QSeries.from_coeffs([Fraction(a) for a in f.an[: Q + 1]])


@dataclass
class SpectralBasis:
    """E_2^(p) together with the rational newforms of level p and their period data."""

    p: int
    Q: int
    space: ms.ModSymSpace
    e2p: QSeries
    eigenforms: list[ms.Eigenform]

    @property
    def dim(self) -> int:
        return 1 + len(self.eigenforms)

    def series(self) -> list[QSeries]:
        return [self.e2p] + [newform_qseries(f, self.Q) for f in self.eigenforms]

    def l_ratios(self) -> list[Fraction]:
        return [ms.l_ratio(self.space, f) for f in self.eigenforms]

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "Q": self.Q,
                "e2p": self.e2p.to_json(),
                "eigenforms": [
                    {
                        "an": f.an,
                        "l_ratio": str(ms.l_ratio(self.space, f)),
                        "petersson": str(ms.petersson_symbol(self.space, f)),
                    }
                    for f in self.eigenforms
                ],
            }
        )


_BASIS_CACHE: dict[tuple[int, int], SpectralBasis] = {}


def spectral_basis(p: int, Q: int = 20) -> SpectralBasis:
    """Basis of M_2(Gamma_0(p)) for a supported level; raises UnsupportedLevelError otherwise."""
    key = (p, Q)
    if key not in _BASIS_CACHE:
        forms = ms.supported_eigenforms(p, Q)
        _BASIS_CACHE[key] = SpectralBasis(p, Q, ms.build_space(p), eisenstein_series_E2p(p, Q), forms)
    return _BASIS_CACHE[key]


# ---------------------------------------------------------------------------
# winding element


@dataclass(frozen=True)
class WindingDecomposition:
    """{0, oo} = (24/(p-1)) omega_E - sum_f coeff_f * hat omega_f^+, where
    hat omega_f^+ = (pi / Omega^-) omega_f^+ has rational periods."""

    eisenstein: Fraction
    cusp: tuple[ms.PeriodSymbol, ...]
    cusp_raw: tuple[ms.PeriodSymbol, ...]

    def rational_cusp(self) -> list[Fraction]:
        return [c.rational_value() for c in self.cusp]


def _ipi() -> ms.PeriodSymbol:
    return ms.PeriodSymbol.make(1, i=1, pi=1)


def winding_decomposition(basis: SpectralBasis) -> WindingDecomposition:
    raw, pure = [], []
    hat = ms.PeriodSymbol.make(1, pi=-1, om_minus=1)  # Omega^- / pi
    for f in basis.eigenforms:
        coef = ms.winding_ratio(basis.space, f) / (_ipi() * ms.petersson_symbol(basis.space, f))
        raw.append(coef)
        c = coef * hat
        if not c.is_pure_rational():
            raise PeriodCancellationError(f"coefficient {c} of the winding element is not rational")
        pure.append(c)
    return WindingDecomposition(Fraction(24, basis.p - 1), tuple(pure), tuple(raw))


# ---------------------------------------------------------------------------
# periods of arbitrary classes
#
# A closed curve Z in Y_0(p) is recorded by its intersection functional F_Z on the relative
# space H_1(X_0(p), cusps) (Lefschetz duality).  The Eisenstein period is a homomorphism on
# H_1(Y_0(p)), not on H_1(X_0(p)), so it is read off F_Z rather than off the image class.


def loop_functional(space: ms.ModSymSpace, gamma: Sequence[int]) -> list[Fraction]:
    """F_Z in the dual coordinates of the relative basis."""
    phi = ms.crossing_functional(space, gamma)
    return [Fraction(phi[s]) for s in space.free_symbols]


@dataclass(frozen=True)
class _DualMaps:
    eisenstein: list[Fraction]  # int_Z omega_E = eisenstein . F_Z
    to_class: list[list[Fraction]]  # image class u = F_Z @ to_class


_DUAL_CACHE: dict[int, _DualMaps] = {}


def _dual_maps(space: ms.ModSymSpace) -> _DualMaps:
    if space.p in _DUAL_CACHE:
        return _DUAL_CACHE[space.p]
    rows, targets = [], []
    for g in ms._gamma0_generating_set(space.p, 2):
        rows.append(loop_functional(space, g))
        targets.append([eisenstein_period(g, space.p)] + ms.loop_class(space, g))
    k = space.dim
    aug = [r + t for r, t in zip(rows, targets)]
    R, piv = la.rref(aug)
    if piv[:k] != list(range(k)) or any(pc >= k for pc in piv):
        raise AssertionError("loop functionals do not determine the periods linearly")
    sol = [r[k:] for r in R[:k]]  # k x (1 + dim)
    out = _DualMaps([row[0] for row in sol], [row[1:] for row in sol])
    _DUAL_CACHE[space.p] = out
    return out


def eisenstein_period_of_functional(space: ms.ModSymSpace, F: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(_dual_maps(space).eisenstein, F)), Fraction(0))


def class_of_functional(space: ms.ModSymSpace, F: Sequence[Fraction]) -> list[Fraction]:
    return la.vecmat(list(F), _dual_maps(space).to_class)


def hecke_on_functional(space: ms.ModSymSpace, F: Sequence[Fraction], m: int) -> list[Fraction]:
    """(T_m Z) . v = Z . (T_m v), i.e. F_{T_m Z} = M_m F_Z."""
    return la.matvec(space.hecke_matrix(m), list(F))


def cusp_terms(basis: SpectralBasis, u: Sequence[Fraction]) -> list[ms.PeriodSymbol]:
    """(L(f,1)/(i pi ||f||^2)) int_u omega_f^+ for each newform, as period symbols."""
    dec = winding_decomposition(basis)
    out = []
    for raw, f in zip(dec.cusp_raw, basis.eigenforms):
        t = raw * ms.period_plus_integral(f, u)
        if not t.is_pure_rational():
            raise PeriodCancellationError(f"period product {t} is not rational")
        out.append(t)
    return out


def _assemble(basis: SpectralBasis, e_period: Fraction, terms: Sequence[ms.PeriodSymbol], Q: int) -> QSeries:
    if Q > basis.Q:
        raise InvalidInputError("basis precision is smaller than Q")
    p = basis.p
    out = eisenstein_series_E2p(p, Q).scale(Fraction(24, p - 1) * e_period)
    for t, f in zip(terms, basis.eigenforms):
        out = out - newform_qseries(f, Q).scale(SPECTRAL_CALIBRATION * t.rational_value())
    return out


def spectral_qexpansion_from_functional(basis: SpectralBasis, F: Sequence[Fraction], Q: int = 20) -> QSeries:
    """Lift of an arbitrary class of H_1(Y_0(p)) given by its intersection functional."""
    u = class_of_functional(basis.space, F)
    return _assemble(basis, eisenstein_period_of_functional(basis.space, F), cusp_terms(basis, u), Q)


def spectral_qexpansion(Z: ClosedGeodesic, basis: SpectralBasis | None = None, Q: int = 20) -> LiftResult:
    if basis is None:
        basis = spectral_basis(Z.p, max(Q, 20))
    if basis.p != Z.p:
        raise InvalidInputError("basis and cycle levels differ")
    seg = fundamental_segment(Z)
    u = ms.closed_geodesic_class(basis.space, Z)
    series = _assemble(basis, constant_term(seg), cusp_terms(basis, u), Q)
    return LiftResult(Z.p, Z.gamma, "spectral", series[0], series)


def component_coefficients(basis: SpectralBasis, Z: ClosedGeodesic) -> list[Fraction]:
    """Coordinates of the lift in the basis (E_2^(p), f_1, ..., f_r)."""
    u = ms.closed_geodesic_class(basis.space, Z)
    e = Fraction(24, basis.p - 1) * constant_term(fundamental_segment(Z))
    return [e] + [-SPECTRAL_CALIBRATION * t.rational_value() for t in cusp_terms(basis, u)]


# ---------------------------------------------------------------------------
# Hecke action and modularity


def hecke_action_qexp(f: QSeries, n: int, p: int) -> QSeries:
    """Weight-two T_n on q-expansions: a_k(T_n f) = sum_{d | (n,k), (d,p)=1} d a_{nk/d^2}(f)."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    prec = f.precision // n
    out = []
    for k in range(prec + 1):
        g = n if k == 0 else _gcd(n, k)
        out.append(sum((d * f[n * k // (d * d)] for d in divisors(g) if d % p), Fraction(0)))
    return QSeries.from_coeffs(out)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def hecke_equivariance_check(Z: ClosedGeodesic, m: int, basis: SpectralBasis | None = None, Q: int = 10) -> bool:
    """Lift of T_m Z (class-level Hecke action) equals T_m applied to the lift of Z."""
    if basis is None:
        basis = spectral_basis(Z.p, max(m * Q, 20))
    if m % basis.p == 0:
        raise UnsupportedError("m must be prime to the level")
    if basis.Q < m * Q:
        raise InvalidInputError("basis precision must be at least m * Q")
    F = hecke_on_functional(basis.space, loop_functional(basis.space, Z.gamma), m)
    lhs = spectral_qexpansion_from_functional(basis, F, Q)
    rhs = hecke_action_qexp(spectral_qexpansion(Z, basis, m * Q).coeffs, m, basis.p).truncate(Q)
    return lhs == rhs


class ModularityFit(NamedTuple):
    in_span: bool
    combination: tuple[Fraction, ...] | None
    implied_constant: Fraction | None


def modularity_fit(coeffs: QSeries, basis: SpectralBasis) -> ModularityFit:
    """Exact solve of coeffs[1..Q] against the basis; the constant term is then implied."""
    Q = coeffs.precision
    if Q < basis.dim + 5:
        raise InvalidInputError(f"need Q >= dim + 5 = {basis.dim + 5}")
    if Q > basis.Q:
        raise InvalidInputError("basis precision is smaller than the series precision")
    cols = [s.truncate(Q) for s in basis.series()]
    rows = [[c[n] for c in cols] + [coeffs[n]] for n in range(1, Q + 1)]
    R, piv = la.rref(rows)
    k = len(cols)
    if k in piv:
        return ModularityFit(False, None, None)
    sol = [Fraction(0)] * k
    for row, pc in zip(R, piv):
        sol[pc] = row[k]
    const = sum((x * c[0] for x, c in zip(sol, cols)), Fraction(0))
    return ModularityFit(True, tuple(sol), const)

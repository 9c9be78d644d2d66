from fractions import Fraction

import pytest

from eistheta.core_arith import InvalidInputError, QSeries
from eistheta.lattice_cycles import UnsupportedError, automorph
from eistheta.modsym import UnsupportedLevelError
from eistheta.spectral_lift import (
    component_coefficients,
    eisenstein_series_E2p,
    hecke_action_qexp,
    hecke_equivariance_check,
    modularity_fit,
    spectral_basis,
    spectral_qexpansion,
    winding_decomposition,
)
from eistheta.geometric_lift import geometric_qexpansion


def test_e2p_examples():
    e = eisenstein_series_E2p(11, 12)
    assert e[0] == Fraction(5, 12)
    assert e[1] == 1 and e[4] == 7 and e[11] == 1


def test_winding_decomposition():
    w11 = winding_decomposition(spectral_basis(11))
    assert w11.eisenstein == Fraction(12, 5)
    assert len(w11.cusp) == 1
    w37 = winding_decomposition(spectral_basis(37))
    basis = spectral_basis(37)
    by_a2 = {f.a(2): c for f, c in zip(basis.eigenforms, w37.rational_cusp())}
    assert by_a2[-2] == 0  # rank-one form has vanishing central value
    assert by_a2[0] != 0


def test_modularity_fit_examples():
    basis = spectral_basis(11)
    fit = modularity_fit(basis.e2p, basis)
    assert fit.in_span and fit.combination == (1, 0) and fit.implied_constant == Fraction(5, 12)
    bad = list(basis.e2p.coeffs)
    bad[3] += 1
    assert not modularity_fit(QSeries.from_coeffs(bad), basis).in_span
    with pytest.raises(InvalidInputError):
        modularity_fit(basis.e2p.truncate(3), basis)


def test_hecke_on_eisenstein():
    e = eisenstein_series_E2p(11, 40)
    assert hecke_action_qexp(e, 2, 11) == e.truncate(20).scale(3)
    assert hecke_action_qexp(e, 3, 11) == e.truncate(13).scale(4)


@pytest.mark.parametrize("p, disc", [(11, 12), (11, 44), (37, 120)])
def test_hecke_equivariance(p, disc):
    Z = automorph(disc, p)
    basis = spectral_basis(p, 40)
    for m in (2, 3):
        assert hecke_equivariance_check(Z, m, basis, Q=10)
    with pytest.raises(UnsupportedError):
        hecke_equivariance_check(Z, p, basis, Q=2)


@pytest.mark.parametrize("p, disc", [(11, 12), (11, 45), (37, 120), (37, 136)])
def test_routes_agree(p, disc):
    Z = automorph(disc, p)
    spec = spectral_qexpansion(Z, Q=20)
    geo = geometric_qexpansion(Z, p, Q=20)
    assert spec.coeffs == geo.coeffs


def test_component_coefficients_reconstruct():
    basis = spectral_basis(37)
    Z = automorph(120, 37)
    comps = component_coefficients(basis, Z)
    total = sum((s.scale(c) for s, c in zip(basis.series(), comps)), QSeries.zero(20))
    assert total == spectral_qexpansion(Z, basis).coeffs


@pytest.mark.parametrize("p", [13, 23])
def test_unsupported_level(p):
    with pytest.raises(UnsupportedLevelError):
        spectral_basis(p)

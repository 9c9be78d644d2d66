from fractions import Fraction

import numpy as np
import pytest

from eistheta.geometric_lift import (
    LiftResult,
    NotHyperbolicError,
    QuadSurd,
    constant_term,
    crossing_certificates,
    crossing_number,
    e2p_numeric,
    fundamental_segment,
    geometric_qexpansion,
    is_odd,
    rademacher_phi,
)
from eistheta.lattice_cycles import ClosedGeodesic, automorph, make_odd_test_function, make_test_function_gamma0
from eistheta.spectral_lift import modularity_fit, spectral_basis
from eistheta.theta_numeric import tanh_sinh

Z11 = automorph(12, 11)
EXPECTED_11 = [0, 1, 1, 1, 1, 2, 2, 3, 3, 4, 0, 6, 2, 4, 5, 7, 4, 7, 4, 8]


def test_reference_cycle_expansion():
    res = geometric_qexpansion(Z11, 11)
    assert Z11.gamma == (-3, -2, 11, 7)
    assert res.constant == Fraction(1, 12)
    assert list(res.coeffs.coeffs[1:21]) == EXPECTED_11[:20]


def test_quadsurd_arithmetic():
    r = QuadSurd(Fraction(0), Fraction(1), 12)
    assert r * r == QuadSurd.rational(12, 12)
    assert (r + 1) * (r - 1) == QuadSurd.rational(11, 12)
    assert (r.inverse() * r) == QuadSurd.rational(1, 12)
    assert r.sign() == 1 and (-r).sign() == -1
    assert abs(float(r) - 12**0.5) < 1e-15


@pytest.mark.parametrize("t0sq", [Fraction(1), Fraction(2), Fraction(1, 3), Fraction(7, 5)])
def test_base_point_independence(t0sq):
    seg = fundamental_segment(Z11)
    moved = seg.with_base_point(t0sq)
    for n in range(1, 11):
        assert crossing_number(moved, n) == crossing_number(seg, n)
    with pytest.raises(ValueError):
        seg.with_base_point(0)


def test_box_scale_saturated():
    seg = fundamental_segment(automorph(44, 11))
    for n in range(1, 11):
        assert crossing_number(seg, n, box_scale=2.0) == crossing_number(seg, n)


@pytest.mark.parametrize("delta", [(1, 1, 0, 1), (1, 0, 11, 1), (2, 1, 11, 6)])
def test_conjugation_invariance(delta):
    base = geometric_qexpansion(Z11, 11, Q=12)
    moved = geometric_qexpansion(Z11.conjugate(delta), 11, Q=12)
    assert moved.coeffs == base.coeffs


def test_inverse_negates():
    base = geometric_qexpansion(Z11, 11, Q=10)
    inv = geometric_qexpansion(Z11.inverse(), 11, Q=10)
    assert inv.coeffs == base.coeffs.scale(-1)


def test_crossing_certificates_are_exact():
    seg = fundamental_segment(Z11)
    certs = crossing_certificates(seg, 5, make_test_function_gamma0(11, 2), 1.0)
    assert sum(c.sign * c.weight for c in certs) == crossing_number(seg, 5)
    for c in certs:
        assert c.sign in (-1, 1)
        v1, v2, w1, w2 = c.vector
        assert v1 * w1 + v2 * w2 == 5


@pytest.mark.parametrize("p, disc", [(11, 12), (37, 120)])
def test_odd_test_function_gives_zero(p, disc):
    chi = make_odd_test_function(p)
    assert all(is_odd(make_odd_test_function(q)) for q in (3, 5, 13))
    res = geometric_qexpansion(automorph(disc, p), p, chi=chi, Q=10)
    assert all(c == 0 for c in res.coeffs.coeffs)


@pytest.mark.parametrize("disc", [12, 44, 45, 60, 92])
def test_geometric_lift_is_modular(disc):
    basis = spectral_basis(11, 20)
    res = geometric_qexpansion(automorph(disc, 11), 11)
    fit = modularity_fit(res.coeffs, basis)
    assert fit.in_span
    assert fit.implied_constant == res.constant


@pytest.mark.parametrize("disc", [12, 44, 60])
def test_constant_term_matches_numeric_period(disc):
    Z = automorph(disc, 11)
    seg = fundamental_segment(Z)
    a, b, c, d = Z.gamma
    z0 = seg.z0
    z1 = (a * z0 + b) / (c * z0 + d)
    val, _ = tanh_sinh(lambda t: np.array([e2p_numeric(z0 + t * (z1 - z0), 11) * (z1 - z0)]), 0.0, 1.0, 200, 1e-12)
    assert abs(complex(val[0]) - float(constant_term(seg))) < 1e-8


def test_rademacher_phi_translation():
    assert rademacher_phi((1, 5, 0, 1)) == 5
    assert rademacher_phi((-1, -5, 0, -1)) == 5


def test_non_hyperbolic_rejected():
    with pytest.raises(NotHyperbolicError):
        fundamental_segment((1, 1, 0, 1), 11)


def test_lift_result_json_roundtrip():
    res = geometric_qexpansion(Z11, 11, Q=8)
    back = LiftResult.from_json(res.to_json())
    assert back == res
    assert isinstance(ClosedGeodesic(back.gamma, back.p), ClosedGeodesic)


def test_quadsurd_float_without_cancellation():
    # 10657 - 73 sqrt(21312) ~ 4.69e-5 loses eight digits if evaluated naively
    x = QuadSurd(Fraction(10657), Fraction(-73), 21312)
    assert abs(float(x) * (10657 + 73 * 21312**0.5) - 1) < 1e-14


def test_crossing_on_segment_start_is_kept():
    # level divides the discriminant; a special cycle meets the axis exactly at the default base point
    Z = automorph(37, 37)
    seg = fundamental_segment(Z)
    geo = geometric_qexpansion(Z, 37, Q=12)
    for t0sq in (Fraction(1), Fraction(1, 3)):
        moved = seg.with_base_point(t0sq)
        assert [crossing_number(moved, n) for n in range(1, 13)] == list(geo.coeffs.coeffs[1:])
    assert modularity_fit(geo.coeffs, spectral_basis(37, 20)).in_span

import math
import random

import numpy as np
import pytest

from eistheta import theta_numeric as tn
from eistheta.lattice_cycles import make_point_test_function, make_test_function_gamma0, make_unit_test_function

CHI1 = make_point_test_function(3, (1,))
CHI2 = make_test_function_gamma0(3, 2)


def _rotation(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def test_poisson_summation_random_points():
    rng = random.Random(2)
    spec = tn.TruncationSpec(eps=1e-10)
    for i in range(6):
        if i % 2:
            z, chi = tn.SymSpacePoint(1, math.exp(rng.uniform(-0.5, 0.5))), CHI1
        else:
            z = tn.SymSpacePoint(2, math.exp(rng.uniform(-0.3, 0.3)), rng.uniform(-0.5, 0.5), math.exp(rng.uniform(-0.3, 0.3)))
            chi = CHI2
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 1.5))
        a, sa = tn.theta_sum(z, tau, chi, spec, variant="direct")
        b, sb = tn.theta_sum(z, tau, chi, spec, variant="dual")
        assert sa.certified() and sb.certified()
        assert a.max_abs_diff(b) <= 2 * spec.eps


def test_psi_poisson_summation():
    z, tau = tn.SymSpacePoint(2, 0.9, 0.2, 1.1), 0.1 + 0.8j
    spec = tn.TruncationSpec(eps=1e-10)
    a, _ = tn.theta_sum(z, tau, CHI2, spec, form="psi")
    b, _ = tn.theta_sum(z, tau, CHI2, spec, variant="dual", form="psi")
    assert a.degree == 1 and a.max_abs_diff(b) <= 2 * spec.eps


def test_rapid_decay_as_u_shrinks():
    tau = 0.2 + 0.9j
    norms = [tn.theta_sum(tn.SymSpacePoint(2, u, 0.2, 0.9), tau, CHI2)[0].norm() for u in (0.5, 0.25, 0.125)]
    # norm <= C u^3 with C fixed by the first point
    C = norms[0] / 0.5**3
    for u, n in zip((0.25, 0.125), norms[1:]):
        assert n <= C * u**3


def test_translation_periodicity():
    z = tn.SymSpacePoint(2, 1.1, 0.2, 0.9)
    a, _ = tn.theta_sum(z, 0.2 + 0.9j, CHI2)
    b, _ = tn.theta_sum(z, 1.2 + 0.9j, CHI2)
    assert a.max_abs_diff(b) < 1e-12


def test_rotation_leaves_weighted_dual_sum_unchanged():
    g, tau = tn.SymSpacePoint(2, 1.1, 0.2, 0.9).g(), 0.1 + 1.1j
    base, _ = tn.theta_coefficients(g, tau, CHI2, variant="dual")
    for theta in (0.3, 1.0, 2.5):
        rot, _ = tn.theta_coefficients(g, tau, CHI2, variant="dual", h=tn.h_tau(tau) @ _rotation(theta))
        assert max(abs(rot[s] - base[s]) for s in base) < 1e-12
    with pytest.raises(tn.InvalidInputError):
        tn.theta_coefficients(g, tau, CHI2, variant="dual", h=2 * tn.h_tau(tau))


def test_level_invariance_in_the_space_variable():
    g, tau = tn.SymSpacePoint(2, 1.1, 0.2, 0.9).g(), 0.2 + 0.9j
    base, _ = tn.theta_coefficients(g, tau, CHI2)
    diff = lambda gam: max(abs(v - base[s]) for s, v in tn.theta_coefficients(np.array(gam, float) @ g, tau, CHI2)[0].items())
    for gam in ([[1, 0], [3, 1]], [[2, 1], [3, 2]], [[1, 1], [0, 1]], [[-1, 0], [0, -1]]):
        assert diff(gam) < 1e-12
    assert diff([[1, 0], [1, 1]]) > 1e-3  # not in the level group


def test_modular_transformation_in_tau():
    z, tau = tn.SymSpacePoint(2, 1.1, 0.2, 0.9), -0.3 + 0.6j
    a, _ = tn.theta_sum(z, tau, CHI2)
    for A, B, C, D in ((1, 0, 3, 1), (4, 1, 3, 1)):
        j = C * tau + D
        b, _ = tn.theta_sum(z, (A * tau + B) / j, CHI2)
        assert b.max_abs_diff(a.scale(j**2)) < 1e-10


def test_fixed_radius_and_truncation_error():
    z, tau = tn.SymSpacePoint(2, 1.1, 0.2, 0.9), 0.2 + 0.9j
    with pytest.raises(tn.TruncationError) as info:
        tn.theta_sum(z, tau, CHI2, tn.TruncationSpec(radius=0.5, eps=1e-10))
    assert info.value.suggested_radius > 0.5
    auto, spec = tn.theta_sum(z, tau, CHI2, tn.TruncationSpec(eps=1e-10))
    fixed, _ = tn.theta_sum(z, tau, CHI2, tn.TruncationSpec(radius=spec.radius + 1, eps=1e-10))
    assert fixed.max_abs_diff(auto) < 1e-10


def test_input_errors():
    z = tn.SymSpacePoint(2, 1.0)
    with pytest.raises(tn.InvalidInputError):
        tn.theta_sum(z, 0.05j + 0.2, CHI2)
    with pytest.raises(tn.InvalidInputError):
        tn.theta_sum(tn.SymSpacePoint(1, 1.0), 1j, CHI2)
    with pytest.raises(tn.InvalidInputError):
        tn.theta_coefficients(z.g(), 1j, CHI2, variant="sideways")
    assert make_unit_test_function(3, 2)((0, 0, 0, 0)) == 0


def test_tanh_sinh_quadrature():
    val, n = tn.tanh_sinh(lambda x: np.array([math.exp(-x * x)]), -6.0, 6.0, 200, 1e-12)
    assert abs(val[0] - math.sqrt(math.pi)) < 1e-12 and n >= 200
    val, _ = tn.tanh_sinh(lambda x: np.array([math.sqrt(x), x**3]), 0.0, 1.0)
    assert np.allclose(val, [2 / 3, 1 / 4], atol=1e-9)
    with pytest.raises(tn.QuadratureError):
        tn.tanh_sinh(lambda x: np.array([math.sin(200 * x)]), 0.0, 50.0, 8, 1e-14, max_doublings=1)

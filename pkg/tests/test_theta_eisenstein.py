import math

import numpy as np
import pytest

from eistheta import theta_numeric as tn
from eistheta.lattice_cycles import make_point_test_function, make_test_function_gamma0, make_unit_test_function

CHI1 = make_point_test_function(3, (1,))
CHI2 = make_test_function_gamma0(3, 2)


def test_lambda_constant():
    assert abs(tn.eisenstein_lambda(2, 0) - 1 / (2 * math.pi**2)) < 1e-15
    assert abs(tn.eisenstein_lambda(1, 2) - 1j / (2 * math.pi**2)) < 1e-15


@pytest.mark.parametrize("K, degrees", [(4.5, [(2, 0), (1, 1)]), (6.0, [(0, 2)])])
def test_ewald_split_matches_direct_sum(K, degrees):
    A = tn._eisenstein_matrix(tn.SymSpacePoint(2, 1.0, 0.3, 1.2).g1(), 0.2 + 1.1j)
    table = tn._table(CHI2)
    ewald = tn.harmonic_epstein(A, table, degrees, K, eps=1e-12)
    _, Y, w = tn._lattice_points(A, table, 60.0)
    r2 = np.sum(Y * Y, axis=1)
    keep = r2 > 0
    for d, value in zip(degrees, ewald):
        brute = np.sum(w[keep] * tn._harmonic_h(Y[keep], d) * r2[keep] ** (-K))
        # shell tail beyond radius 60 is below 1e-7 for these exponents
        assert abs(brute - value) < 1e-7 * max(1.0, abs(value))


def test_domain_errors():
    g1 = np.eye(2)
    with pytest.raises(tn.DomainError):
        tn.eisenstein_scalars(g1, 1j, 2.0, CHI2)
    with pytest.raises(tn.DomainError):
        tn.harmonic_epstein(np.eye(4), tn._table(CHI2), [(1, 1)], 2.0)
    with pytest.raises(tn.DomainError):
        tn.weight_one_eisenstein(1j, 0.3, 1.0)
    with pytest.raises(tn.DomainError):
        tn.weight_one_eisenstein(1j, 1 + 1j, 2.0)
    with pytest.raises(tn.TruncationError):
        tn.weight_one_eisenstein(1j, 0.3, 1.01, tol=1e-12)


def test_one_dimensional_eisenstein_series():
    # N = 1: Gamma(1 + s/2) i / (2 pi^{1 + s/2}) sum F2(chi)(v, -w) y^{s/2} / ((v tau + w) |v tau + w|^s)
    s, tau = 3.0, 0.2 + 1.1j
    got = tn.eisenstein_eval(tn.SymSpacePoint(1, 1.0), tau, s, CHI1)[()]
    F2 = tn._f2_cached(CHI1)
    m, p = 9, 3
    total = 0j
    for (kv, kw), wt in F2.values.items():
        if not wt:
            continue
        v0, w0 = kv / p, (-kw % m) / p
        for a in range(-120, 121):
            for b in range(-120, 121):
                zeta = (v0 + p * a) * tau + (w0 + p * b)
                if abs(zeta) > 1e-12:
                    total += complex(wt) / (zeta * abs(zeta) ** s)
    pref = math.gamma(1 + s / 2) * 1j / (2 * math.pi ** (1 + s / 2)) * tau.imag ** (s / 2)
    assert abs(got - pref * total) < 1e-5 * abs(got)


def test_pushforward_one_dimensional():
    z, tau = tn.SymSpacePoint(1, 1.0), 0.1 + 0.9j
    lhs, spec = tn.pushforward_u(z, tau, CHI1, 2.0, tn.TruncationSpec(eps=1e-9))
    assert spec.tail_bound is not None and spec.tail_bound < 1e-9
    assert lhs.rel_diff(tn.eisenstein_eval(z, tau, 2.0, CHI1)) < 1e-6


def test_pushforward_conjugate_parameter():
    z, tau = tn.SymSpacePoint(1, 1.0), 1.2j
    a, _ = tn.pushforward_u(z, tau, CHI1, 2.5 + 0.7j, tn.TruncationSpec(eps=1e-9))
    b, _ = tn.pushforward_u(z, tau, CHI1, 2.5 - 0.7j, tn.TruncationSpec(eps=1e-9))
    assert a.max_abs_diff(b.conjugate()) < 1e-9


def test_pushforward_two_dimensional_single_point():
    z, tau = tn.SymSpacePoint(2, 1.0, -0.4, 0.8), 0.3 + 0.7j
    lhs, _ = tn.pushforward_u(z, tau, CHI2, 4.0, tn.TruncationSpec(eps=1e-9))
    rhs = tn.eisenstein_eval(z, tau, 4.0, CHI2)
    assert rhs.norm() > 1e-3
    assert lhs.rel_diff(rhs) < 1e-6


def test_weight_one_eisenstein_oddness():
    for tau in (1j, 0.5 + 1.5j):
        for lam0 in (0.3 + 0.1j, (tau + 2) / 5):
            a, ta = tn.weight_one_eisenstein(tau, lam0, 4.0)
            b, tb = tn.weight_one_eisenstein(tau, -lam0, 4.0)
            assert abs(a + b) < 1e-9 and ta < 1e-9 and tb < 1e-9
            shifted, _ = tn.weight_one_eisenstein(tau, lam0 + 1 + tau, 4.0)
            assert abs(shifted - a) < 1e-9


def test_torus_constant():
    for N, s in ((1, 3.0), (2, 8.0)):
        expected = (-1) ** (N - 1) * 1j**N * math.gamma(1 + s / (2 * N)) ** N / (2**N * math.pi ** (N + s / 2))
        assert abs(tn.torus_lambda_prime(N, s) - expected) < 1e-15


def test_product_side_guards():
    with pytest.raises(tn.DomainError, match="cancels"):
        tn.torus_product_check(3, make_unit_test_function(3, 2), 1j)
    with pytest.raises(tn.UnsupportedNError):
        tn.torus_product_check(3, CHI1, 1j)
    with pytest.raises(tn.DomainError):
        tn.torus_product_check(3, make_point_test_function(3, (1, 1)), 1j, s0=2.0)
    with pytest.raises(tn.InvalidInputError):
        tn.torus_product_check(3, make_point_test_function(3, (1, 1)), 1j, Q=[[2, 0], [0, 1]])

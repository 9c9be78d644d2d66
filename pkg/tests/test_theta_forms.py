import math
import random

import numpy as np
import pytest

from eistheta import theta_numeric as tn


def _random_points(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        z = tn.SymSpacePoint(2, math.exp(rng.uniform(-0.5, 0.5)), rng.uniform(-1, 1), math.exp(rng.uniform(-0.5, 0.5)))
        yield z, [rng.uniform(-1, 1) for _ in range(4)]


def test_point_validation():
    with pytest.raises(tn.InvalidInputError):
        tn.SymSpacePoint(2, -1.0)
    with pytest.raises(tn.InvalidInputError):
        tn.SymSpacePoint(2, 1.0, 0.0, float("nan"))
    with pytest.raises(tn.UnsupportedNError):
        tn.SymSpacePoint(3, 1.0)
    z = tn.SymSpacePoint(2, 1.3, 0.4, 0.7)
    assert np.allclose(z.z(), z.z().T) and np.all(np.linalg.eigvalsh(z.z()) > 0)
    assert tn.SymSpacePoint.from_coords(2, z.coords()) == z


def test_form_value_shape():
    with pytest.raises(tn.InvalidInputError):
        tn.FormValue(2, 1, {("a",): 1, ("b",): 0, ("u",): 0, ("x",): 0})
    fv = tn.FormValue(2, 2)
    assert len(fv.components) == 3


def test_lambda_form():
    (row,) = tn.lambda_form(tn.SymSpacePoint(1, 2.0))
    assert row[0].components == {("u",): 1}
    lam = tn.lambda_form(tn.SymSpacePoint(2, 1.4, 0.3, 0.8))
    for i in range(2):
        for j in range(2):
            assert lam[i][j][("u",)] == (1 if i == j else 0)
    assert lam[0][1].max_abs_diff(lam[1][0]) == 0


def test_psi_one_dimensional_formula():
    for u, v, w in ((1.3, 0.4, 0.9), (0.7, -0.2, 0.5), (2.0, 1.0, -1.0)):
        expected = (v / u + u * w) * math.exp(-math.pi * (v / u - u * w) ** 2)
        got = tn.psi0_eval(tn.SymSpacePoint(1, u), [v, w])[()]
        assert abs(got - expected) < 1e-14
        # for N = 1 the contraction gives phi = -psi du/u with our sign convention
        assert abs(tn.phi0_eval(tn.SymSpacePoint(1, u), [v, w])[("u",)] + expected) < 1e-14


def test_phi_at_zero_vector():
    assert tn.phi0_eval(tn.SymSpacePoint(1, 1.7), [0, 0]).norm() == 0
    val = tn.phi0_eval(tn.SymSpacePoint(2, 1.2, 0.1, 0.9), [0, 0, 0, 0])
    assert math.isfinite(val.norm()) and val.norm() > 0


def test_closedness_and_transgression():
    worst = 0.0
    for z, v in _random_points(10, 11):
        worst = max(worst, tn.closedness_residual(z, v))
        res = tn.transgression_checks(z, v)
        worst = max(worst, res["max"])
        for t in (0.5, 2.0):
            worst = max(worst, tn.transgression_checks(z, v, t=t)["max"])
    assert worst <= 1e-6


def test_one_dimensional_alpha_identity():
    # N = 1: alpha is a function and d alpha(sqrt t v) = t d/dt phi(sqrt t v) reads u d/du alpha = t d/dt phi_u
    v, h = [0.3, 0.8], 1e-4
    for u in (0.8, 1.3):
        for t in (0.7, 1.0):
            sv = [math.sqrt(t) * x for x in v]
            da = (tn.alpha0_eval(tn.SymSpacePoint(1, u * math.exp(h)), sv)[()]
                  - tn.alpha0_eval(tn.SymSpacePoint(1, u * math.exp(-h)), sv)[()]) / (2 * h)
            phi = lambda tt: tn.phi0_eval(tn.SymSpacePoint(1, u), [math.sqrt(tt) * x for x in v])[("u",)]
            dphi = t * (phi(t + h) - phi(t - h)) / (2 * h)
            assert abs(da - dphi) < 1e-6


def test_finite_differences_are_second_order():
    z, v = next(_random_points(1, 5))
    r1 = tn.closedness_residual(z, v, h=1e-2, richardson=False)
    r2 = tn.closedness_residual(z, v, h=5e-3, richardson=False)
    assert 3.5 < r1 / r2 < 4.5
    a1 = tn.transgression_checks(z, v, h=1e-2, richardson=False)["alpha"]
    a2 = tn.transgression_checks(z, v, h=5e-3, richardson=False)["alpha"]
    assert 3.5 < a1 / a2 < 4.5


def test_transgression_errors():
    with pytest.raises(tn.UnsupportedNError):
        tn.transgression_checks(tn.SymSpacePoint(1, 1.0), [0.1, 0.2])
    with pytest.raises(tn.InvalidInputError):
        tn.transgression_checks(tn.SymSpacePoint(2, 1.0), [0.1, 0.2, 0.3, 0.4], t=0)


def test_weil_scaling_at_i():
    z = tn.SymSpacePoint(2, 1.1, -0.3, 1.4)
    v = [0.2, 0.5, -0.4, 0.3]
    B = v[0] * v[2] + v[1] * v[3]
    got = tn.weil_scaled_phi(z, v, 1j)
    assert got.max_abs_diff(tn.phi0_eval(z, v).scale(math.exp(-2 * math.pi * B))) < 1e-15
    tau = 0.3 + 2.0j
    scaled = tn.weil_scaled_phi(z, v, tau)
    plain = tn.phi0_eval(z, [math.sqrt(2.0) * x for x in v]).scale(2.0)
    assert abs(scaled.norm() - plain.norm() * math.exp(-2 * math.pi * 2.0 * B)) < 1e-14
    with pytest.raises(tn.InvalidInputError):
        tn.weil_scaled_phi(z, v, -1j)


@pytest.mark.parametrize("degrees", [(1,), (2, 0), (1, 1), (0, 2)])
def test_partial_fourier_transform_closed_form(degrees):
    N = len(degrees)
    grid = np.linspace(-6, 6, 241 if N == 2 else 2401)
    dw = grid[1] - grid[0]
    W = np.stack(np.meshgrid(*([grid] * N), indexing="ij"), axis=-1).reshape(-1, N)
    rng = np.random.default_rng(3)
    for v, xi in [(np.zeros(N), np.zeros(N))] + [(rng.uniform(-0.6, 0.6, N), rng.uniform(-0.6, 0.6, N)) for _ in range(2)]:
        vals = tn._phi_sigma(np.tile(v, (W.shape[0], 1)), W, degrees)
        numeric = np.sum(vals * np.exp(2j * math.pi * W @ xi)) * dw**N
        closed = tn._f2_phi_sigma(v[None, :], xi[None, :], degrees)[0]
        assert abs(numeric - closed) < 1e-9
        if not v.any() and not xi.any():
            assert abs(closed) == 0

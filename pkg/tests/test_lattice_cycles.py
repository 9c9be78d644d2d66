import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from eistheta.core_arith import InvalidInputError, divisors
from eistheta.lattice_cycles import (
    EmptyCycleError,
    HalfFunction,
    NotHyperbolicError,
    NotRepresentedError,
    TestFunction,
    UnsupportedError,
    all_keys,
    automorph,
    brute_force_orbits,
    finite_fourier_transform_2,
    geodesic_from_vector,
    hermitian_inner,
    integral_indicator,
    is_good,
    is_good_for,
    make_point_test_function,
    make_test_function_gamma0,
    make_unit_test_function,
    normal_form,
    orbit_representatives,
    special_cycle_components_n2,
    test_function_from_split as split_function,
    ClosedGeodesic,
)


def _random_function(p, N, seed):
    rng = random.Random(seed)
    vals = {k: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for k in all_keys(N, p)}
    return TestFunction(N, p, "pZ^(2N)", vals)


def test_gamma0_function_values():
    chi = make_test_function_gamma0(11, 2)
    assert chi((1, 0, 0, 1)) == 1
    assert chi((11, 0, 0, 1)) == 0
    assert chi((0, 0, 0, 0)) == 0
    assert chi((Fraction(1, 3), 0, 0, 1)) == 0  # outside the dual lattice
    assert chi.good_for_constant_term


def test_fourier_of_delta_at_zero_is_constant():
    p, N = 3, 1
    chi1 = HalfFunction(N, p, {(p,): Fraction(1)})
    chi2 = HalfFunction(N, p, {(0,): Fraction(1)})
    F = finite_fourier_transform_2(split_function(chi1, chi2))
    for w in range(p * p):
        assert F.at_key((p, w)) == Fraction(1, p**N)


def test_double_transform_reflects_w():
    p, N = 3, 1
    chi = _random_function(p, N, 1)
    FF = finite_fourier_transform_2(finite_fourier_transform_2(chi))
    m = p * p
    for k in all_keys(N, p):
        kv, kw = k[:N], k[N:]
        target = complex(chi.at_key(kv + tuple(-x % m for x in kw)))
        assert abs(complex(FF.at_key(k)) - target) < 1e-12


def test_split_transform_is_product():
    p = 3
    chi = make_test_function_gamma0(p, 2)
    F = finite_fourier_transform_2(chi)
    chi1, chi2 = chi.split
    hat2 = chi2.fourier()
    for k in all_keys(2, p):
        assert F.at_key(k) == chi1(k[:2]) * hat2(k[2:])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_fourier_unitary(p):
    a, b = _random_function(p, 1, 2), _random_function(p, 1, 3)
    Fa, Fb = finite_fourier_transform_2(a), finite_fourier_transform_2(b)
    assert abs(hermitian_inner(Fa, Fb) - hermitian_inner(a, b)) < 1e-10


def test_orbit_examples():
    assert [r.as_row() for r in orbit_representatives(2, 2)] == [(1, 2, 0), (1, 2, 1), (2, 1, 0)]
    assert len(orbit_representatives(1, 6)) == 4
    assert len(orbit_representatives(3, 2)) == 5
    with pytest.raises(InvalidInputError):
        orbit_representatives(2, 0)


@pytest.mark.parametrize("N", [2, 3])
def test_orbit_representatives_match_brute_force(N):
    for n in range(1, 7):
        assert set(orbit_representatives(N, n)) == brute_force_orbits(N, n)


def test_orbit_counts():
    for N in (1, 2, 3):
        for n in range(1, 13):
            reps = orbit_representatives(N, n)
            assert len(reps) == len(set(reps)) == sum(d ** (N - 1) for d in divisors(n))
            assert all(r.D * r.w1 == n and all(0 <= x < r.w1 for x in r.r) for r in reps)


def test_normal_form_is_invariant():
    v, w = (2, 3), (1, 0)
    base = normal_form(v, w)
    g = [[2, 1], [1, 1]]  # SL_2(Z); v -> g v, w -> g^{-T} w keeps B(v, w)
    gv = tuple(sum(g[i][j] * v[j] for j in range(2)) for i in range(2))
    ginvT = [[1, -1], [-1, 2]]
    gw = tuple(sum(ginvT[i][j] * w[j] for j in range(2)) for i in range(2))
    assert normal_form(gv, gw) == base


def test_special_cycle_examples():
    chi = make_test_function_gamma0(11, 2)
    c2 = special_cycle_components_n2(11, chi, 2)
    assert Counter(comp.vertical_at for comp in c2.components) == Counter({Fraction(0): 2, Fraction(1, 2): 1})
    c11 = special_cycle_components_n2(11, chi, 11)
    assert sorted(comp.vertical_at for comp in c11.components) == [Fraction(b, 11) for b in range(11)]
    c1 = special_cycle_components_n2(11, chi, 1)
    assert [comp.vertical_at for comp in c1.components] == [Fraction(0)]
    assert all(comp.weight == 1 for comp in c2.components)
    with pytest.raises(UnsupportedError):
        special_cycle_components_n2(11, make_unit_test_function(11, 2), 2)


def test_special_cycle_shift_symmetry():
    chi = make_test_function_gamma0(11, 2)
    for n in range(1, 13):
        cyc = special_cycle_components_n2(11, chi, n)
        base = Counter((dp, b % dp) for _, dp, b in cyc.reps)
        shifted = Counter((dp, (b + dp) % dp) for _, dp, b in cyc.reps)
        assert base == shifted


def test_geodesic_from_vector():
    g = geodesic_from_vector((1, 1, 1, 1))
    assert g.kind == "semicircle" and g.abc == (1, 0, -1)
    assert {g.start, g.end} == {Fraction(-1), Fraction(1)}
    assert g.discriminant() == 4
    v = geodesic_from_vector((1, 0, 2, 1))
    assert v.kind == "vertical" and v.vertical_at == Fraction(-1, 2)
    with pytest.raises(EmptyCycleError):
        geodesic_from_vector((1, 0, -1, 0))


def test_geodesic_discriminant_identity():
    rng = random.Random(4)
    checked = 0
    while checked < 200:
        v = [rng.randint(-6, 6) for _ in range(4)]
        n = v[0] * v[2] + v[1] * v[3]
        if n <= 0 or v[1] == 0 or v[2] == 0:
            continue
        assert geodesic_from_vector(v).discriminant() == n * n
        checked += 1


def test_goodness():
    delta0 = split_function(HalfFunction(2, 3, {(0, 0): Fraction(1)}), integral_indicator(2, 3))
    assert not is_good(delta0)
    chi = make_test_function_gamma0(11, 2)
    assert is_good(chi)
    ident = [[1, 0], [0, 1]]
    for tf in (chi, delta0, make_point_test_function(3, (1, 1))):
        assert is_good_for(ident, tf) == is_good(tf)
    with pytest.raises(UnsupportedError):
        is_good(_random_function(3, 1, 0))


def test_automorph_examples():
    g = automorph(5, 1)
    a, b, c, d = g.gamma
    assert abs(a + d) == 3 and (a + d) ** 2 - 4 == 5
    z = automorph(12, 11)
    a, b, c, d = z.gamma
    t2 = (a + d) ** 2 - 4
    assert c % 11 == 0 and a * d - b * c == 1
    k2 = t2 // 12
    assert t2 % 12 == 0 and math.isqrt(k2) ** 2 == k2 and k2 >= 1
    for D in (12, 44, 45, 60, 92):
        assert abs(sum(automorph(D, 11).gamma[::3])) > 2


def test_automorph_errors():
    with pytest.raises(InvalidInputError):
        automorph(16, 11)
    with pytest.raises(InvalidInputError):
        automorph(7, 11)
    with pytest.raises(NotRepresentedError):
        automorph(5, 13)
    with pytest.raises(NotHyperbolicError):
        ClosedGeodesic((1, 1, 0, 1), 11)


def test_test_function_json_roundtrip_shape():
    chi = make_test_function_gamma0(3, 2)
    data = chi.to_json()
    assert data["N"] == 2 and data["p"] == 3 and data["lattice"] == "gamma0_example"
    rebuilt = {tuple(k): Fraction(*v) for k, v in data["values"]}
    assert rebuilt == {k: v for k, v in chi.values.items()}

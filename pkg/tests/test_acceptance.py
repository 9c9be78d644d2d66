"""The ten acceptance criteria at their stated tolerances; each prints one PASS/FAIL line."""

import math
import random
from functools import lru_cache


from eistheta import theta_numeric as tn
from eistheta.core_arith import divisors
from eistheta.geometric_lift import constant_term, fundamental_segment, geometric_qexpansion
from eistheta.lattice_cycles import (
    automorph,
    brute_force_orbits,
    make_odd_test_function,
    make_point_test_function,
    make_test_function_gamma0,
    orbit_representatives,
)
from eistheta.spectral_lift import hecke_equivariance_check, modularity_fit, spectral_basis, spectral_qexpansion

Q = 20
DISCS = {11: (12, 44, 45, 60, 92), 37: (12, 21, 37, 120, 136)}


@lru_cache(maxsize=None)
def _lifts(p, disc):
    Z = automorph(disc, p)
    return Z, geometric_qexpansion(Z, p, Q=Q), spectral_qexpansion(Z, spectral_basis(p, Q), Q)


def test_criterion_01_two_routes_agree(acceptance_report):
    mismatches = [(p, d) for p, ds in DISCS.items() for d in ds if _lifts(p, d)[1].coeffs != _lifts(p, d)[2].coeffs]
    count = sum(len(ds) for ds in DISCS.values())
    acceptance_report(1, not mismatches, f"geometric = spectral for {count} cycles at p in (11, 37), q^0..q^{Q}; mismatches {mismatches}")
    assert not mismatches


def test_criterion_02_modularity(acceptance_report):
    outside = [(p, d) for p, ds in DISCS.items() for d in ds if not modularity_fit(_lifts(p, d)[1].coeffs, spectral_basis(p, Q)).in_span]
    acceptance_report(2, not outside, f"geometric expansions in span(E2^(p), newforms); outside {outside}")
    assert not outside


def test_criterion_03_hecke_equivariance(acceptance_report):
    failures = []
    for p in (11, 37):
        basis = spectral_basis(p, 3 * 10)
        Z = automorph(DISCS[p][0], p)
        for m in (2, 3):
            if not hecke_equivariance_check(Z, m, basis, Q=10):
                failures.append((p, m))
    acceptance_report(3, not failures, f"E(T_m Z) = T_m E(Z) for m in (2, 3), p in (11, 37); failures {failures}")
    assert not failures


def test_criterion_04_rank_one_component_vanishes(acceptance_report):
    basis = spectral_basis(37, Q)
    idx = 1 + next(i for i, f in enumerate(basis.eigenforms) if basis.l_ratios()[i] == 0)
    comps = {d: modularity_fit(_lifts(37, d)[1].coeffs, basis).combination[idx] for d in DISCS[37]}
    ok = all(c == 0 for c in comps.values())
    acceptance_report(4, ok, f"p = 37 component on the L(f,1) = 0 newform: {sorted(set(map(str, comps.values())))}")
    assert ok


def test_criterion_05_odd_test_function(acceptance_report):
    nonzero = []
    for p, d in ((11, 12), (11, 44), (37, 120)):
        res = geometric_qexpansion(automorph(d, p), p, chi=make_odd_test_function(p), Q=10)
        if any(res.coeffs.coeffs):
            nonzero.append((p, d))
    acceptance_report(5, not nonzero, f"odd chi gives identically zero expansion for n <= 10; nonzero {nonzero}")
    assert not nonzero


def test_criterion_06_constant_term(acceptance_report):
    rows = []
    for d in DISCS[11]:
        Z, geo, _ = _lifts(11, d)
        implied = modularity_fit(geo.coeffs, spectral_basis(11, Q)).implied_constant
        rows.append((d, constant_term(fundamental_segment(Z)), implied))
    ok = all(c == i for _, c, i in rows)
    acceptance_report(6, ok, "eta-quotient constant = implied constant: " + ", ".join(f"D={d}:{c}" for d, c, _ in rows))
    assert ok


def test_criterion_07_pushforward_equals_eisenstein(acceptance_report):
    rng = random.Random(7)
    chi2 = make_test_function_gamma0(3, 2)
    worst = 0.0
    for _ in range(5):
        z = tn.SymSpacePoint(2, 1.0, rng.uniform(-0.5, 0.5), math.exp(rng.uniform(-0.4, 0.4)))
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.2))
        lhs, _ = tn.pushforward_u(z, tau, chi2, 4.0, tn.TruncationSpec(eps=1e-9))
        worst = max(worst, lhs.rel_diff(tn.eisenstein_eval(z, tau, 4.0, chi2)))
    chi1 = make_point_test_function(3, (1,))
    for tau in (0.2 + 0.8j, -0.3 + 1.1j):
        z = tn.SymSpacePoint(1, 1.0)
        lhs, _ = tn.pushforward_u(z, tau, chi1, 2.0, tn.TruncationSpec(eps=1e-9))
        worst = max(worst, lhs.rel_diff(tn.eisenstein_eval(z, tau, 2.0, chi1)))
    ok = worst <= 1e-6
    acceptance_report(7, ok, f"max relative difference {worst:.2e} (N=2, s=4: 5 points; N=1, s=2: 2 points)")
    assert ok


def test_criterion_08_torus_period_product_formula(acceptance_report):
    runs = []
    for p in (3, 5):
        chi = make_point_test_function(p, (1, 1))
        for tau in (1j, (1 + 3j) / 2):
            r = tn.torus_product_check(p, chi, tau, s0=8.0)
            runs.append((p, tau, r))
    worst = max(r.reldiff for *_, r in runs)
    exponents = {round(r.p_exponent, 6) for *_, r in runs}
    ok = worst <= 1e-4 and len(exponents) == 1
    acceptance_report(8, ok, f"max relative difference {worst:.2e}; fitted constant p^{exponents.pop() if len(exponents) == 1 else exponents} in all 4 runs")
    assert ok


def test_criterion_09_closedness_and_transgression(acceptance_report):
    rng = random.Random(9)
    worst = 0.0
    for _ in range(10):
        z = tn.SymSpacePoint(2, math.exp(rng.uniform(-0.5, 0.5)), rng.uniform(-1, 1), math.exp(rng.uniform(-0.5, 0.5)))
        v = [rng.uniform(-1, 1) for _ in range(4)]
        worst = max(worst, tn.closedness_residual(z, v), tn.transgression_checks(z, v, t=rng.uniform(0.5, 2))["max"])
    ok = worst <= 1e-6
    acceptance_report(9, ok, f"max residual of d phi, d1 psi - u d/du phi~, d alpha - t d/dt phi: {worst:.2e} at 10 points")
    assert ok


def test_criterion_10_enumeration(acceptance_report):
    bad = [(N, n) for N in (2, 3) for n in range(1, 11) if set(orbit_representatives(N, n)) != brute_force_orbits(N, n)]
    bad += [(N, n) for N in (1, 2, 3) for n in range(1, 13) if len(orbit_representatives(N, n)) != sum(d ** (N - 1) for d in divisors(n))]
    acceptance_report(10, not bad, f"brute force N in (2, 3), n <= 10 and counts n <= 12; failures {bad}")
    assert not bad

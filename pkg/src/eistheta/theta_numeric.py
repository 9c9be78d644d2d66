"""Floating-point evaluation of the Gaussian Schwartz forms, their theta series and
the associated weight-N Eisenstein series, for N in {1, 2}.

Coordinates on the symmetric space are (a, b, u) with g = u * g1(a, b) and
g1 = (sqrt b, a/sqrt b; 0, 1/sqrt b).  Forms are expanded in the coframe
(da, db, du/u); for N = 1 only du/u is present.  Internally x = log u.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np
from scipy import special

from .core_arith import InvalidInputError, hermite_eval
from .lattice_cycles import TestFunction, finite_fourier_transform_2, is_good_for

SQRT_PI = math.sqrt(math.pi)

# Sign conventions fixed by the closedness and transgression checks.
_PHI_HERMITE_SIGN = -1.0
_ALPHA_HERMITE_SIGN = -1.0
_ALPHA_SIGN = 1.0
# The F_2-dual theta sum pairs F_2(chi) at (v, _POISSON_W_SIGN * w).
_POISSON_W_SIGN = -1


class UnsupportedNError(InvalidInputError):
    """Only N = 1 and N = 2 are implemented."""


class DomainError(InvalidInputError):
    """The lattice Eisenstein series only converges for Re(s) > N."""


class TruncationError(RuntimeError):
    """The requested truncation cannot certify the target tolerance."""

    def __init__(self, message: str, suggested_radius: float | None = None):
        super().__init__(message)
        self.suggested_radius = suggested_radius


class QuadratureError(RuntimeError):
    """Successive quadrature refinements disagree by more than the tolerance."""


# ---------------------------------------------------------------------------
# points, forms, truncation data


def _check_n(N: int) -> None:
    if N not in (1, 2):
        raise UnsupportedNError(f"N={N} is not supported (only 1 and 2)")


@dataclass(frozen=True)
class SymSpacePoint:
    """A point g = u g1(a, b) of GL_N(R)^+ / SO(N); for N = 1 only u is used."""

    N: int
    u: float
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self) -> None:
        _check_n(self.N)
        vals = (self.u, self.a, self.b)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInputError("non-finite coordinate")
        if self.u <= 0 or self.b <= 0:
            raise InvalidInputError("need u > 0 and b > 0")

    @property
    def x(self) -> float:
        return math.log(self.u)

    def g1(self) -> np.ndarray:
        if self.N == 1:
            return np.eye(1)
        sb = math.sqrt(self.b)
        return np.array([[sb, self.a / sb], [0.0, 1.0 / sb]])

    def g(self) -> np.ndarray:
        return self.u * self.g1()

    def z(self) -> np.ndarray:
        g = self.g()
        return g @ g.T

    def coords(self) -> tuple[float, ...]:
        return (self.a, self.b, self.x) if self.N == 2 else (self.x,)

    @classmethod
    def from_coords(cls, N: int, coords: Sequence[float]) -> "SymSpacePoint":
        if N == 1:
            return cls(1, math.exp(coords[0]))
        a, b, x = coords
        return cls(2, math.exp(x), a, b)

    def with_u(self, u: float) -> "SymSpacePoint":
        return replace(self, u=u)


def coordinate_names(N: int) -> tuple[str, ...]:
    _check_n(N)
    return ("a", "b", "u") if N == 2 else ("u",)


@dataclass
class FormValue:
    """Components of a differential form at a point in the coframe (da, db, du/u).

    Keys are increasing tuples of coordinate names, e.g. ("a", "u") for da^du/u.
    """

    N: int
    degree: int
    components: dict[tuple[str, ...], complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = coordinate_names(self.N)
        for key in itertools.combinations(names, self.degree):
            self.components.setdefault(key, 0j)
        if len(self.components) != math.comb(len(names), self.degree):
            raise InvalidInputError("component keys do not match the degree")

    def __getitem__(self, key: tuple[str, ...]) -> complex:
        return self.components[key]

    def __add__(self, other: "FormValue") -> "FormValue":
        self._compatible(other)
        return FormValue(self.N, self.degree, {k: v + other.components[k] for k, v in self.components.items()})

    def __sub__(self, other: "FormValue") -> "FormValue":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "FormValue":
        return FormValue(self.N, self.degree, {k: c * v for k, v in self.components.items()})

    def conjugate(self) -> "FormValue":
        return FormValue(self.N, self.degree, {k: complex(v).conjugate() for k, v in self.components.items()})

    def norm(self) -> float:
        return max((abs(v) for v in self.components.values()), default=0.0)

    def max_abs_diff(self, other: "FormValue") -> float:
        return (self - other).norm()

    def rel_diff(self, other: "FormValue") -> float:
        den = max(self.norm(), other.norm())
        return self.max_abs_diff(other) / den if den else 0.0

    def _compatible(self, other: "FormValue") -> None:
        if (self.N, self.degree) != (other.N, other.degree):
            raise InvalidInputError("incompatible forms")

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "degree": self.degree,
            "components": {"^".join(k) or "1": [complex(v).real, complex(v).imag] for k, v in self.components.items()},
        }


@dataclass
class TruncationSpec:
    """Truncation and quadrature parameters with the computed tail certificate."""

    radius: float | None = None
    scheme: str = "tanh-sinh"
    nodes: int = 200
    eps: float = 1e-8
    tail_bound: float | None = None

    def certified(self) -> bool:
        return self.tail_bound is not None and self.tail_bound <= self.eps / 2


# ---------------------------------------------------------------------------
# small exterior algebra on the coordinate coframe (index tuples -> coefficients)

Form = dict[tuple[int, ...], complex]


def _wedge_one_forms(ones: Sequence[np.ndarray], dim: int) -> Form:
    k = len(ones)
    if k == 0:
        return {(): 1.0}
    mat = np.array(ones)
    out: Form = {}
    for idx in itertools.combinations(range(dim), k):
        c = float(np.linalg.det(mat[:, idx])) if k > 1 else float(mat[0, idx[0]])
        if c:
            out[idx] = c
    return out


def _contract_last(form: Form, dim: int) -> Form:
    """Interior product with the last coordinate vector field (here d/dx = u d/du)."""
    out: Form = {}
    last = dim - 1
    for idx, c in form.items():
        if idx and idx[-1] == last:
            out[idx[:-1]] = out.get(idx[:-1], 0) + (-1) ** (len(idx) - 1) * c
    return out


def _to_formvalue(N: int, degree: int, form: Form) -> FormValue:
    names = coordinate_names(N)
    return FormValue(N, degree, {tuple(names[i] for i in idx): complex(c) for idx, c in form.items()})


def _one_forms_lambda(z: SymSpacePoint) -> list[list[np.ndarray]]:
    if z.N == 1:
        return [[np.array([1.0])]]
    b = z.b
    l11 = np.array([0.0, 0.5 / b, 1.0])
    l22 = np.array([0.0, -0.5 / b, 1.0])
    l12 = np.array([0.5 / b, 0.0, 0.0])
    return [[l11, l12], [l12, l22]]


def lambda_form(z: SymSpacePoint) -> list[list[FormValue]]:
    """The symmetric matrix of 1-forms (theta + theta^t)/2 with theta = g^{-1} dg."""
    lam = _one_forms_lambda(z)
    dim = len(coordinate_names(z.N))
    return [[_to_formvalue(z.N, 1, _wedge_one_forms([lam[i][j]], dim)) for j in range(z.N)] for i in range(z.N)]


def _sigmas(N: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(N), repeat=N))


def _degrees(values: Sequence[int], N: int) -> tuple[int, ...]:
    return tuple(sum(1 for s in values if s == m) for m in range(N))


def _lambda_sigma(z: SymSpacePoint, sigma: Sequence[int], rows: Sequence[int] | None = None) -> Form:
    lam = _one_forms_lambda(z)
    rows = range(z.N) if rows is None else rows
    dim = len(coordinate_names(z.N))
    return _wedge_one_forms([lam[i][s] for i, s in zip(rows, sigma)], dim)


def _sigma_ls(N: int) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(l, rows != l, sigma_l values on those rows)."""
    out = []
    for l in range(N):
        rows = tuple(i for i in range(N) if i != l)
        for vals in itertools.product(range(N), repeat=N - 1):
            out.append((l, rows, vals))
    return out


# ---------------------------------------------------------------------------
# scalar Gaussian functions (vectorised over rows of vp, wp)


def _hermite_product(t: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    out = np.ones(t.shape[0])
    for m, d in enumerate(degrees):
        if d:
            out = out * hermite_eval(d, t[:, m])
    return out


def _phi0_sigma(vp: np.ndarray, wp: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    t = _PHI_HERMITE_SIGN * SQRT_PI * (vp + wp)
    return _hermite_product(t, degrees) * np.exp(-math.pi * np.sum((vp - wp) ** 2, axis=1))


def _phi_sigma(vp: np.ndarray, wp: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    t = _PHI_HERMITE_SIGN * SQRT_PI * (vp + wp)
    return _hermite_product(t, degrees) * np.exp(-math.pi * np.sum(vp**2 + wp**2, axis=1))


def _f2_phi_sigma(vp: np.ndarray, wp: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    """Closed-form partial Fourier transform of _phi_sigma in the w variable."""
    N = vp.shape[1]
    c = (_PHI_HERMITE_SIGN ** N) * (1j**N) * 2**N * math.pi ** (N / 2)
    val = np.full(vp.shape[0], c, dtype=complex)
    for m, d in enumerate(degrees):
        if d:
            val = val * np.conj(1j * vp[:, m] + wp[:, m]) ** d
    return val * np.exp(-math.pi * np.sum(vp**2 + wp**2, axis=1))


def _phi0_sigma_l(vp: np.ndarray, wp: np.ndarray, l: int, degrees: Sequence[int]) -> np.ndarray:
    t = _ALPHA_HERMITE_SIGN * SQRT_PI * (vp + wp)
    return (vp[:, l] - wp[:, l]) * _hermite_product(t, degrees) * np.exp(-math.pi * np.sum((vp - wp) ** 2, axis=1))


def _split_vector(z: SymSpacePoint, v: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (2 * z.N,):
        raise InvalidInputError(f"expected a real {2 * z.N}-vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("non-finite vector")
    g = z.g()
    vp = np.linalg.solve(g, arr[: z.N])
    wp = g.T @ arr[z.N :]
    return vp[None, :], wp[None, :]


def _phi0_form(z: SymSpacePoint, v: Sequence[float]) -> Form:
    vp, wp = _split_vector(z, v)
    N = z.N
    pref = 2.0**-N * math.pi ** (-N / 2)
    out: Form = {}
    for sigma in _sigmas(N):
        c = pref * float(_phi0_sigma(vp, wp, _degrees(sigma, N))[0])
        for idx, lc in _lambda_sigma(z, sigma).items():
            out[idx] = out.get(idx, 0) + c * lc
    return out


def phi0_eval(z: SymSpacePoint, v: Sequence[float]) -> FormValue:
    """The closed N-form phi^0(z, v) (Gaussian times Hermite polynomials)."""
    return _to_formvalue(z.N, z.N, _phi0_form(z, v))


def psi0_eval(z: SymSpacePoint, v: Sequence[float]) -> FormValue:
    """The (N-1)-form psi^0 = (-1)^N * (contraction of phi^0 with u d/du)."""
    dim = len(coordinate_names(z.N))
    form = {k: (-1) ** z.N * c for k, c in _contract_last(_phi0_form(z, v), dim).items()}
    return _to_formvalue(z.N, z.N - 1, form)


def alpha0_eval(z: SymSpacePoint, v: Sequence[float]) -> FormValue:
    """The transgression (N-1)-form alpha^0 with d alpha^0(z, sqrt(t) v) = t d/dt phi^0(z, sqrt(t) v)."""
    vp, wp = _split_vector(z, v)
    N = z.N
    pref = _ALPHA_SIGN * 2.0**-N * math.pi ** (-(N - 1) / 2)
    out: Form = {}
    for l, rows, vals in _sigma_ls(N):
        c = pref * (-1) ** l * float(_phi0_sigma_l(vp, wp, l, _degrees(vals, N))[0])
        for idx, lc in _lambda_sigma(z, vals, rows).items():
            out[idx] = out.get(idx, 0) + c * lc
    return _to_formvalue(N, N - 1, out)


def weil_scaled_phi(z: SymSpacePoint, v: Sequence[float], tau: complex) -> FormValue:
    """omega(1, h_tau) phi(z, v) = y^{N/2} phi^0(z, sqrt(y) v) q^{B(v)}."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise InvalidInputError("tau must lie in the upper half plane")
    y = tau.imag
    arr = np.asarray(v, dtype=float)
    B = float(arr[: z.N] @ arr[z.N :])
    return phi0_eval(z, math.sqrt(y) * arr).scale(y ** (z.N / 2) * np.exp(2j * math.pi * tau * B))


# ---------------------------------------------------------------------------
# finite-difference identities


def _form_array(fv: FormValue) -> np.ndarray:
    return np.array([fv.components[k] for k in sorted(fv.components)], dtype=complex)


def _partial(fun: Callable[[np.ndarray], np.ndarray], x0: np.ndarray, i: int, h: float, richardson: bool) -> np.ndarray:
    def central(step: float) -> np.ndarray:
        e = np.zeros_like(x0)
        e[i] = step
        return (fun(x0 + e) - fun(x0 - e)) / (2 * step)

    if not richardson:
        return central(h)
    return (4 * central(h / 2) - central(h)) / 3


def _exterior_derivative(
    z: SymSpacePoint, evaluate: Callable[[SymSpacePoint], FormValue], h: float, richardson: bool
) -> FormValue:
    """d of a form-valued function of the point, by central differences in (a, b, log u)."""
    N = z.N
    names = coordinate_names(N)
    base = evaluate(z)
    keys = sorted(base.components)
    x0 = np.array(z.coords(), dtype=float)

    def fun(x: np.ndarray) -> np.ndarray:
        return _form_array(evaluate(SymSpacePoint.from_coords(N, x)))

    partials = [_partial(fun, x0, i, h, richardson) for i in range(len(names))]
    out: dict[tuple[str, ...], complex] = {}
    for idx in itertools.combinations(range(len(names)), base.degree + 1):
        acc = 0j
        for pos, i in enumerate(idx):
            rest = tuple(names[j] for j in idx if j != i)
            acc += (-1) ** pos * partials[i][keys.index(rest)]
        out[tuple(names[j] for j in idx)] = acc
    return FormValue(N, base.degree + 1, out)


def closedness_residual(z: SymSpacePoint, v: Sequence[float], h: float = 1e-3, richardson: bool = True) -> float:
    """max |d phi^0| at (z, v); zero up to the finite-difference error."""
    if z.N == 1:
        return 0.0
    return _exterior_derivative(z, lambda p: phi0_eval(p, v), h, richardson).norm()


def transgression_checks(
    z: SymSpacePoint, v: Sequence[float], t: float = 1.0, h: float = 1e-3, richardson: bool = True
) -> dict[str, float]:
    """Residuals of d_1 psi^0 = u d/du phi~^0 and d alpha^0(z, sqrt t v) = t d/dt phi^0(z, sqrt t v)."""
    if z.N != 2:
        raise UnsupportedNError("the transgression checks are implemented for N = 2")
    if t <= 0:
        raise InvalidInputError("t must be positive")
    arr = np.asarray(v, dtype=float)
    x0 = np.array(z.coords())

    # d_1 psi on S (da^db component) against d/dx of the da^db part of phi.
    dpsi = _exterior_derivative(z, lambda p: psi0_eval(p, arr), h, richardson)
    dx_phi = _partial(lambda x: _form_array(phi0_eval(SymSpacePoint.from_coords(2, x), arr)), x0, 2, h, richardson)
    keys = sorted(phi0_eval(z, arr).components)
    res_psi = abs(dpsi[("a", "b")] - dx_phi[keys.index(("a", "b"))])

    sv = math.sqrt(t) * arr
    dalpha = _exterior_derivative(z, lambda p: alpha0_eval(p, sv), h, richardson)
    ht = h * t
    dt_phi = _partial(
        lambda s: _form_array(phi0_eval(z, math.sqrt(s[0]) * arr)), np.array([t]), 0, ht, richardson
    )
    res_alpha = float(np.max(np.abs(_form_array(dalpha) - t * dt_phi)))
    return {"psi": float(res_psi), "alpha": res_alpha, "max": max(float(res_psi), res_alpha)}


# ---------------------------------------------------------------------------
# lattice enumeration with certified tails


def _short_vectors(B: np.ndarray, shifts: np.ndarray, R: float) -> tuple[np.ndarray, np.ndarray]:
    """All (row, k) with k integer and ||B k + shifts[row]|| <= R (Fincke-Pohst, vectorised)."""
    n = B.shape[1]
    Q, U = np.linalg.qr(B)
    t = shifts @ Q  # coordinates of the shifts in the orthonormal frame
    rows = np.arange(shifts.shape[0])
    ks = np.zeros((shifts.shape[0], 0), dtype=np.int64)
    budget = np.full(shifts.shape[0], R * R)
    for i in range(n - 1, -1, -1):
        off = t[rows, i] + (ks.astype(float) @ U[i, i + 1 :] if ks.shape[1] else 0.0)
        uii = U[i, i]
        rad = np.sqrt(np.maximum(budget, 0.0))
        a, b = (-off - rad) / uii, (-off + rad) / uii
        lo = np.ceil(np.minimum(a, b) - 1e-12).astype(np.int64)
        hi = np.floor(np.maximum(a, b) + 1e-12).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        idx = np.repeat(np.arange(len(rows)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        kval = lo[idx] + (np.arange(idx.size) - starts)
        ks = np.column_stack([kval, ks[idx]])
        budget = budget[idx] - (uii * kval + off[idx]) ** 2
        rows = rows[idx]
    keep = budget >= -1e-9 * R * R
    return rows[keep], ks[keep]


def _count_bound(r: np.ndarray | float, delta: float, dim: int) -> np.ndarray:
    """Points of a lattice with minimum distance >= delta inside a ball of radius r."""
    half = delta / 2
    return ((np.asarray(r) + half) / half) ** dim


def _tail_bound(
    f: Callable[[np.ndarray], np.ndarray], R: float, delta: float, dim: int, ncos: int, step: float = 0.125
) -> float:
    """Bound on sum_{points with |x| > R} f(|x|) for ncos translates of a lattice.

    f must be non-increasing on [R, oo)."""
    r = R + step * np.arange(4000)
    terms = _count_bound(r[1:], delta, dim) * f(r[:-1])
    return float(ncos * np.sum(terms[np.isfinite(terms)]))


def _decreasing(f: Callable[[np.ndarray], np.ndarray], rstar: float) -> Callable[[np.ndarray], np.ndarray]:
    """Monotone envelope for a function that increases up to rstar and decreases after."""
    return lambda r: f(np.maximum(np.asarray(r, dtype=float), rstar))


def _gauss_poly(deg: int, coef: float, lin: float = 0.0) -> tuple[Callable[[np.ndarray], np.ndarray], float]:
    """f(r) = coef (r + lin)^deg exp(-pi r^2) and its maximiser."""
    rstar = max(0.0, (-lin + math.sqrt(lin * lin + 2 * deg / math.pi)) / 2) if deg else 0.0
    return (lambda r: coef * (np.asarray(r) + lin) ** deg * np.exp(-math.pi * np.asarray(r) ** 2)), rstar


def _choose_radius(
    tail: Callable[[float], float], target: float, start: float = 1.0, cap: float = 60.0, step: float = 0.25
) -> tuple[float, float]:
    R = start
    while R <= cap:
        tb = tail(R)
        if tb <= target:
            return R, tb
        R += step
    raise TruncationError(f"tail bound {tail(cap):.3g} above target {target:.3g} at radius {cap}", cap * 1.5)


@dataclass(frozen=True)
class _WeightTable:
    """A function on p^{-1}Z^{dim} / pZ^{dim}, as integer keys k (vector k/p) with weights."""

    p: int
    dim: int
    keys: np.ndarray
    weights: np.ndarray

    @property
    def cosets(self) -> np.ndarray:
        return self.keys.astype(float) / self.p

    def wmax(self) -> float:
        return float(np.max(np.abs(self.weights))) if self.weights.size else 0.0

    def dense(self) -> np.ndarray:
        arr = np.zeros((self.p * self.p,) * self.dim, dtype=complex)
        for k, w in zip(self.keys, self.weights):
            arr[tuple(k)] += w
        return arr

    @classmethod
    def from_dense(cls, p: int, arr: np.ndarray, rtol: float = 1e-13) -> "_WeightTable":
        cut = rtol * max(float(np.max(np.abs(arr))), 1e-300)
        keys = np.argwhere(np.abs(arr) > cut)
        return cls(p, arr.ndim, keys.astype(np.int64), arr[tuple(keys.T)])

    def fourier(self) -> "_WeightTable":
        """xi -> p^{-dim} sum_c W(c) e(xi . c), again a table on p^{-1}Z / pZ."""
        arr = self.dense()
        return _WeightTable.from_dense(self.p, np.fft.ifftn(arr) * self.p**self.dim)


_F2_CACHE: dict[tuple, TestFunction] = {}


def _f2_cached(tf: TestFunction) -> TestFunction:
    """finite_fourier_transform_2 memoised on the table contents."""
    key = (tf.N, tf.p, frozenset((k, v) for k, v in tf.values.items() if v != 0))
    if key not in _F2_CACHE:
        _F2_CACHE[key] = finite_fourier_transform_2(tf)
    return _F2_CACHE[key]


def _table(tf: TestFunction, w_sign: int = 1, swap: bool = False) -> _WeightTable:
    N, m = tf.N, tf.p * tf.p
    keys, weights = [], []
    for k, v in tf.values.items():
        if v == 0:
            continue
        kv, kw = list(k[:N]), [(w_sign * x) % m for x in k[N:]]
        keys.append(kw + kv if swap else kv + kw)
        weights.append(complex(v))
    return _WeightTable(tf.p, 2 * N, np.array(keys, dtype=np.int64).reshape(-1, 2 * N), np.array(weights, dtype=complex))


def _swap_test_function(tf: TestFunction) -> TestFunction:
    """v <-> w exchange chi(v, w) -> chi(w, v), keeping the splitting."""
    N = tf.N
    vals = {tuple(k[N:]) + tuple(k[:N]): v for k, v in tf.values.items()}
    split = (tf.split[1], tf.split[0]) if tf.split is not None else None
    return TestFunction(N, tf.p, tf.lattice_tag + ":swapped", vals, split)


def _lattice_points(M: np.ndarray, table: _WeightTable, R: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectors u in the support cosets with ||M u|| <= R: returns (u, M u, weights)."""
    if table.keys.size == 0:
        z = np.zeros((0, M.shape[0]))
        return z, z, np.zeros(0, dtype=complex)
    c = table.cosets
    rows, ks = _short_vectors(table.p * M, c @ M.T, R)
    u = c[rows] + table.p * ks
    return u, u @ M.T, table.weights[rows]


def _min_sv(M: np.ndarray) -> float:
    return float(np.linalg.svd(M, compute_uv=False)[-1])


# ---------------------------------------------------------------------------
# theta series


def _check_tau(tau: complex, min_y: float = 0.1) -> complex:
    tau = complex(tau)
    if not math.isfinite(tau.real) or not math.isfinite(tau.imag):
        raise InvalidInputError("non-finite tau")
    if tau.imag < min_y:
        raise InvalidInputError(f"Im(tau) must be at least {min_y}")
    return tau


@dataclass(frozen=True)
class _ThetaTables:
    """Weight tables for the direct sum and for the F_2-dual sum of one test function."""

    N: int
    direct: _WeightTable
    dual: _WeightTable

    @classmethod
    def build(cls, tf: TestFunction, swap: bool = False) -> "_ThetaTables":
        base = _swap_test_function(tf) if swap else tf
        return cls(tf.N, _table(base), _table(_f2_cached(base), w_sign=_POISSON_W_SIGN))


def _direct_scalars(g: np.ndarray, tau: complex, table: _WeightTable, target: float) -> tuple[np.ndarray, float, float]:
    N = g.shape[0]
    y = tau.imag
    sy = math.sqrt(y)
    M = np.zeros((2 * N, 2 * N))
    M[:N, :N] = sy * np.linalg.inv(g)
    M[N:, N:] = sy * g.T
    f, rstar = _gauss_poly(N, table.wmax() * 2.0**N, 1.0 / math.sqrt(2 * math.pi))
    f0 = lambda r: f(r) * (2 * math.pi) ** (N / 2)  # (2 sqrt(2 pi) r + 2)^N e^{-pi r^2}
    delta = _min_sv(table.p * M)
    tail = lambda R: _tail_bound(_decreasing(f0, rstar), R, delta, 2 * N, len(table.keys))
    R, tb = _choose_radius(tail, target)
    u, X, w = _lattice_points(M, table, R)
    phase = np.exp(2j * math.pi * tau.real * np.sum(u[:, :N] * u[:, N:], axis=1))
    vals = np.array([np.sum(w * phase * _phi_sigma(X[:, :N], X[:, N:], _degrees(s, N))) for s in _sigmas(N)])
    return vals, R, tb


def _dual_matrix(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    N = g.shape[0]
    gi = np.linalg.inv(g)
    (a, b), (c, d) = h
    M = np.zeros((2 * N, 2 * N))
    M[:N, :N], M[:N, N:] = a * gi, c * gi
    M[N:, :N], M[N:, N:] = b * gi, d * gi
    return M


def _dual_scalars(g: np.ndarray, h: np.ndarray, table: _WeightTable, target: float) -> tuple[np.ndarray, float, float]:
    N = g.shape[0]
    pref = complex(h[1][0] * 1j + h[1][1]) ** N / abs(np.linalg.det(g))
    M = _dual_matrix(g, h)
    coef = table.wmax() * abs(pref) * 2.0**N * math.pi ** (N / 2)
    f, rstar = _gauss_poly(N, coef)
    delta = _min_sv(table.p * M)
    tail = lambda R: _tail_bound(_decreasing(f, rstar), R, delta, 2 * N, len(table.keys))
    R, tb = _choose_radius(tail, target)
    u, X, w = _lattice_points(M, table, R)
    vals = np.array([pref * np.sum(w * _f2_phi_sigma(X[:, :N], X[:, N:], _degrees(s, N))) for s in _sigmas(N)])
    return vals, R, tb


def h_tau(tau: complex) -> np.ndarray:
    """The upper-triangular matrix in SL_2(R) sending i to tau."""
    y = tau.imag
    return np.array([[math.sqrt(y), tau.real / math.sqrt(y)], [0.0, 1.0 / math.sqrt(y)]])


def theta_coefficients(
    g: np.ndarray,
    tau: complex,
    chi: TestFunction,
    eps: float = 1e-10,
    variant: str = "direct",
    h: np.ndarray | None = None,
) -> tuple[dict[tuple[int, ...], complex], float]:
    """The scalar theta sums S_sigma(g, tau) = sum_v chi(v) phi^0_sigma(sqrt(y) rho_g^{-1} v) q^{B(v)}.

    g is any invertible N x N matrix.  variant "dual" evaluates the Poisson-transformed
    sum, optionally with a general h in SL_2(R) sending i to tau.  Returns the sums and
    the certified tail bound."""
    tau = _check_tau(tau)
    g = np.atleast_2d(np.asarray(g, dtype=float))
    tables = _ThetaTables.build(chi)
    if variant == "direct":
        vals, _, tb = _direct_scalars(g, tau, tables.direct, eps / 2)
    elif variant == "dual":
        hh = h_tau(tau) if h is None else np.asarray(h, dtype=float)
        if abs(np.linalg.det(hh) - 1) > 1e-12 or abs((hh[0, 0] * 1j + hh[0, 1]) / (hh[1, 0] * 1j + hh[1, 1]) - tau) > 1e-10:
            raise InvalidInputError("h must lie in SL_2(R) and send i to tau")
        vals, _, tb = _dual_scalars(g, hh, tables.dual, eps / 2)
    else:
        raise InvalidInputError(f"unknown variant {variant!r}")
    return dict(zip(_sigmas(chi.N), vals)), tb


def _assemble(z: SymSpacePoint, scalars: Sequence[complex], psi: bool) -> Form:
    N = z.N
    pref = 2.0**-N * math.pi ** (-N / 2)
    dim = len(coordinate_names(N))
    out: Form = {}
    for sigma, c in zip(_sigmas(N), scalars):
        lam = _lambda_sigma(z, sigma)
        if psi:
            lam = {k: (-1) ** N * v for k, v in _contract_last(lam, dim).items()}
        for idx, lc in lam.items():
            out[idx] = out.get(idx, 0) + pref * c * lc
    return out


def _lambda_scale(z: SymSpacePoint, psi: bool) -> float:
    """Largest total coefficient mass of the lambda(sigma) multiplying one scalar sum."""
    dim = len(coordinate_names(z.N))
    best = 0.0
    for sigma in _sigmas(z.N):
        lam = _lambda_sigma(z, sigma)
        if psi:
            lam = _contract_last(lam, dim)
        best = max(best, sum(abs(v) for v in lam.values()))
    return best * len(_sigmas(z.N)) * 2.0**-z.N * math.pi ** (-z.N / 2)


def theta_sum(
    z: SymSpacePoint,
    tau: complex,
    chi: TestFunction,
    spec: TruncationSpec | None = None,
    variant: str = "direct",
    form: str = "phi",
    h: np.ndarray | None = None,
) -> tuple[FormValue, TruncationSpec]:
    """Theta series of phi (or psi) at (z, tau); "dual" gives the F_2-transformed sum."""
    if chi.N != z.N:
        raise InvalidInputError("test function rank does not match the point")
    if chi(tuple([0] * (2 * z.N))) != 0:
        raise InvalidInputError("the test function must vanish at the zero vector")
    spec = spec or TruncationSpec()
    psi = form == "psi"
    scale = max(_lambda_scale(z, psi), 1e-300)
    tau = _check_tau(tau)
    tables = _ThetaTables.build(chi)
    g = z.g()
    if variant == "direct":
        if spec.radius is None:
            vals, R, tb = _direct_scalars(g, tau, tables.direct, spec.eps / (2 * scale))
        else:
            vals, R, tb = _fixed_radius(g, tau, tables, spec.radius, "direct")
    else:
        hh = h_tau(tau) if h is None else np.asarray(h, dtype=float)
        if spec.radius is None:
            vals, R, tb = _dual_scalars(g, hh, tables.dual, spec.eps / (2 * scale))
        else:
            vals, R, tb = _fixed_radius(g, hh, tables, spec.radius, "dual")
    tb *= scale
    out = replace(spec, radius=R, tail_bound=tb)
    if tb > spec.eps / 2:
        raise TruncationError(f"radius {R} certifies only {tb:.3g}", suggested_radius=R + 1.0)
    return _to_formvalue(z.N, z.N - 1 if psi else z.N, _assemble(z, vals, psi)), out


def _fixed_radius(g, tau_or_h, tables: _ThetaTables, R: float, variant: str):
    """Evaluate at a user-given radius and report the tail it certifies."""
    tiny = 1e-300
    if variant == "direct":
        tb_at = _radius_tail(g, tau_or_h, tables.direct, R, "direct")
        vals, _, _ = _direct_scalars(g, tau_or_h, tables.direct, tb_at * (1 + 1e-9) + tiny)
    else:
        tb_at = _radius_tail(g, tau_or_h, tables.dual, R, "dual")
        vals, _, _ = _dual_scalars(g, tau_or_h, tables.dual, tb_at * (1 + 1e-9) + tiny)
    return vals, R, tb_at


def _radius_tail(g, tau_or_h, table: _WeightTable, R: float, variant: str) -> float:
    N = g.shape[0]
    if variant == "direct":
        y = tau_or_h.imag
        M = np.zeros((2 * N, 2 * N))
        M[:N, :N] = math.sqrt(y) * np.linalg.inv(g)
        M[N:, N:] = math.sqrt(y) * g.T
        f, rstar = _gauss_poly(N, table.wmax() * 2.0**N * (2 * math.pi) ** (N / 2), 1.0 / math.sqrt(2 * math.pi))
    else:
        pref = complex(tau_or_h[1][0] * 1j + tau_or_h[1][1]) ** N / abs(np.linalg.det(g))
        M = _dual_matrix(g, tau_or_h)
        f, rstar = _gauss_poly(N, table.wmax() * abs(pref) * 2.0**N * math.pi ** (N / 2))
    return _tail_bound(_decreasing(f, rstar), R, _min_sv(table.p * M), 2 * N, len(table.keys))


# ---------------------------------------------------------------------------
# quadrature


def _tanh_sinh_nodes(lo: float, hi: float, n: int, T: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the tanh-sinh rule with n intervals on [lo, hi]."""
    h = 2 * T / n
    t = -T + h * np.arange(n + 1)
    s = 0.5 * math.pi * np.sinh(t)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * np.tanh(s)
    w = half * h * 0.5 * math.pi * np.cosh(t) / np.cosh(s) ** 2
    return x, w


def tanh_sinh(
    f: Callable[[float], np.ndarray], lo: float, hi: float, nodes: int = 200, tol: float = 1e-8, max_doublings: int = 3
) -> tuple[np.ndarray, int]:
    """Integrate a vector-valued f over [lo, hi]; doubles the nodes until two rules agree."""
    cache: dict[float, np.ndarray] = {}

    def rule(n: int) -> np.ndarray:
        x, w = _tanh_sinh_nodes(lo, hi, n)
        acc = 0
        for xi, wi in zip(x, w):
            key = round(float(xi), 15)
            if key not in cache:
                cache[key] = np.asarray(f(float(xi)))
            acc = acc + wi * cache[key]
        return acc

    n = nodes
    prev = rule(n)
    for _ in range(max_doublings):
        n *= 2
        cur = rule(n)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur, n
        prev = cur
    raise QuadratureError(f"tanh-sinh refinements still differ after {n} nodes")


# ---------------------------------------------------------------------------
# pushforward along u


def _node_data(g1: np.ndarray, x: float, tau: complex, tables: _ThetaTables, swapped: _ThetaTables):
    """(g, table) for the cheap Poisson-dual representation of the theta sum at u = e^x."""
    g = math.exp(x) * g1
    if x <= 0:
        return g, tables.dual
    return np.linalg.inv(g).T, swapped.dual


def _x_tail_bound(g1: np.ndarray, x: float, tau: complex, tables: _ThetaTables, swapped: _ThetaTables) -> float:
    """Bound on max_sigma |S_sigma| at u = e^x from the nonzero dual lattice vectors."""
    N = g1.shape[0]
    g, table = _node_data(g1, x, tau, tables, swapped)
    h = h_tau(tau)
    M = _dual_matrix(g, h)
    pref = abs(complex(h[1][0] * 1j + h[1][1]) ** N / np.linalg.det(g))
    f, rstar = _gauss_poly(N, table.wmax() * pref * 2.0**N * math.pi ** (N / 2))
    rmin = _min_sv(M) / table.p
    return _tail_bound(_decreasing(f, rstar), rmin, _min_sv(table.p * M), 2 * N, len(table.keys))


def _choose_x_cutoff(bound: Callable[[float], float], sre: float, target: float, cap: float = 8.0) -> tuple[float, float]:
    step = 0.05
    X = 0.5
    while X <= cap:
        xs = X + step * np.arange(200)
        right = sum(bound(x) * math.exp(-sre * x) for x in xs) * step
        left = sum(bound(-x) * math.exp(sre * x) for x in xs) * step
        if right + left <= target:
            return X, right + left
        X += 0.25
    raise TruncationError("no certified cutoff in log u", suggested_radius=None)


def pushforward_u(
    z1: SymSpacePoint, tau: complex, chi: TestFunction, s: complex = 0.0, spec: TruncationSpec | None = None
) -> tuple[FormValue, TruncationSpec]:
    """Integral over u of the psi theta series times u^{-s} du/u at the point z1 of S.

    The theta sum at each node is evaluated through the Poisson-dual representation
    that decays at that end (v <-> w exchange for u > 1)."""
    if chi.N != z1.N:
        raise InvalidInputError("test function rank does not match the point")
    spec = spec or TruncationSpec()
    tau = _check_tau(tau)
    s = complex(s)
    N = z1.N
    g1 = z1.g1()
    tables = _ThetaTables.build(chi)
    swapped = _ThetaTables.build(chi, swap=True)
    h = h_tau(tau)
    scale = max(_lambda_scale(z1, True), 1e-300)

    X, xtail = _choose_x_cutoff(
        lambda x: _x_tail_bound(g1, x, tau, tables, swapped) * scale, s.real, spec.eps / 4
    )
    node_target = spec.eps / (16 * X * scale)

    def integrand(x: float) -> np.ndarray:
        g, table = _node_data(g1, x, tau, tables, swapped)
        vals, _, _ = _dual_scalars(g, h, table, node_target * math.exp(s.real * x))
        return vals * np.exp(-s * x)

    integral, nodes = tanh_sinh(integrand, -X, X, spec.nodes, spec.eps / (4 * scale))
    form = _to_formvalue(N, N - 1, _assemble(z1.with_u(1.0), integral, psi=True))
    return form, replace(spec, radius=X, nodes=nodes, tail_bound=xtail + spec.eps / 8)


# ---------------------------------------------------------------------------
# Eisenstein series by Ewald splitting


def _upper_gamma(a: float, x: np.ndarray) -> np.ndarray:
    """Gamma(a, x) for real a of any sign and x > 0."""
    x = np.asarray(x, dtype=float)
    if a > 0:
        return special.gammaincc(a, x) * special.gamma(a)
    if a == 0:
        return special.exp1(x)
    return (_upper_gamma(a + 1, x) - x**a * np.exp(-x)) / a


def _upper_gamma_any(a: complex, x: np.ndarray) -> np.ndarray:
    if complex(a).imag == 0:
        return _upper_gamma(complex(a).real, x)
    return np.array([complex(mpmath.gammainc(a, float(t))) for t in np.asarray(x).ravel()]).reshape(np.shape(x))


def _harmonic_h(Y: np.ndarray, degrees: Sequence[int]) -> np.ndarray:
    """prod_m conj(Y_m)^{d_m} for real coordinates Y = (Re Y_1..Re Y_N, Im Y_1..Im Y_N)."""
    N = len(degrees)
    out = np.ones(Y.shape[0], dtype=complex)
    for m, d in enumerate(degrees):
        if d:
            out = out * (Y[:, m] - 1j * Y[:, N + m]) ** d
    return out


def harmonic_epstein(
    A: np.ndarray, table: _WeightTable, degree_list: Sequence[Sequence[int]], K: complex, eps: float = 1e-12
) -> np.ndarray:
    """sum_{u != 0} W(u) H_d(A u) / ||A u||^{2K} for each degree vector d, by Ewald splitting.

    H_d is the harmonic polynomial prod_m conj(y_m)^{d_m} of total degree N; convergent for Re K > N."""
    dim = A.shape[0]
    N = dim // 2
    K = complex(K)
    if K.real <= N:
        raise DomainError("the lattice sum needs Re(K) > N")
    Kr = K.real
    detA = abs(np.linalg.det(A))
    At = np.linalg.inv(A).T
    dual = table.fourier()
    # Balance the two halves by their point densities.
    dens1 = len(table.keys) / (table.p**dim * detA)
    dens2 = max(len(dual.keys), 1) / (table.p**dim / detA)
    eta = float(np.clip((dens1 / dens2) ** (1.0 / dim), 0.05, 20.0))
    gK = complex(mpmath.gamma(K))

    # direct half: W H(Au) r^{-2K} Q(K, pi eta r^2)
    def f1(r):
        r = np.asarray(r, dtype=float)
        return table.wmax() * r ** (N - 2 * Kr) * np.abs(_upper_gamma_any(K, math.pi * eta * r * r) / gK)

    d1 = _min_sv(table.p * A)
    R1, tb1 = _choose_radius(lambda R: _tail_bound(f1, R, d1, dim, len(table.keys)), eps / 4, start=0.5, step=0.25)
    u, Y, w = _lattice_points(A, table, R1)
    r2 = np.sum(Y * Y, axis=1)
    nz = r2 > 0
    Y, w, r2 = Y[nz], w[nz], r2[nz]
    radial1 = _upper_gamma_any(K, math.pi * eta * r2) / gK * r2 ** (-K)

    # dual half: (pi^K/Gamma(K)) |det A|^{-1} (-i)^N W^(xi) H(A^{-T} xi) (pi rho^2)^{K-2N} Gamma(2N-K, pi rho^2/eta)
    c2 = math.pi**Kr / abs(gK) / detA

    def f2(r):
        r = np.asarray(r, dtype=float)
        return dual.wmax() * c2 * r**N * (math.pi * r * r) ** (Kr - 2 * N) * np.abs(
            _upper_gamma_any(2 * N - K, math.pi * r * r / eta)
        )

    d2 = _min_sv(table.p * At)
    R2, tb2 = _choose_radius(lambda R: _tail_bound(f2, R, d2, dim, len(dual.keys)), eps / 4, start=0.5, step=0.25)
    xi, Z, wd = _lattice_points(At, dual, R2)
    p2 = np.sum(Z * Z, axis=1)
    nz = p2 > 0
    Z, wd, p2 = Z[nz], wd[nz], p2[nz]
    radial2 = (math.pi**K / gK / detA) * (-1j) ** N * (math.pi * p2) ** (K - 2 * N) * _upper_gamma_any(
        2 * N - K, math.pi * p2 / eta
    )
    out = []
    for d in degree_list:
        part1 = np.sum(w * _harmonic_h(Y, d) * radial1)
        part2 = np.sum(wd * _harmonic_h(Z, d) * radial2)
        out.append(part1 + part2)
    return np.array(out)


def _eisenstein_matrix(g1: np.ndarray, tau: complex) -> np.ndarray:
    """(v, w) -> (Re, Im) of g1^{-1} (v tau + w)."""
    N = g1.shape[0]
    gi = np.linalg.inv(g1)
    A = np.zeros((2 * N, 2 * N))
    A[:N, :N], A[:N, N:] = tau.real * gi, gi
    A[N:, :N] = tau.imag * gi
    return A


def eisenstein_lambda(N: int, s: complex) -> complex:
    """Gamma(N + s/2) (-1)^{N-1} i^N / (2 pi^{N + s/2})."""
    s = complex(s)
    return complex(mpmath.gamma(N + s / 2)) * (-1) ** (N - 1) * 1j**N / (2 * complex(mpmath.power(math.pi, N + s / 2)))


def eisenstein_scalars(g1: np.ndarray, tau: complex, s: complex, chi: TestFunction, eps: float = 1e-12) -> np.ndarray:
    """E_sigma = Lambda(s) y^{s/2} sum F_2(chi)(v) (g1^{-1} conj(v tau + w))_sigma / ||g1^{-1}(v tau + w)||^{2N+s}."""
    N = chi.N
    s = complex(s)
    if s.real <= N:
        raise DomainError(f"Re(s) = {s.real} must exceed N = {N}")
    tau = _check_tau(tau)
    table = _table(_f2_cached(chi), w_sign=_POISSON_W_SIGN)
    A = _eisenstein_matrix(np.atleast_2d(g1), tau)
    degs = [_degrees(sig, N) for sig in _sigmas(N)]
    # (g1^{-1} conj(zeta))_sigma = prod conj((g1^{-1} zeta)_m)^{d_m} since g1 is real
    sums = harmonic_epstein(A, table, degs, N + s / 2, eps)
    return eisenstein_lambda(N, s) * tau.imag ** (s / 2) * sums


def eisenstein_eval(z1: SymSpacePoint, tau: complex, s: complex, chi: TestFunction, eps: float = 1e-12) -> FormValue:
    """The Eisenstein (N-1)-form sum_sigma E_sigma * (du/u-coefficient of lambda(sigma))."""
    N = z1.N
    vals = eisenstein_scalars(z1.g1(), tau, s, chi, eps)
    dim = len(coordinate_names(N))
    out: Form = {}
    for sigma, c in zip(_sigmas(N), vals):
        for idx, lc in _contract_last(_lambda_sigma(z1, sigma), dim).items():
            out[idx] = out.get(idx, 0) + (-1) ** (N - 1) * c * lc
    return _to_formvalue(N, N - 1, out)


# ---------------------------------------------------------------------------
# periods over the split torus and products of weight one Eisenstein series


_E1_MAX_RADIUS = 2000.0


def weight_one_eisenstein(tau: complex, lam0: complex, sigma: float, tol: float = 1e-10) -> tuple[complex, float]:
    """E_1(tau, lam0, sigma) = sum_{lam in Z + tau Z} 1/((lam0+lam)|lam0+lam|^sigma), truncated.

    Returns the value and the certified tail bound.  Needs sigma > 1 (absolute convergence)
    and lam0 off the lattice."""
    tau = complex(tau)
    lam0 = complex(lam0)
    if sigma <= 1:
        raise DomainError("the lattice sum converges absolutely only for sigma > 1")
    y = tau.imag
    # reduce lam0 into the fundamental parallelogram
    n = math.floor(lam0.imag / y)
    lam0 = lam0 - n * tau
    lam0 = lam0 - math.floor(lam0.real)
    for corner in (0, 1, tau, 1 + tau):
        if abs(lam0 - corner) < 1e-12:
            raise DomainError("lam0 lies on the lattice")
    D = 1 + abs(tau)
    r0 = abs(lam0)
    e = 2 + sigma

    # The ball |lam| <= R is symmetric, so terms pair as f(lam0 + lam) + f(lam0 - lam) with
    # f(zeta) = 1/(zeta |zeta|^sigma) odd and |df| <= (1 + sigma) |zeta|^{-2-sigma}.
    def tail(R: float) -> float:
        A = R - 2 * D - r0
        if A <= 0:
            return math.inf
        # r0 (1 + sigma) (2 pi / y) int_{R-2D}^oo (t + D) (t - r0)^{-e} dt
        return r0 * (1 + sigma) * 2 * math.pi / y * (A ** (2 - e) / (e - 2) + (r0 + D) * A ** (1 - e) / (e - 1))

    R = 4 * D
    while tail(R) > tol:
        R *= 1.25
        if R > _E1_MAX_RADIUS * D:
            raise TruncationError(f"tolerance {tol:g} needs a lattice radius beyond {_E1_MAX_RADIUS * D:.0f}")
    B = np.array([[1.0, tau.real], [0.0, y]])
    rows, ks = _short_vectors(B, np.zeros((1, 2)), R)
    pts = lam0 + ks[:, 0] + ks[:, 1] * tau
    return complex(np.sum(1.0 / (pts * np.abs(pts) ** sigma))), tail(R)


def torus_lambda_prime(N: int, s: float) -> complex:
    """(-1)^{N-1} i^N Gamma(1 + s/(2N))^N / (2^N pi^{N + s/2})."""
    return (-1) ** (N - 1) * 1j**N * math.gamma(1 + s / (2 * N)) ** N / (2**N * math.pi ** (N + s / 2))


@dataclass
class TorusProductResult:
    p: int
    tau: complex
    s0: float
    lhs: complex
    rhs_unscaled: complex
    fitted_constant: complex
    p_exponent: float
    chosen_constant: float
    reldiff: float
    nodes: int

    def to_dict(self) -> dict:
        c = lambda v: [complex(v).real, complex(v).imag]
        return {
            "p": self.p,
            "tau": c(self.tau),
            "s0": self.s0,
            "lhs": c(self.lhs),
            "rhs_unscaled": c(self.rhs_unscaled),
            "fitted_constant": c(self.fitted_constant),
            "p_exponent": self.p_exponent,
            "chosen_constant": self.chosen_constant,
            "reldiff": self.reldiff,
            "nodes": self.nodes,
        }


def _torus_path(Q: np.ndarray, t: float) -> tuple[float, float, float, float]:
    """(a, b, da/dt, db/dt) along z1(t) = Q diag(e^t, e^-t) Q^t in the chart g1(a, b)."""
    D = np.diag([math.exp(t), math.exp(-t)])
    dD = np.diag([math.exp(t), -math.exp(-t)])
    z = Q @ D @ Q.T
    dz = Q @ dD @ Q.T
    b = 1.0 / z[1, 1]
    db = -dz[1, 1] / z[1, 1] ** 2
    a = z[0, 1] * b
    da = dz[0, 1] * b + z[0, 1] * db
    return a, b, da, db


def torus_period(
    chi: TestFunction, tau: complex, s0: float, Q: Sequence[Sequence[int]] | None = None, nodes: int = 48, tol: float = 1e-9
) -> tuple[complex, int]:
    """Integral of the Eisenstein 1-form over the translated split torus Z_Q (N = 2), by tanh-sinh in log b."""
    if chi.N != 2:
        raise UnsupportedNError("torus periods are implemented for N = 2")
    Qm = np.eye(2) if Q is None else np.asarray(Q, dtype=float)

    def integrand(t: float) -> np.ndarray:
        a, b, da, db = _torus_path(Qm, t)
        E = eisenstein_eval(SymSpacePoint(2, 1.0, a, b), tau, s0, chi, eps=tol * 1e-2)
        return np.array([E[("a",)] * da + E[("b",)] * db])

    T = 4.0
    while True:
        val, n = tanh_sinh(integrand, -T, T, nodes, tol)
        edge = max(abs(integrand(T)[0]), abs(integrand(-T)[0]))
        if edge * 2 < tol * max(abs(val[0]), 1e-300):
            return complex(val[0]), n
        T += 2.0
        if T > 20:
            raise QuadratureError("torus integrand does not decay")


def torus_product_check(
    p: int,
    chi: TestFunction,
    tau: complex,
    s0: float = 8.0,
    Q: Sequence[Sequence[int]] | None = None,
    nodes: int = 48,
) -> TorusProductResult:
    """Compare the torus period of the Eisenstein form with the product of weight one Eisenstein series.

    rhs_unscaled = Lambda'(s0) y^{s0/2} p^{-s0} sum_{v0} F_2(chi)(Q v0) prod_m E_1(tau, (a_m tau + b_m)/p, s0/N);
    the fitted constant is lhs / rhs_unscaled."""
    N = chi.N
    if N != 2:
        raise UnsupportedNError("implemented for N = 2")
    if s0 <= N:
        raise DomainError("s0 must exceed N")
    tau = _check_tau(tau)
    Qi = [[1, 0], [0, 1]] if Q is None else [list(map(int, r)) for r in Q]
    if round(Qi[0][0] * Qi[1][1] - Qi[0][1] * Qi[1][0]) != 1:
        raise InvalidInputError("Q must have determinant 1")
    if not is_good_for(Qi, chi):
        raise InvalidInputError("Q is not good for chi")
    F2 = _f2_cached(chi)
    m = p * p
    qinv = [[Qi[1][1], -Qi[0][1]], [-Qi[1][0], Qi[0][0]]]
    cache: dict[tuple[int, int], complex] = {}
    total, scale = 0j, 0.0
    for img, wgt in F2.values.items():
        if wgt == 0:
            continue
        kv = [sum(qinv[i][j] * img[j] for j in range(N)) % m for i in range(N)]
        kw = [sum(qinv[i][j] * img[N + j] for j in range(N)) % m for i in range(N)]
        prod = 1 + 0j
        for mm in range(N):
            ck = (kv[mm], kw[mm])
            if ck not in cache:
                lam0 = (kv[mm] / p * tau + kw[mm] / p) / p
                cache[ck] = weight_one_eisenstein(tau, lam0, s0 / N)[0]
            prod *= cache[ck]
        total += complex(wgt) * prod
        scale += abs(complex(wgt) * prod)
    if abs(total) < 1e-10 * scale:
        raise DomainError("the product side cancels identically for this test function; no constant can be fitted")
    lhs, n = torus_period(chi, tau, s0, Qi, nodes)
    rhs = torus_lambda_prime(N, s0) * tau.imag ** (s0 / 2) * p ** (-s0) * total
    fitted = lhs / rhs
    expo = math.log(abs(fitted)) / math.log(p)
    chosen = min((p**N, p ** (-N)), key=lambda c: abs(fitted - c))
    reldiff = abs(lhs - chosen * rhs) / abs(lhs)
    return TorusProductResult(p, tau, s0, lhs, rhs, fitted, expo, chosen, reldiff, n)

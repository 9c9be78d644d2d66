"""Weight-two modular symbols for Gamma_0(p), p prime.

The Manin symbol (c:d) is the path g{0, oo} = {b/d, a/c} for any lift g = (a b; c d) in
SL_2(Z).  The relative homology H_1(X_0(p), cusps; Q) is the span of the p+1 symbols
modulo x + xS = 0 and x + x tau + x tau^2 = 0.  Everything is exact over Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import sympy

from . import linalg as la
from .core_arith import InvalidInputError, convergent_pairs, divisors, is_prime, sigma1_p
from .lattice_cycles import ClosedGeodesic, NotHyperbolicError, hecke_representatives, mat_mul

Cusp = Fraction | None  # None is the cusp at infinity
Mat = tuple[int, int, int, int]

SUPPORTED_LEVELS = (11, 17, 19, 37)

S_MAT: Mat = (0, -1, 1, 0)
TAU_MAT: Mat = (0, -1, 1, -1)


class UnsupportedLevelError(ValueError):
    """Raised when some Hecke eigenvalue on the cuspidal space is irrational."""


def genus_x0(p: int) -> int:
    """Genus of X_0(p) from the Riemann-Hurwitz formula."""
    if p == 2:
        nu2, nu3 = 1, 0
    elif p == 3:
        nu2, nu3 = 0, 1
    else:
        nu2 = 1 + (1 if p % 4 == 1 else -1)
        nu3 = 1 + (1 if p % 3 == 1 else -1)
    g = 1 + Fraction(p + 1, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - 1
    assert g.denominator == 1
    return int(g)


def lift_to_sl2(c: int, d: int, p: int) -> Mat:
    """Some (a b; c' d') in SL_2(Z) with (c', d') = (c, d) mod p."""
    c %= p
    d %= p
    if c == 0:
        return (1, 0, 0, 1)
    # search d' = d + k p coprime to c
    dd = d
    while math.gcd(c, dd) != 1:
        dd += p
    g, x, y = _egcd(c, dd)
    # x c + y dd = 1 -> a dd - b c = 1 with a = y, b = -x
    return (y, -x, c, dd)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def apply_mobius(m: Sequence[int], z: Cusp) -> Cusp:
    a, b, c, d = m
    if z is None:
        return None if c == 0 else Fraction(a, c)
    num = a * z + b
    den = c * z + d
    return None if den == 0 else num / den


@dataclass
class ModSymSpace:
    """Manin presentation of H_1(X_0(p), cusps; Q)."""

    p: int
    relations: list[list[Fraction]] = field(repr=False)
    projection: list[list[Fraction]] = field(repr=False)  # (p+1) x dim
    free_symbols: list[int] = field(repr=False)
    boundary: list[list[Fraction]] = field(repr=False)  # dim x 2 (cusps oo, 0)

    # -- symbols ---------------------------------------------------------
    @property
    def num_symbols(self) -> int:
        return self.p + 1

    @property
    def dim(self) -> int:
        return len(self.free_symbols)

    @property
    def genus(self) -> int:
        return genus_x0(self.p)

    def symbol_index(self, c: int, d: int) -> int:
        p = self.p
        c %= p
        d %= p
        if c == 0:
            if d == 0:
                raise InvalidInputError("(0:0) is not a point of P^1")
            return 0
        return 1 + (d * pow(c, -1, p)) % p

    def symbol_of_matrix(self, g: Sequence[int]) -> int:
        return self.symbol_index(g[2], g[3])

    def symbol_pair(self, i: int) -> tuple[int, int]:
        return (0, 1) if i == 0 else (1, i - 1)

    def project(self, symvec: dict[int, int | Fraction] | Sequence) -> list[Fraction]:
        """Class of a symbol combination in the chosen basis."""
        out = [Fraction(0)] * self.dim
        items = symvec.items() if isinstance(symvec, dict) else enumerate(symvec)
        for i, coef in items:
            if coef:
                row = self.projection[i]
                for j, x in enumerate(row):
                    if x:
                        out[j] += coef * x
        return out

    # -- paths -------------------------------------------------------------
    def path_symbols_from_infinity(self, beta: Cusp) -> dict[int, int]:
        """{oo, beta} as a combination of Manin symbols (continued-fraction trick)."""
        out: dict[int, int] = {}
        if beta is None:
            return out
        prev = (1, 0)
        for k, (pk, qk) in enumerate(convergent_pairs(beta)):
            # {p_{k-1}/q_{k-1}, p_k/q_k} = g{0,oo}, g = (p_k, +-p_{k-1}; q_k, +-q_{k-1})
            sign = 1 if pk * prev[1] - prev[0] * qk == 1 else -1
            idx = self.symbol_index(qk, sign * prev[1])
            out[idx] = out.get(idx, 0) + 1
            prev = (pk, qk)
        return out

    def path_symbols(self, alpha: Cusp, beta: Cusp) -> dict[int, int]:
        out = dict(self.path_symbols_from_infinity(beta))
        for i, c in self.path_symbols_from_infinity(alpha).items():
            out[i] = out.get(i, 0) - c
        return out

    def path_to_basis(self, alpha: Cusp, beta: Cusp) -> list[Fraction]:
        """Class of the modular symbol {alpha, beta}."""
        return self.project(self.path_symbols(alpha, beta))

    def symbol_class(self, i: int) -> list[Fraction]:
        return list(self.projection[i])

    def boundary_of(self, v: Sequence[Fraction]) -> list[Fraction]:
        return la.vecmat(list(v), self.boundary)

    # -- Hecke -------------------------------------------------------------
    def _hecke_on_symbol(self, i: int, n: int) -> dict[int, int]:
        c, d = self.symbol_pair(i)
        g = lift_to_sl2(c, d, self.p)
        z0, zoo = apply_mobius(g, Fraction(0)), apply_mobius(g, None)
        out: dict[int, int] = {}
        for dd, dp, b in hecke_representatives(n, self.p):
            m = (dd, b, 0, dp)
            for j, coef in self.path_symbols(apply_mobius(m, z0), apply_mobius(m, zoo)).items():
                out[j] = out.get(j, 0) + coef
        return out

    def hecke_matrix(self, n: int) -> list[list[Fraction]]:
        """Matrix acting on row vectors: class(v) T_n = v @ M."""
        if n not in self._hecke_cache:
            self._hecke_cache[n] = [self.project(self._hecke_on_symbol(s, n)) for s in self.free_symbols]
        return self._hecke_cache[n]

    @cached_property
    def _hecke_cache(self) -> dict[int, list[list[Fraction]]]:
        return {}

    def star_matrix(self) -> list[list[Fraction]]:
        """Involution induced by z -> -conj(z): (c:d) -> (-c:d)."""
        rows = []
        for s in self.free_symbols:
            c, d = self.symbol_pair(s)
            rows.append(self.project({self.symbol_index(-c, d): 1}))
        return rows

    # -- cuspidal part -------------------------------------------------------
    @cached_property
    def cuspidal_basis(self) -> list[list[Fraction]]:
        """Rows spanning ker(boundary) in the chosen coordinates."""
        return la.left_nullspace(self.boundary) if self.dim else []

    def is_cuspidal(self, v: Sequence[Fraction]) -> bool:
        return not any(self.boundary_of(v))

    @cached_property
    def eisenstein_vector(self) -> list[Fraction]:
        """The Hecke-stable complement of the cuspidal space (eigenvalue sigma_1 on T_q)."""
        q = 2 if self.p != 2 else 3
        M = self.hecke_matrix(q)
        A = la.mat_sub(M, la.scalar_mat(sigma1_p(q, self.p), self.dim))
        vecs = la.left_nullspace(A)
        if len(vecs) != 1:
            raise AssertionError("Eisenstein eigenline is not one dimensional")
        return vecs[0]


def _relation_rows(p: int, index) -> list[list[Fraction]]:
    rows = []
    n = p + 1
    pts = [(0, 1)] + [(1, d) for d in range(p)]
    for c, d in pts:
        r = [Fraction(0)] * n
        r[index(c, d)] += 1
        r[index(d, -c)] += 1
        rows.append(r)
        r = [Fraction(0)] * n
        r[index(c, d)] += 1
        r[index(d, -c - d)] += 1
        r[index(-c - d, c)] += 1
        rows.append(r)
    return rows


_SPACE_CACHE: dict[int, ModSymSpace] = {}


def build_space(p: int) -> ModSymSpace:
    """Construct the Manin presentation for Gamma_0(p) and check its dimensions."""
    if not is_prime(p):
        raise InvalidInputError("p must be prime")
    if p in _SPACE_CACHE:
        return _SPACE_CACHE[p]

    def index(c: int, d: int) -> int:
        c %= p
        d %= p
        return 0 if c == 0 else 1 + (d * pow(c, -1, p)) % p

    rels = _relation_rows(p, index)
    R, piv = la.rref(rels)
    n = p + 1
    free = [c for c in range(n) if c not in piv]
    proj = []
    pivot_row = {pc: row for row, pc in zip(R, piv)}
    for s in range(n):
        if s in pivot_row:
            proj.append([-pivot_row[s][f] for f in free])
        else:
            proj.append([Fraction(int(f == s)) for f in free])
    # boundary of (c:d) = [cusp a/c] - [cusp b/d]; cusp x/y is oo iff p | y
    bnd = []
    for s in free:
        c, d = (0, 1) if s == 0 else (1, s - 1)
        row = [Fraction(0), Fraction(0)]
        row[0 if c % p == 0 else 1] += 1
        row[0 if d % p == 0 else 1] -= 1
        bnd.append(row)
    space = ModSymSpace(p, rels, proj, free, bnd)
    g = genus_x0(p)
    if space.dim != 2 * g + 1 or len(space.cuspidal_basis) != 2 * g:
        raise AssertionError(f"dimension check failed at p={p}")
    _SPACE_CACHE[p] = space
    return space


def hecke_operator(space: ModSymSpace, n: int) -> list[list[Fraction]]:
    if n < 1:
        raise InvalidInputError("n must be positive")
    return space.hecke_matrix(n)


def star_involution(space: ModSymSpace) -> list[list[Fraction]]:
    return space.star_matrix()


def restrict(space_rows: Sequence[Sequence[Fraction]], M: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Matrix of a row-action M on the invariant subspace spanned by ``space_rows``."""
    out = []
    for r in space_rows:
        img = la.vecmat(list(r), M)
        coords = la.solve_left([list(x) for x in space_rows], img)
        if coords is None:
            raise AssertionError("subspace is not invariant")
        out.append(coords)
    return out


def plus_minus_split(space: ModSymSpace) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Bases (in ambient coordinates) of the star = +1 and star = -1 cuspidal subspaces."""
    cusp = space.cuspidal_basis
    if not cusp:
        return [], []
    St = restrict(cusp, space.star_matrix())
    out = []
    for sgn in (1, -1):
        A = la.mat_sub(St, la.scalar_mat(Fraction(sgn), len(cusp)))
        coeffs = la.left_nullspace(A)
        out.append([la.vecmat(c, cusp) for c in coeffs])
    return out[0], out[1]


# ---------------------------------------------------------------------------
# closed loops and the crossing functional


def sl2_word(g: Sequence[int]) -> list[tuple[str, int]]:
    """Write g = +-T^{q1} S T^{q2} S ... T^{qk} as a list of ('T', q) and ('S', 1)."""
    a, b, c, d = g
    word: list[tuple[str, int]] = []
    while c != 0:
        q = a // c
        word.append(("T", q))
        a, b = a - q * c, b - q * d
        # (a b; c d) = S (c d; -a -b)
        word.append(("S", 1))
        a, b, c, d = c, d, -a, -b
    # now (a b; 0 d) with a d = 1
    word.append(("T", b * a))
    return word


def crossing_functional(space: ModSymSpace, gamma: Sequence[int]) -> list[int]:
    """phi_gamma on Manin symbols: signed crossings of a path z0 -> gamma z0 with the edges
    of the Farey tessellation, grouped by Gamma_0(p)-class of the oriented edge."""
    phi = [0] * space.num_symbols
    h: Mat = (1, 0, 0, 1)
    tau2 = mat_mul(TAU_MAT, TAU_MAT)
    tau_inv = tau2

    def cross(h: Mat) -> Mat:
        phi[space.symbol_of_matrix(h)] -= 1
        hs = mat_mul(h, S_MAT)
        phi[space.symbol_of_matrix(hs)] += 1
        return hs

    for letter, k in sl2_word(gamma):
        if letter == "S":
            h = cross(h)
        elif k > 0:
            for _ in range(k):  # T = tau^2 S
                h = cross(mat_mul(h, tau2))
        elif k < 0:
            for _ in range(-k):  # T^{-1} = S^{-1} tau^{-2} = S^{-1} tau, S^{-1} = -S
                h = mat_mul(cross(h), TAU_MAT)
    del tau_inv
    return phi


def functional_on_class(space: ModSymSpace, phi: Sequence[int], v: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(phi[s]) * x for s, x in zip(space.free_symbols, v)), Fraction(0))


def functional_kills_relations(space: ModSymSpace, phi: Sequence[int]) -> bool:
    return all(sum(r * f for r, f in zip(row, phi)) == 0 for row in space.relations)


def loop_class(space: ModSymSpace, gamma: Sequence[int]) -> list[Fraction]:
    """Class of {oo, gamma oo} (a closed loop in X_0(p))."""
    return space.path_to_basis(None, apply_mobius(gamma, None))


def closed_geodesic_class(space: ModSymSpace, Z: ClosedGeodesic, cusp: Cusp = None) -> list[Fraction]:
    """Class of {c, gamma c} in relative homology, c = oo by default."""
    if abs(Z.trace) <= 2:
        raise NotHyperbolicError("closed geodesics need |trace| > 2")
    return space.path_to_basis(cusp, apply_mobius(Z.gamma, cusp))


def _gamma0_generating_set(p: int, cmax: int = 3) -> list[Mat]:
    out = []
    for k in range(1, cmax + 1):
        c = k * p
        for d in range(1, c):
            if math.gcd(c, d) == 1:
                a = pow(d, -1, c)
                b = (a * d - 1) // c
                out.append((a, b, c, d))
    return out


@dataclass
class IntegralStructure:
    """Z-basis of H_1(X_0(p); Z) with loops realising each basis element."""

    basis: list[list[Fraction]]  # ambient coordinates
    functionals: list[list[int]]  # crossing functional of each basis loop
    pairing: list[list[Fraction]]  # J[i][j] = b_i . b_j


_INTEGRAL_CACHE: dict[int, IntegralStructure] = {}


def integral_structure(space: ModSymSpace) -> IntegralStructure:
    """Integral homology lattice, generated by loop classes of many gamma in Gamma_0(p)."""
    if space.p in _INTEGRAL_CACHE:
        return _INTEGRAL_CACHE[space.p]
    cusp = space.cuspidal_basis
    gens = _gamma0_generating_set(space.p)
    coords = []
    funcs = []
    for g in gens:
        v = loop_class(space, g)
        c = la.solve_left(cusp, v)
        assert c is not None
        coords.append(c)
        funcs.append(crossing_functional(space, g))
    den = la.common_denominator([x for c in coords for x in c]) if coords else 1
    int_rows = [[int(x * den) for x in c] + [0] * len(gens) for c in coords]
    for i in range(len(gens)):
        int_rows[i][len(cusp) + i] = 1
    # HNF on [coords | identity] tracks the unimodular combination
    H = la.hnf_rows(int_rows)
    k = len(cusp)
    basis_rows = [r for r in H if any(r[:k])]
    basis, fns = [], []
    for r in basis_rows:
        combo = r[k:]
        vec_c = [Fraction(x, den) for x in r[:k]]
        basis.append(la.vecmat(vec_c, cusp))
        f = [0] * space.num_symbols
        for coef, fn in zip(combo, funcs):
            if coef:
                f = [a + coef * b for a, b in zip(f, fn)]
        fns.append(f)
    J = [[functional_on_class(space, fi, bj) for bj in basis] for fi in fns]
    out = IntegralStructure(basis, fns, J)
    _INTEGRAL_CACHE[space.p] = out
    return out


def intersection_pairing(space: ModSymSpace, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    """Topological intersection x . y on H_1(X_0(p))."""
    if not (space.is_cuspidal(x) and space.is_cuspidal(y)):
        raise InvalidInputError("intersection_pairing needs cuspidal classes")
    ist = integral_structure(space)
    cx = la.solve_left(ist.basis, x)
    cy = la.solve_left(ist.basis, y)
    return sum((a * ist.pairing[i][j] * b for i, a in enumerate(cx) for j, b in enumerate(cy)), Fraction(0))


def loop_intersection(space: ModSymSpace, gamma: Sequence[int], v: Sequence[Fraction]) -> Fraction:
    """Z . v for the loop of gamma and any relative class v."""
    return functional_on_class(space, crossing_functional(space, gamma), v)


# ---------------------------------------------------------------------------
# eigenforms and periods


@dataclass(frozen=True)
class PeriodSymbol:
    """Q-linear combination of monomials i^a pi^b (Omega+)^c (Omega-)^d, a in {0,1}."""

    terms: tuple[tuple[tuple[int, int, int, int], Fraction], ...]

    @staticmethod
    def make(coef: Fraction | int, i: int = 0, pi: int = 0, om_plus: int = 0, om_minus: int = 0) -> "PeriodSymbol":
        c = Fraction(coef)
        if i % 4 >= 2:
            c = -c
        return PeriodSymbol(((((i % 2), pi, om_plus, om_minus), c),) if c else ())

    @staticmethod
    def rational(c: Fraction | int) -> "PeriodSymbol":
        return PeriodSymbol.make(c)

    def _dict(self) -> dict:
        return dict(self.terms)

    @staticmethod
    def _from(d: dict) -> "PeriodSymbol":
        return PeriodSymbol(tuple(sorted((k, v) for k, v in d.items() if v)))

    def __add__(self, other: "PeriodSymbol") -> "PeriodSymbol":
        d = self._dict()
        for k, v in other.terms:
            d[k] = d.get(k, Fraction(0)) + v
        return self._from(d)

    def __neg__(self) -> "PeriodSymbol":
        return self._from({k: -v for k, v in self.terms})

    def __sub__(self, other: "PeriodSymbol") -> "PeriodSymbol":
        return self + (-other)

    def __mul__(self, other: "PeriodSymbol | Fraction | int") -> "PeriodSymbol":
        if not isinstance(other, PeriodSymbol):
            other = PeriodSymbol.rational(other)
        d: dict = {}
        for (i1, p1, a1, b1), c1 in self.terms:
            for (i2, p2, a2, b2), c2 in other.terms:
                i = i1 + i2
                c = c1 * c2 * (-1 if i >= 2 else 1)
                k = (i % 2, p1 + p2, a1 + a2, b1 + b2)
                d[k] = d.get(k, Fraction(0)) + c
        return self._from(d)

    __rmul__ = __mul__

    def inverse(self) -> "PeriodSymbol":
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are invertible")
        (i, pi, a, b), c = self.terms[0]
        inv = 1 / c
        if i:  # 1/i = -i
            inv = -inv
        return PeriodSymbol.make(inv, i, -pi, -a, -b)

    def __truediv__(self, other: "PeriodSymbol") -> "PeriodSymbol":
        return self * other.inverse()

    def is_pure_rational(self) -> bool:
        return all(k == (0, 0, 0, 0) for k, _ in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_pure_rational():
            raise ValueError(f"period symbol {self} is not a pure rational")
        return self.terms[0][1] if self.terms else Fraction(0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, pi, a, b), c in self.terms:
            mon = "".join(
                s for s in (
                    "i" if i else "",
                    f"pi^{pi}" if pi else "",
                    f"Om+^{a}" if a else "",
                    f"Om-^{b}" if b else "",
                )
            )
            parts.append(f"{c}{'*' + mon if mon else ''}")
        return " + ".join(parts)


@dataclass
class Eigenform:
    """A rational newform: Hecke eigenvalues and its plus/minus period functionals."""

    p: int
    an: list[int]  # an[n] for 0 <= n <= Q, an[0] = 0, an[1] = 1
    plus_vector: list[Fraction]
    minus_vector: list[Fraction]
    x_plus: list[Fraction]  # functional on ambient coordinates, primitive on H_1(X;Z)
    x_minus: list[Fraction]

    def a(self, n: int) -> int:
        return self.an[n]


def _functional_value(x: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(x, v)), Fraction(0))


def _eigen_functional(space: ModSymSpace, eig: dict[int, int], sign: int) -> list[Fraction]:
    """Column vector x with M_q x = a_q x for all q in eig and star x = sign x."""
    n = space.dim
    rows: list[list[Fraction]] = []
    for q, aq in eig.items():
        A = la.mat_sub(space.hecke_matrix(q), la.scalar_mat(Fraction(aq), n))
        rows.extend(A)
    A = la.mat_sub(space.star_matrix(), la.scalar_mat(Fraction(sign), n))
    rows.extend(A)
    sols = la.nullspace(rows, n)
    if len(sols) != 1:
        raise AssertionError("eigen-functional is not unique")
    x = sols[0]
    # primitive on the integral lattice
    ist = integral_structure(space)
    vals = [_functional_value(x, b) for b in ist.basis]
    g = Fraction(0)
    for v in vals:
        g = Fraction(math.gcd(g.numerator * v.denominator, v.numerator * g.denominator), g.denominator * v.denominator)
    return [xi / g for xi in x]


def _good_primes(p: int, count: int) -> list[int]:
    out, q = [], 2
    while len(out) < count:
        if is_prime(q) and q != p:
            out.append(q)
        q += 1
    return out


_EIGEN_CACHE: dict[tuple[int, int], list[Eigenform]] = {}


def rational_eigenforms(space: ModSymSpace, Q: int = 20) -> list[Eigenform]:
    """Newforms of level p with rational Hecke eigenvalues, with a_n for n <= Q."""
    key = (space.p, Q)
    if key in _EIGEN_CACHE:
        return _EIGEN_CACHE[key]
    plus, _ = plus_minus_split(space)
    if not plus:
        _EIGEN_CACHE[key] = []
        return []
    primes = _good_primes(space.p, 4)
    # successively split the plus space by T_q
    pieces = [plus]
    eig_maps: list[dict[int, int]] = [{}]
    t = sympy.symbols("t")
    for q in primes:
        new_pieces, new_maps = [], []
        for piece, em in zip(pieces, eig_maps):
            M = restrict(piece, space.hecke_matrix(q))
            cp = sympy.Matrix(M).charpoly(t).as_expr()
            for fac, _mult in sympy.factor_list(cp)[1]:
                if sympy.degree(fac, t) > 1:
                    raise UnsupportedLevelError(
                        f"level {space.p}: T_{q} has irrational eigenvalues (charpoly {sympy.factor(cp)})"
                    )
            roots = sorted({Fraction(int(sympy.Rational(r).p), int(sympy.Rational(r).q)) for r in sympy.roots(cp, t)})
            for r in roots:
                A = la.mat_sub(M, la.scalar_mat(r, len(piece)))
                sub = la.left_nullspace(A)
                new_pieces.append([la.vecmat(c, piece) for c in sub])
                new_maps.append({**em, q: int(r)})
        pieces, eig_maps = new_pieces, new_maps
    forms = []
    _, minus = plus_minus_split(space)
    for piece, em in zip(pieces, eig_maps):
        if len(piece) != 1:
            raise UnsupportedLevelError(f"level {space.p}: eigenspace of dimension {len(piece)} not split")
        v = piece[0]
        an = [0] * (Q + 1)
        for n in range(1, Q + 1):
            img = la.vecmat(v, space.hecke_matrix(n))
            j = next(i for i, x in enumerate(v) if x)
            lam = img[j] / v[j]
            assert [lam * x for x in v] == img
            an[n] = int(lam)
        # minus eigenvector with the same eigenvalues
        mvec = None
        for w in _joint_eigen(space, minus, em):
            mvec = w
        xp = _eigen_functional(space, em, 1)
        xm = _eigen_functional(space, em, -1)
        forms.append(Eigenform(space.p, an, v, mvec, xp, xm))
    forms.sort(key=lambda f: f.an[2] if len(f.an) > 2 else 0)
    _EIGEN_CACHE[key] = forms
    return forms


def _joint_eigen(space: ModSymSpace, basis: list[list[Fraction]], em: dict[int, int]) -> list[list[Fraction]]:
    cur = basis
    for q, aq in em.items():
        if not cur:
            break
        M = restrict(cur, space.hecke_matrix(q))
        sub = la.left_nullspace(la.mat_sub(M, la.scalar_mat(Fraction(aq), len(cur))))
        cur = [la.vecmat(c, cur) for c in sub]
    return cur


def supported_eigenforms(p: int, Q: int = 20) -> list[Eigenform]:
    if p not in SUPPORTED_LEVELS:
        space = build_space(p)
        rational_eigenforms(space, Q)  # raises with the charpoly when irrational
        raise UnsupportedLevelError(
            f"level {p} is outside the supported set {SUPPORTED_LEVELS} "
            f"(cuspidal charpoly of T_2: {cuspidal_charpoly(space, 2)})"
        )
    return rational_eigenforms(build_space(p), Q)


def cuspidal_charpoly(space: ModSymSpace, q: int) -> str:
    cusp = space.cuspidal_basis
    if not cusp:
        return "1"
    t = sympy.symbols("t")
    return str(sympy.factor(sympy.Matrix(restrict(cusp, space.hecke_matrix(q))).charpoly(t).as_expr()))


def winding_element(space: ModSymSpace) -> list[Fraction]:
    return space.path_to_basis(Fraction(0), None)


def l_ratio(space: ModSymSpace, f: Eigenform) -> Fraction:
    """L(f,1)/Omega+ = -x+({0, oo})."""
    return -_functional_value(f.x_plus, winding_element(space))


def winding_ratio(space: ModSymSpace, f: Eigenform) -> PeriodSymbol:
    """L(f,1) as (rational) * Omega+."""
    return PeriodSymbol.make(l_ratio(space, f), om_plus=1)


def bilinear_constant(space: ModSymSpace, f: Eigenform) -> Fraction:
    """B = x-^T J^{-1} x+ with x+- evaluated on the integral basis."""
    ist = integral_structure(space)
    xp = [_functional_value(f.x_plus, b) for b in ist.basis]
    xm = [_functional_value(f.x_minus, b) for b in ist.basis]
    Jinv = la.inverse(ist.pairing)
    return _functional_value(xm, la.matvec(Jinv, xp))


def period_plus_integral(f: Eigenform, v: Sequence[Fraction]) -> PeriodSymbol:
    """int_v omega_f^+ = x-(v) Omega- / pi."""
    return PeriodSymbol.make(_functional_value(f.x_minus, v), pi=-1, om_minus=1)


def period_minus_integral(f: Eigenform, v: Sequence[Fraction]) -> PeriodSymbol:
    """int_v omega_f^- = -i x+(v) Omega+ / pi."""
    return PeriodSymbol.make(-_functional_value(f.x_plus, v), i=1, pi=-1, om_plus=1)


def pairing_plus_minus(space: ModSymSpace, f: Eigenform) -> PeriodSymbol:
    """[omega+, omega-] = int_X omega+ ^ omega- via the Riemann bilinear relation."""
    return PeriodSymbol.make(bilinear_constant(space, f), i=1, pi=-2, om_plus=1, om_minus=1)


def petersson_symbol(space: ModSymSpace, f: Eigenform) -> PeriodSymbol:
    """||f||^2 = -(1/2)[omega+, omega-]."""
    return pairing_plus_minus(space, f) * Fraction(-1, 2)


def space_summary(space: ModSymSpace, Q: int = 10) -> dict:
    out = {
        "p": space.p,
        "genus": space.genus,
        "relative_dim": space.dim,
        "cuspidal_dim": len(space.cuspidal_basis),
        "manin_symbols": space.num_symbols,
    }
    try:
        out["eigenforms"] = [f.an[1 : Q + 1] for f in rational_eigenforms(space, Q)]
    except UnsupportedLevelError as exc:
        out["eigenforms_error"] = str(exc)
    return out

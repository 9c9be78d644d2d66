"""Small exact linear algebra over Q and Z (dimensions here never exceed ~40)."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = [list(map(Fraction, r)) for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> Matrix:
    """Basis (as rows) of {x : A x = 0}."""
    if ncols is None:
        ncols = len(rows[0])
    R, piv = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(R, piv):
            x[pc] = -row[f]
        basis.append(x)
    return basis


def left_nullspace(rows: Sequence[Sequence[Fraction]]) -> Matrix:
    """Basis of {y : y A = 0}."""
    return nullspace(transpose(rows), len(rows))


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(c) for c in zip(*A)] if A else []


def matmul(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]]) -> Matrix:
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A]


def vecmat(x: Sequence[Fraction], A: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    n = len(A[0]) if A else 0
    out = [Fraction(0)] * n
    for xi, row in zip(x, A):
        if xi:
            for j, a in enumerate(row):
                out[j] += xi * a
    return out


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]


def scalar_mat(c: Fraction, n: int) -> Matrix:
    return [[Fraction(c) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def det(A: Sequence[Sequence[Fraction]]) -> Fraction:
    M = [list(map(Fraction, r)) for r in A]
    n = len(M)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            out = -out
        out *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return out


def inverse(A: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(A)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in R]


def solve_left(basis_rows: Matrix, target: Sequence[Fraction]) -> list[Fraction] | None:
    """Coefficients c with sum c_i basis_rows[i] = target, or None."""
    k = len(basis_rows)
    aug = [list(col) + [t] for col, t in zip(transpose(basis_rows), target)]
    R, piv = rref(aug)
    if k in piv:
        return None
    sol = [Fraction(0)] * k
    for row, pc in zip(R, piv):
        sol[pc] = row[k]
    return sol


def hnf_rows(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form basis of the Z-span of integer vectors."""
    A = [list(v) for v in vectors if any(v)]
    if not A:
        return []
    ncols = len(A[0])
    out: list[list[int]] = []
    row = 0
    for c in range(ncols):
        rows = [i for i in range(row, len(A)) if A[i][c] != 0]
        if not rows:
            continue
        while True:
            rows = [i for i in range(row, len(A)) if A[i][c] != 0]
            i0 = min(rows, key=lambda i: abs(A[i][c]))
            A[row], A[i0] = A[i0], A[row]
            done = True
            for i in range(row + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[row][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[row])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[row][c] < 0:
            A[row] = [-x for x in A[row]]
        for i in range(row):
            q = A[i][c] // A[row][c]
            A[i] = [x - q * y for x, y in zip(A[i], A[row])]
        row += 1
        if row == len(A):
            break
    return [r for r in A[:row]]


def common_denominator(vals: Sequence[Fraction]) -> int:
    d = 1
    for v in vals:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def primitive_integer(vals: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector with the same direction."""
    d = common_denominator(vals)
    ints = [int(v * d) for v in vals]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g else ints

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled candidate enumeration for geodesic crossings (see _kernels_py for the reference)."""

from libc.math cimport floor, ceil, fabs


cdef long long _gcd(long long a, long long b):
    a = a if a >= 0 else -a
    b = b if b >= 0 else -b
    while b:
        a, b = b, a % b
    return a


cdef long long _inv_mod(long long a, long long m):
    cdef long long t = 0, nt = 1, r = m, nr = a % m, q, tmp
    if nr < 0:
        nr += m
    while nr:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += m
    return t


cdef inline double _h(double x, double w, double wp, double s):
    return s * (x - w) / (x - wp)


def crossing_candidates(long long n, long long p, double cd_max, double xlo, double xhi,
                        double w, double wp, double s, double t_lo, double t_hi):
    """Integer matrices (A, B, C, D), det n, C in pZ_{>0}, D != 0, whose semicircle
    B/D -> A/C passes the float crossing prefilter for the segment t_lo <= -h h' < t_hi."""
    cdef list out = []
    cdef long long C, D, g, Cg, A0, A, Alo, Ahi, B, sd
    cdef double r, beta, alpha, ha, hb, prod
    cdef double lo = t_lo * (1.0 - 1e-6), hi = t_hi * (1.0 + 1e-6)
    C = p
    while C <= cd_max:
        for sd in range(-1, 2, 2):
            D = sd
            while C * (D if D > 0 else -D) <= cd_max:
                g = _gcd(C, D)
                if n % g == 0:
                    Cg = C // g
                    A0 = ((n // g) % Cg) * _inv_mod(D // g, Cg) % Cg if Cg > 1 else 0
                    r = n / (2.0 * C * fabs(<double>D))
                    Alo = <long long>floor(C * (xlo - 2.0 * r)) - 1
                    Ahi = <long long>ceil(C * (xhi + 2.0 * r)) + 1
                    A = Alo + ((A0 - Alo) % Cg + Cg) % Cg
                    while A <= Ahi:
                        B = (A * D - n) // C
                        beta = A / <double>C
                        alpha = B / <double>D
                        ha = _h(alpha, w, wp, s)
                        hb = _h(beta, w, wp, s)
                        prod = -ha * hb
                        if prod >= lo and prod < hi:
                            out.append((A, B, C, D))
                        A += Cg
                D += sd
        C += p
    return out

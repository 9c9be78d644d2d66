"""Pure-Python candidate enumeration for geodesic crossings (reference for the compiled kernel)."""

from __future__ import annotations

import math


def _h(x: float, w: float, wp: float, s: float) -> float:
    return s * (x - w) / (x - wp)


def crossing_candidates(
    n: int, p: int, cd_max: float, xlo: float, xhi: float, w: float, wp: float, s: float, t_lo: float, t_hi: float
) -> list[tuple[int, int, int, int]]:
    """Integer matrices (A, B, C, D), det n, C in pZ_{>0}, D != 0, whose semicircle
    B/D -> A/C passes the float crossing prefilter for the segment t_lo <= -h h' < t_hi."""
    out = []
    lo, hi = t_lo * (1.0 - 1e-6), t_hi * (1.0 + 1e-6)
    C = p
    while C <= cd_max:
        for sd in (-1, 1):
            D = sd
            while C * abs(D) <= cd_max:
                g = math.gcd(C, D)
                if n % g == 0:
                    Cg = C // g
                    A0 = (n // g) * pow(D // g, -1, Cg) % Cg if Cg > 1 else 0
                    r = n / (2.0 * C * abs(D))
                    Alo = math.floor(C * (xlo - 2.0 * r)) - 1
                    Ahi = math.ceil(C * (xhi + 2.0 * r)) + 1
                    A = Alo + (A0 - Alo) % Cg
                    while A <= Ahi:
                        B = (A * D - n) // C
                        ha = _h(B / D, w, wp, s)
                        hb = _h(A / C, w, wp, s)
                        prod = -ha * hb
                        if lo <= prod < hi:
                            out.append((A, B, C, D))
                        A += Cg
                D += sd
        C += p
    return out

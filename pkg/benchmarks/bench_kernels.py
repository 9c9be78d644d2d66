"""Time the compiled crossing-candidate kernel against the pure-Python one.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

from eistheta import _kernels_py
from eistheta.geometric_lift import fundamental_segment
from eistheta.lattice_cycles import automorph

try:
    from eistheta import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _workload(p: int, disc: int, n: int) -> tuple:
    seg = fundamental_segment(automorph(disc, p))
    xlo, xhi, ymin = seg.extent()
    cd_max = n / (2.0 * ymin) * (1 + 1e-9) + 1e-9
    tf, kf = float(seg.t0sq), float(seg.k)
    return (n, p, cd_max, xlo, xhi, float(seg.w), float(seg.wp), float(seg.s), tf, kf * kf * tf)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    cases = [(11, 12, 20), (11, 92, 60), (37, 136, 60)]
    print(f"{'case':<22}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for p, disc, n in cases:
        work = _workload(p, disc, n)
        ref = _kernels_py.crossing_candidates(*work)
        t_py = min(timeit.repeat(lambda: _kernels_py.crossing_candidates(*work), number=1, repeat=args.repeat))
        label = f"p={p} D={disc} n={n}"
        if _compiled is None:
            print(f"{label:<22}{t_py * 1e3:>12.2f}{'n/a':>12}{'n/a':>10}")
            continue
        assert sorted(_compiled.crossing_candidates(*work)) == sorted(ref), "backends disagree"
        t_cy = min(timeit.repeat(lambda: _compiled.crossing_candidates(*work), number=1, repeat=args.repeat))
        print(f"{label:<22}{t_py * 1e3:>12.2f}{t_cy * 1e3:>12.2f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()

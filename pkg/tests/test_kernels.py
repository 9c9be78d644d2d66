import os
import subprocess
import sys

import pytest

from eistheta import _kernels_py, kernels
from eistheta.geometric_lift import fundamental_segment
from eistheta.lattice_cycles import automorph

try:
    from eistheta import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def _workload(p, disc, n):
    seg = fundamental_segment(automorph(disc, p))
    xlo, xhi, ymin = seg.extent()
    cd_max = n / (2.0 * ymin) * (1 + 1e-9) + 1e-9
    tf, kf = float(seg.t0sq), float(seg.k)
    return (n, p, cd_max, xlo, xhi, float(seg.w), float(seg.wp), float(seg.s), tf, kf * kf * tf)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    if compiled is not None:
        assert kernels.BACKEND == "cython"


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
@pytest.mark.parametrize("p, disc, n", [(11, 12, 7), (11, 92, 20), (37, 120, 15), (37, 136, 9)])
def test_backends_agree(p, disc, n):
    work = _workload(p, disc, n)
    assert sorted(compiled.crossing_candidates(*work)) == sorted(_kernels_py.crossing_candidates(*work))


def test_pure_python_override():
    env = dict(os.environ, EISTHETA_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from eistheta import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"

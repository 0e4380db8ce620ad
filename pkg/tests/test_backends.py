"""The numpy fallback must reproduce the numba path."""
import json
import os
import subprocess
import sys
from pathlib import Path

_PROBE = r"""
import json
from fractions import Fraction
from declab._accel import backend_name
from declab import arithmetic as ar
from declab import functionals as fn
from declab.geometry import Square
from declab.quadrature import QuadratureSpec
from declab.symbols import unimodular_random

F = Fraction
g = unimodular_random(0, 16)
rep = fn.linear_ratio(g, fn.ScaleParams(F(1, 4), F(1, 4), p=6.0),
                      Square((0.0, 0.0), 16.0), QuadratureSpec())
print(json.dumps({
    "backend": backend_name(),
    "count_j": ar.count_J(7).count,
    "i1": ar.count_I1_class(20, 3, 1, 1, 1, 0).count,
    "moment": ar.weighted_sixth_moment(ar.CoefficientVector.ones(4)).weighted.real,
    "ratio": rep.ratio,
}))
"""


def _run(env_flag):
    env = dict(os.environ)
    env["LAB_NO_NUMBA"] = env_flag
    proc = subprocess.run([sys.executable, "-c", _PROBE], env=env,
                          capture_output=True, text=True,
                          cwd=str(Path(__file__).parent.parent))
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_numpy_twin_matches_numba():
    with_numba = _run("0")
    without = _run("1")
    assert without["backend"] == "numpy"
    assert with_numba["count_j"] == without["count_j"]
    assert with_numba["i1"] == without["i1"]
    assert with_numba["moment"] == without["moment"]
    assert abs(with_numba["ratio"] - without["ratio"]) <= 1e-9 * without["ratio"]

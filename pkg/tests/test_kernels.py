import math
import os
import subprocess
import sys

import numpy as np
import pytest

from latvol import _pykernels, catalog, kernels
from latvol.entropy import laplacian_symbol

compiled = pytest.importorskip("latvol._kernels")


def symbol_args(m):
    s = laplacian_symbol(m)
    return s.tails, s.heads, s.shifts[:, 0].astype(float), s.shifts[:, 1].astype(float), s.degrees.astype(float)


def test_backend_selected():
    assert kernels.BACKEND == ("python" if os.environ.get("LATVOL_PURE_PYTHON") else "compiled")


def test_pure_python_env_switch():
    code = "from latvol import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, LATVOL_PURE_PYTHON="1")
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert r.stdout.strip() == "python"


def test_clausen_backends_agree():
    x = np.linspace(0, math.pi, 2001)
    assert np.allclose(compiled.clausen_reduced(x), _pykernels.clausen_reduced(x), rtol=0, atol=1e-15)
    assert compiled.clausen_reduced(np.zeros((2, 3))).shape == (2, 3)


@pytest.mark.parametrize("name", ["square", "kagome", "4-6-12", "lattice-13"])
def test_symbol_backends_agree(name):
    m = catalog.get(name).map
    rng = np.random.default_rng(0)
    th, ph = rng.uniform(-math.pi, math.pi, (2, 500))
    args = symbol_args(m)
    a = compiled.symbol_logdet(th, ph, *args)
    b = _pykernels.symbol_logdet(th, ph, *args)
    assert np.allclose(a, b, rtol=0, atol=1e-10)
    # the symbol is singular at the origin
    assert compiled.symbol_logdet(np.zeros(1), np.zeros(1), *args)[0] == -np.inf
    assert _pykernels.symbol_logdet(np.zeros(1), np.zeros(1), *args)[0] == -np.inf


def test_symbol_scalar_input():
    args = symbol_args(catalog.get("square").map)
    a = compiled.symbol_logdet(0.3, 1.1, *args)
    b = _pykernels.symbol_logdet(0.3, 1.1, *args)
    assert a.shape == b.shape == (1,)
    assert a[0] == pytest.approx(math.log(4 - 2 * math.cos(0.3) - 2 * math.cos(1.1)), abs=1e-12)
    assert b[0] == pytest.approx(a[0], abs=1e-12)

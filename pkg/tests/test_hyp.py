import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latvol.hyp import V_OCT, V_TET, bipyramid_volume, bipyramid_volumes, lobachevsky


def L_quad(theta):
    """Lobachevsky by direct quadrature of -log|2 sin t|."""
    mpmath.mp.dps = 30
    f = lambda t: -mpmath.log(abs(2 * mpmath.sin(t)))
    pts = [0] + [k * mpmath.pi for k in range(1, int(theta / math.pi) + 1)] + [theta]
    return float(mpmath.quad(f, pts))


@pytest.mark.parametrize("theta", [1e-6, 0.1, math.pi / 6, math.pi / 4, math.pi / 3, 1.0, math.pi / 2, 2.5, 3.0])
def test_lobachevsky_matches_quadrature(theta):
    assert lobachevsky(theta) == pytest.approx(L_quad(theta), abs=1e-13)


def test_constants():
    # v_tet, v_oct to 15 digits
    assert V_TET == pytest.approx(1.0149416064096536, abs=1e-14)
    assert V_OCT == pytest.approx(3.6638623767088760, abs=1e-14)
    assert lobachevsky(math.pi / 6) == pytest.approx(1.5 * lobachevsky(math.pi / 3), abs=1e-14)


@given(st.floats(-20, 20))
def test_odd_and_periodic(x):
    assert lobachevsky(-x) == pytest.approx(-lobachevsky(x), abs=1e-13)
    assert lobachevsky(x + math.pi) == pytest.approx(lobachevsky(x), abs=1e-12)


@given(st.floats(0.01, 1.5), st.integers(2, 5))
@settings(max_examples=50)
def test_multiplication_formula(x, n):
    # L(n x) = n sum_k L(x + k pi / n)
    lhs = lobachevsky(n * x)
    rhs = n * sum(lobachevsky(x + k * math.pi / n) for k in range(n))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_array_matches_scalar():
    th = np.linspace(-4, 4, 101)
    arr = lobachevsky(th)
    assert np.allclose(arr, [lobachevsky(t) for t in th], atol=1e-15)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        lobachevsky(float("nan"))
    with pytest.raises(ValueError):
        lobachevsky(np.array([0.1, np.inf]))


def tetra_sum(n):
    """n ideal tetrahedra with dihedral angles 2 pi/n, pi/2 - pi/n, pi/2 - pi/n."""
    mpmath.mp.dps = 30
    cl = lambda t: mpmath.clsin(2, 2 * t) / 2
    return float(n * (cl(2 * mpmath.pi / n) + 2 * cl(mpmath.pi / 2 - mpmath.pi / n)))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 12, 50, 1000])
def test_bipyramid_tetrahedral_decomposition(n):
    assert bipyramid_volume(n) == pytest.approx(tetra_sum(n), abs=1e-11)


def test_bipyramid_small_and_vector():
    assert bipyramid_volume(2) == 0.0
    assert bipyramid_volume(3) == pytest.approx(2 * V_TET, abs=1e-14)
    assert bipyramid_volume(4) == pytest.approx(V_OCT, abs=1e-14)
    ns = np.arange(2, 40)
    assert np.allclose(bipyramid_volumes(ns), [bipyramid_volume(n) for n in ns], atol=1e-14)


def test_bipyramid_growth():
    # increasing, with vol(B_n) ~ 2 pi (1 + log(n / 2 pi)) since L(x) ~ x (1 - log 2x)
    vals = bipyramid_volumes(np.arange(3, 200))
    assert (np.diff(vals) > 0).all()
    n = 10**6
    assert bipyramid_volume(n) - 2 * math.pi * math.log(n) == pytest.approx(2 * math.pi * (1 - math.log(2 * math.pi)), abs=1e-5)


@pytest.mark.parametrize("bad", [1, 0, -3, 2.5])
def test_bipyramid_rejects(bad):
    with pytest.raises(ValueError):
        bipyramid_volume(bad)
    with pytest.raises(ValueError):
        bipyramid_volumes([3, 1])

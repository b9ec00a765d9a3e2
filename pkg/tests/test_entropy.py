import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latvol import catalog
from latvol.entropy import (
    ConvergenceError,
    DegeneratePolynomialError,
    LaurentPoly2,
    _hermite_2d,
    bareiss_det,
    cycle_shift_lattice,
    entropy_finite_size,
    entropy_logdet,
    laplacian_symbol,
    mahler_measure,
    tau_exact,
    tau_log_fourier,
)
from latvol.hyp import V_OCT, V_TET
from latvol.torus_map import MultiGraph, cover

CATALAN = 0.915965594177219015


def brute_force_trees(n, edges):
    """Count spanning trees by trying every (n-1)-subset of edges."""
    count = 0
    for sub in itertools.combinations(range(len(edges)), n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for k in sub:
            a, b = find(edges[k][0]), find(edges[k][1])
            if a == b:
                ok = False
                break
            parent[a] = b
        count += ok
    return count


def fraction_det(M):
    M = [[Fraction(int(x)) for x in row] for row in M]
    n, det = len(M), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return int(det)


def test_tau_small_graphs():
    k4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    c4 = [(0, 1), (1, 2), (2, 3), (3, 0)]
    assert brute_force_trees(4, k4) == tau_exact(MultiGraph(4, tuple(k4))) == 16
    assert brute_force_trees(4, c4) == tau_exact(MultiGraph(4, tuple(c4))) == 4
    assert tau_exact(MultiGraph(1, ())) == 1
    assert tau_exact(MultiGraph(3, ((0, 1),))) == 0
    # loops do not count, parallel edges do
    assert tau_exact(MultiGraph(2, ((0, 1), (0, 1), (1, 1)))) == 2


@st.composite
def small_multigraphs(draw):
    n = draw(st.integers(2, 6))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=10))
    return n, [e for e in edges]


@given(small_multigraphs())
@settings(max_examples=80, deadline=None)
def test_tau_matches_enumeration(g):
    n, edges = g
    assert tau_exact(MultiGraph(n, tuple(edges))) == brute_force_trees(n, edges)


@given(st.lists(st.lists(st.integers(-9, 9), min_size=5, max_size=5), min_size=5, max_size=5))
@settings(max_examples=60)
def test_bareiss_matches_fraction_elimination(rows):
    assert bareiss_det(np.array(rows, dtype=object)) == fraction_det(rows)


def test_bareiss_big_integers():
    M = np.array([[10**30, 1], [1, 10**30]], dtype=object)
    assert bareiss_det(M) == 10**60 - 1


@pytest.mark.parametrize("name", catalog.names())
def test_fourier_matches_exact(name):
    m = catalog.get(name).map
    for n in (1, 2, 3):
        assert tau_log_fourier(m, n) == pytest.approx(math.log(tau_exact(cover(m, n, n))), abs=1e-8)


def test_fourier_rejects_bad_size(square):
    with pytest.raises(ValueError):
        tau_log_fourier(square, 0)


def test_symbol_square(square):
    sym = laplacian_symbol(square)
    for th, ph in [(0.3, 1.1), (2.0, -0.5), (math.pi, math.pi)]:
        assert np.ravel(sym.logdet(th, ph))[0] == pytest.approx(math.log(4 - 2 * math.cos(th) - 2 * math.cos(ph)), abs=1e-12)
    M = sym.matrix(0.7, 0.2)
    assert np.allclose(M, M.conj().T)


def test_hermite():
    assert _hermite_2d([[1, 1], [1, -1]]).tolist() == [[1, 1], [0, 2]]
    assert _hermite_2d([[1, 0], [0, 1], [3, 4]]).tolist() == [[1, 0], [0, 1]]
    assert _hermite_2d([[1, 6], [0, 17]]).tolist() == [[1, 6], [0, 17]]
    with pytest.raises(ValueError):
        _hermite_2d([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        _hermite_2d([])


@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=2, max_size=6))
def test_hermite_determinant_is_index(vecs):
    # index of the span equals the gcd of all 2x2 minors
    g = 0
    for (a, b), (c, d) in itertools.combinations(vecs, 2):
        g = math.gcd(g, a * d - b * c)
    if g == 0:
        with pytest.raises(ValueError):
            _hermite_2d(vecs)
        return
    H = _hermite_2d(vecs)
    assert H[0, 0] * H[1, 1] == g
    assert 0 <= H[0, 1] < H[1, 1]


def test_cycle_shift_lattice_catalog(entries):
    for e in entries.values():
        H = cycle_shift_lattice(e.map)
        assert H.tolist() == [[1, 0], [0, 1]], e.name


EXACT = {
    "triangular": 10 * V_TET / (2 * math.pi),
    "square": 4 * CATALAN / math.pi,
    "hexagonal": 10 * V_TET / (2 * math.pi),
    "kagome": 10 * V_TET / (2 * math.pi) + math.log(6),
    "3-12-12": 10 * V_TET / (2 * math.pi) + math.log(15),
}


@pytest.mark.parametrize("name", sorted(EXACT))
def test_logdet_exact(name):
    m = catalog.get(name).map
    est = entropy_logdet(m, tol=1e-6)
    assert est.method == "logdet"
    assert est.value == pytest.approx(EXACT[name], abs=1e-6)
    assert est.error < 1e-6


def test_square_entropy_is_voct_over_pi():
    assert 4 * CATALAN / math.pi == pytest.approx(V_OCT / math.pi, abs=1e-15)


def test_logdet_cell_limit(square):
    with pytest.raises(ConvergenceError) as info:
        entropy_logdet(square, tol=1e-12, max_cells=200)
    assert info.value.estimate is not None


@pytest.mark.parametrize("name,z", [("square", V_OCT / math.pi), ("triangular", 10 * V_TET / (2 * math.pi))])
def test_finite_size(name, z):
    est = entropy_finite_size(catalog.get(name).map, (8, 16, 32, 64))
    assert est.value == pytest.approx(z, abs=1e-4)
    assert len(est.sequence) == 4
    # the raw sequence approaches z from below on these lattices
    assert all(v < z for _, v in est.sequence)
    with pytest.raises(ValueError):
        entropy_finite_size(catalog.get(name).map, (16, 8))


# ----------------------------------------------------------------------
# Mahler measures


def test_parse_and_text_round_trip():
    p = LaurentPoly2.parse("# comment\n1 0 0\n-2.5 1 -1  # trailing\n\n3 2 0\n")
    assert p.terms == {(0, 0): 1.0, (1, -1): -2.5, (2, 0): 3.0}
    assert LaurentPoly2.parse(p.to_text()) == p
    assert p(1.0, 1.0) == pytest.approx(1.5)
    assert LaurentPoly2.parse("1 0 0\n-1 0 0\n").is_zero()


@pytest.mark.parametrize("text", ["1 2\n", "x 1 1\n", "1 0.5 1\n", "1 1 1 1\n"])
def test_parse_errors(text):
    with pytest.raises(ValueError, match="line 1"):
        LaurentPoly2.parse(text)


def test_mahler_zero_polynomial():
    with pytest.raises(DegeneratePolynomialError):
        mahler_measure(LaurentPoly2({}))


@pytest.mark.parametrize(
    "terms,expected",
    [
        ({(0, 0): 2.0}, math.log(2)),
        ({(0, 1): 1.0}, 0.0),
        ({(1, 0): 1.0, (0, 0): -3.0}, math.log(3)),
        ({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0}, 1.5 * float(mpmath.clsin(2, 2 * mpmath.pi / 3)) / math.pi),
        ({(0, 0): 4.0, (1, 0): -1.0, (-1, 0): -1.0, (0, 1): -1.0, (0, -1): -1.0}, 4 * CATALAN / math.pi),
    ],
)
def test_mahler_known_values(terms, expected):
    est = mahler_measure(LaurentPoly2(terms), tol=1e-8)
    assert est.value == pytest.approx(expected, abs=1e-7)


def test_mahler_one_plus_z_plus_w_is_vtet_over_pi():
    est = mahler_measure(LaurentPoly2({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0}), tol=1e-8)
    assert est.value == pytest.approx(V_TET / math.pi, abs=1e-7)


linear = st.tuples(
    st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.booleans()
).map(lambda t: LaurentPoly2({(0, 0): t[0], (1, 0): t[1] * (-1 if t[3] else 1), (0, 1): t[2]}))


@given(linear, linear)
@settings(max_examples=15, deadline=None)
def test_mahler_multiplicative(p, q):
    tol = 1e-5
    mp, mq, mpq = (mahler_measure(x, tol).value for x in (p, q, p * q))
    assert mpq == pytest.approx(mp + mq, abs=2 * tol)


def test_mahler_monomial_shift_invariant():
    p = LaurentPoly2({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0})
    q = p * LaurentPoly2({(3, -2): 1.0})
    assert mahler_measure(q).value == pytest.approx(mahler_measure(p).value, abs=1e-9)

"""
Spanning tree entropy of periodic graphs.

Three independent routes to the entropy per fundamental domain:

* the mean of ``log det`` of the Laplacian symbol over the unit torus,
  integrated by adaptive dyadic Gauss-Legendre cubature;
* the Mahler measure of a two-variable polynomial via Jensen's formula;
* exact tree counts of finite torus covers (Fourier product, checked
  against fraction-free elimination) with finite-size extrapolation.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Mapping

import numpy as np
from scipy import integrate

from . import kernels
from .torus_map import MultiGraph, ToroidalMap

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


class ConvergenceError(RuntimeError):
    """Quadrature budget exhausted; ``estimate`` holds the best value so far."""

    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate


class DegeneratePolynomialError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class EntropyEstimate:
    value: float
    method: str
    error: float
    samples: int
    sequence: tuple = ()


# ----------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly2:
    """Two-variable Laurent polynomial ``sum c[a, b] z^a w^b`` with real
    coefficients; zero coefficients are dropped."""

    def __init__(self, terms: Mapping[tuple[int, int], float]):
        acc: dict[tuple[int, int], float] = {}
        for (a, b), c in dict(terms).items():
            key = (int(a), int(b))
            acc[key] = acc.get(key, 0.0) + float(c)
        self.terms = {k: c for k, c in sorted(acc.items()) if c != 0.0}

    def __repr__(self):
        return f"LaurentPoly2({self.terms!r})"

    def __eq__(self, other):
        return isinstance(other, LaurentPoly2) and self.terms == other.terms

    def __mul__(self, other: "LaurentPoly2") -> "LaurentPoly2":
        out: dict[tuple[int, int], float] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0.0) + c1 * c2
        return LaurentPoly2(out)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, z, w):
        return sum(c * z**a * w**b for (a, b), c in self.terms.items())

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly2":
        """Read lines ``c a b`` (meaning ``c z^a w^b``); ``#`` starts a comment."""
        terms: dict[tuple[int, int], float] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'c a b', got {raw!r}")
            try:
                c = float(parts[0])
                a, b = int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            terms[(a, b)] = terms.get((a, b), 0.0) + c
        return cls(terms)

    @classmethod
    def load(cls, path) -> "LaurentPoly2":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def to_text(self) -> str:
        return "".join(f"{c!r} {a} {b}\n" for (a, b), c in self.terms.items())

    def w_coefficients(self, theta):
        """Coefficients in ``w`` (highest power first) at ``z = e^{i theta}``."""
        bs = [b for _, b in self.terms]
        lo, hi = min(bs), max(bs)
        coef = np.zeros(hi - lo + 1, dtype=complex)
        for (a, b), c in self.terms.items():
            coef[hi - b] += c * np.exp(1j * a * theta)
        return coef


def _jensen(coef) -> float:
    """Mahler measure of a one-variable polynomial (highest power first)."""
    lead = coef[0]
    deg = len(coef) - 1
    if deg == 0:
        return math.log(abs(lead))
    comp = np.zeros((deg, deg), dtype=complex)
    comp[0, :] = -coef[1:] / lead
    comp[np.arange(1, deg), np.arange(deg - 1)] = 1.0
    roots = np.linalg.eigvals(comp)
    return math.log(abs(lead)) + float(np.sum(np.log(np.maximum(1.0, np.abs(roots)))))


def mahler_measure(p: LaurentPoly2, tol: float = 1e-5) -> EntropyEstimate:
    """Logarithmic Mahler measure of ``p`` over the unit torus.

    For each ``z = e^{i theta}`` the inner average over ``w`` is given by
    Jensen's formula from the roots of ``p(z, .)``; the outer average is
    adaptive Gauss-Kronrod quadrature.
    """
    if p.is_zero():
        raise DegeneratePolynomialError("the zero polynomial has no Mahler measure")
    count = [0]

    def f(theta):
        count[0] += 1
        coef = np.trim_zeros(p.w_coefficients(theta), "f")
        if len(coef) == 0:
            return -math.inf
        return _jensen(coef)

    val, err = integrate.quad(f, 0.0, TWO_PI, epsabs=tol * TWO_PI / 4, epsrel=0.0, limit=2000)
    return EntropyEstimate(val / TWO_PI, "mahler", err / TWO_PI, count[0])


# ----------------------------------------------------------------------
# Laplacian symbol


@dataclasses.dataclass(frozen=True, eq=False)
class LaplacianSymbol:
    """``L(e^{i theta}, e^{i phi}) = D - A(z, w)``; ``A[u, v]`` sums
    ``z^a w^b`` over darts from ``u`` to ``v`` with shift ``(a, b)``."""

    dimension: int
    tails: np.ndarray
    heads: np.ndarray
    shifts: np.ndarray
    degrees: np.ndarray

    def matrix(self, theta: float, phi: float) -> np.ndarray:
        L = np.diag(self.degrees.astype(complex))
        phase = np.exp(1j * (self.shifts[:, 0] * theta + self.shifts[:, 1] * phi))
        np.add.at(L, (self.tails, self.heads), -phase)
        return L

    def logdet(self, theta, phi) -> np.ndarray:
        return kernels.symbol_logdet(
            np.asarray(theta, float),
            np.asarray(phi, float),
            self.tails,
            self.heads,
            self.shifts[:, 0].astype(float),
            self.shifts[:, 1].astype(float),
            self.degrees.astype(float),
        )


def laplacian_symbol(m: ToroidalMap) -> LaplacianSymbol:
    idx = np.arange(m.n_darts)
    return LaplacianSymbol(
        m.n_vertices,
        m.vertex_of.copy(),
        m.vertex_of[idx ^ 1].copy(),
        m.shift.copy(),
        m.degrees.copy(),
    )


def cycle_shift_lattice(m: ToroidalMap) -> np.ndarray:
    """2x2 integer basis (rows) of the lattice of shifts of closed walks.

    Raises ``ValueError`` when the closed walks do not span a rank-2 lattice.
    """
    V = m.n_vertices
    cell = [None] * V
    cell[0] = np.zeros(2, dtype=np.int64)
    adj = [[] for _ in range(V)]
    for d in range(m.n_darts):
        adj[m.vertex_of[d]].append(d)
    stack = [0]
    while stack:
        u = stack.pop()
        for d in adj[u]:
            v = int(m.vertex_of[d ^ 1])
            if cell[v] is None:
                cell[v] = cell[u] + m.shift[d]
                stack.append(v)
    if any(c is None for c in cell):
        raise ValueError("map is disconnected")
    gens = []
    for d in range(0, m.n_darts, 2):
        g = cell[m.vertex_of[d]] + m.shift[d] - cell[m.vertex_of[d + 1]]
        if g.any():
            gens.append([int(g[0]), int(g[1])])
    return _hermite_2d(gens)


def _hermite_2d(vectors) -> np.ndarray:
    """Upper-triangular basis (rows) of the Z-span of integer 2-vectors."""
    a = (0, 0)
    g2 = 0
    for v in vectors:
        x = (int(v[0]), int(v[1]))
        while x[0] != 0:
            q = a[0] // x[0]
            a, x = x, (a[0] - q * x[0], a[1] - q * x[1])
        g2 = math.gcd(g2, x[1])
    if a[0] < 0:
        a = (-a[0], -a[1])
    if a[0] == 0 or g2 == 0:
        raise ValueError("shifts of closed walks do not span a rank-2 lattice")
    return np.array([[a[0], a[1] % g2], [0, g2]], dtype=np.int64)


def _singular_grid(m: ToroidalMap):
    """Grid size ``N`` and the zeros of ``det L`` as points of ``Z_N^2``.

    The determinant vanishes exactly at the characters that are trivial
    on every closed-walk shift; they sit on the grid ``(2 pi / N) Z^2``.
    """
    basis = cycle_shift_lattice(m)
    N = int(abs(round(np.linalg.det(basis))))
    pts = set()
    for x in range(N):
        for y in range(N):
            r = basis @ np.array([x, y])
            if (r % N == 0).all():
                pts.add((x, y))
    return N, pts


_GL_ORDER = 8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


def _cell_rule(x0, y0, h):
    """Tensor Gauss-Legendre nodes/weights for squares ``[x0, x0+h] x [y0, y0+h]``."""
    u = (_GL_X + 1) / 2
    wx = _GL_W / 2
    xs = x0[:, None, None] + h[:, None, None] * u[None, :, None]
    ys = y0[:, None, None] + h[:, None, None] * u[None, None, :]
    xs, ys = np.broadcast_arrays(xs, ys)
    w = (h * h)[:, None, None] * (wx[:, None] * wx[None, :])[None]
    return xs.reshape(len(x0), -1), ys.reshape(len(x0), -1), w.reshape(len(x0), -1)


def _integrate_cells(sym, x0, y0, h, scale):
    """Integral of log det L over each cell (coordinates in grid units)."""
    if len(x0) == 0:
        return np.zeros(0)
    xs, ys, w = _cell_rule(x0, y0, h)
    vals = sym.logdet(xs.ravel() * scale, ys.ravel() * scale).reshape(xs.shape)
    return (vals * w).sum(axis=1) * scale * scale


def entropy_logdet(m: ToroidalMap, tol: float = 1e-4, max_cells: int = 2_000_000) -> EntropyEstimate:
    """Entropy per fundamental domain ``(2 pi)^-2 int log det L``.

    Cells are refined level by level.  A cell is accepted when its estimate
    agrees with the sum over its four children; regular cells share half
    of ``tol`` in proportion to area, cells touching a zero of ``det L``
    share a quarter.
    """
    sym = laplacian_symbol(m)
    N, sing = _singular_grid(m)
    scale = TWO_PI / N
    norm = 1.0 / (TWO_PI * TWO_PI)
    area_total = float(N * N)

    gx, gy = np.meshgrid(np.arange(N, dtype=float), np.arange(N, dtype=float), indexing="ij")
    x0, y0 = gx.ravel(), gy.ravel()
    h = np.ones_like(x0)
    est = _integrate_cells(sym, x0, y0, h, scale)
    samples = len(x0) * _GL_ORDER**2

    def touches(xc, yc, hc):
        out = np.zeros(len(xc), bool)
        if not sing:
            return out
        for cx in (0.0, 1.0):
            for cy in (0.0, 1.0):
                px, py = xc + cx * hc, yc + cy * hc
                ix, iy = np.round(px), np.round(py)
                on_grid = (np.abs(px - ix) < 1e-12) & (np.abs(py - iy) < 1e-12)
                hit = np.array([(int(a) % N, int(b) % N) in sing for a, b in zip(ix, iy)])
                out |= on_grid & hit
        return out

    total = 0.0
    err_total = 0.0
    n_cells = len(x0)
    n_sing = max(len(sing), 1)
    while len(x0):
        hh = h / 2
        cx = np.concatenate([x0, x0 + hh, x0, x0 + hh])
        cy = np.concatenate([y0, y0, y0 + hh, y0 + hh])
        ch = np.concatenate([hh, hh, hh, hh])
        child = _integrate_cells(sym, cx, cy, ch, scale)
        samples += len(cx) * _GL_ORDER**2
        n_cells += len(cx)
        k = len(x0)
        child_sum = child[:k] + child[k : 2 * k] + child[2 * k : 3 * k] + child[3 * k :]
        err = np.abs(est - child_sum) * norm
        sing_cell = touches(x0, y0, h)
        allow = np.where(sing_cell, 0.25 * tol / n_sing, 0.5 * tol * (h * h) / area_total)
        done = err <= allow
        total += float(np.sum(child_sum[done]))
        err_total += float(np.sum(err[done]))
        if n_cells > max_cells:
            partial = (total + float(np.sum(child_sum[~done]))) * norm
            raise ConvergenceError(
                f"log-det quadrature exceeded {max_cells} cells",
                EntropyEstimate(partial, "logdet", float("inf"), samples),
            )
        keep = ~done
        idx = np.flatnonzero(keep)
        x0 = np.concatenate([cx[:k][keep], cx[k : 2 * k][keep], cx[2 * k : 3 * k][keep], cx[3 * k :][keep]])
        y0 = np.concatenate([cy[:k][keep], cy[k : 2 * k][keep], cy[2 * k : 3 * k][keep], cy[3 * k :][keep]])
        h = np.concatenate([ch[:k][keep]] * 4)
        est = np.concatenate([child[:k][idx], child[k : 2 * k][idx], child[2 * k : 3 * k][idx], child[3 * k :][idx]])
    return EntropyEstimate(total * norm, "logdet", err_total, samples)


# ----------------------------------------------------------------------
# exact finite counts


def _laplacian_int(g: MultiGraph) -> np.ndarray:
    n = g.n_vertices
    L = np.zeros((n, n), dtype=object)
    L[:, :] = 0
    for a, b in g.edges:
        if a == b:
            continue
        L[a, a] += 1
        L[b, b] += 1
        L[a, b] -= 1
        L[b, a] -= 1
    return L


def bareiss_det(M) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    A = np.array(M, dtype=object)
    n = A.shape[0]
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k, k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i, k] != 0), None)
            if piv is None:
                return 0
            A[[k, piv]] = A[[piv, k]]
            sign = -sign
        p = A[k, k]
        sub = A[k + 1 :, k + 1 :] * p - np.outer(A[k + 1 :, k], A[k, k + 1 :])
        A[k + 1 :, k + 1 :] = sub // prev
        A[k + 1 :, k] = 0
        prev = p
    return sign * int(A[n - 1, n - 1])


def tau_exact(g: MultiGraph) -> int:
    """Number of spanning trees (matrix-tree theorem, exact integers)."""
    n = g.n_vertices
    if n <= 1:
        return 1
    pairs = [(a, b) for a, b in g.edges if a != b]
    from .torus_map import _connected_vertices

    if not _connected_vertices(n, pairs):
        log.warning("graph is disconnected; it has no spanning tree")
        return 0
    L = _laplacian_int(g)
    return bareiss_det(L[1:, 1:])


def tau_log_fourier(m: ToroidalMap, n: int) -> float:
    """``log tau`` of the ``n x n`` torus cover from the eigen-decomposition
    of the cover Laplacian into characters."""
    if n < 1:
        raise ValueError("n must be positive")
    sym = laplacian_symbol(m)
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    j, k = j.ravel()[1:], k.ravel()[1:]
    total = 0.0
    if len(j):
        vals = sym.logdet(TWO_PI * j / n, TWO_PI * k / n)
        if not np.all(np.isfinite(vals)):
            return -math.inf
        total = float(np.sum(vals))
    ev = np.linalg.eigvalsh(sym.matrix(0.0, 0.0))
    tiny = 1e-9 * max(1.0, float(np.abs(ev).max()))
    nonzero = ev[np.abs(ev) > tiny]
    if len(ev) - len(nonzero) != 1:
        return -math.inf
    total += float(np.sum(np.log(nonzero)))
    return total - math.log(n * n * m.n_vertices)


def entropy_finite_size(m: ToroidalMap, n_list=(8, 16, 32, 64)) -> EntropyEstimate:
    """Entropy per vertex extrapolated from torus covers.

    Fits ``z_n = z + c log(n) / n^2 + d / n^2`` through the three largest
    sizes; the error estimate is the shift against the fit through the
    three next-largest (or against the largest raw value when fewer sizes
    are given).
    """
    ns = [int(x) for x in n_list]
    if any(b <= a for a, b in zip(ns, ns[1:])) or not ns:
        raise ValueError("n_list must be a non-empty increasing sequence")
    V = m.n_vertices
    seq = tuple((n, tau_log_fourier(m, n) / (n * n * V)) for n in ns)

    def fit(points):
        A = np.array([[1.0, math.log(n) / n**2, 1.0 / n**2] for n, _ in points])
        b = np.array([z for _, z in points])
        return float(np.linalg.solve(A, b)[0])

    if len(seq) >= 3:
        value = fit(seq[-3:])
        ref = fit(seq[-4:-1]) if len(seq) >= 4 else seq[-1][1]
    else:
        value = seq[-1][1]
        ref = seq[0][1]
    return EntropyEstimate(value, "finite-size", abs(value - ref), len(seq), seq)

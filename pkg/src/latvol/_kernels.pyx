# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Clausen series and Laplacian-symbol log-determinants."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, cos, sin, sqrt, INFINITY

from ._series import CLAUSEN_COEFFS

cnp.import_array()

cdef double[::1] _COEFFS = np.array(CLAUSEN_COEFFS, dtype=np.float64)


def clausen_reduced(x):
    """Cl_2(x) for ``x`` in ``[0, pi]``, elementwise."""
    cdef cnp.ndarray[double, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(xa)
    cdef Py_ssize_t i, k, n = xa.shape[0], nc = _COEFFS.shape[0]
    cdef double xi, x2, acc
    for i in range(n):
        xi = xa[i]
        if xi <= 0.0:
            out[i] = 0.0
            continue
        x2 = xi * xi
        acc = 0.0
        for k in range(nc - 1, -1, -1):
            acc = acc * x2 + _COEFFS[k]
        out[i] = xi - xi * log(xi) + xi * x2 * acc
    return out.reshape(np.shape(x))


def symbol_logdet(theta, phi, tails, heads, sa, sb, deg):
    """log det of the Laplacian symbol at each node ``(theta[i], phi[i])``.

    Hermitian Cholesky in place on a small dense buffer; ``-inf`` when a
    pivot is not positive.
    """
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef long[::1] tl = np.ascontiguousarray(tails, dtype=np.int64)
    cdef long[::1] hd = np.ascontiguousarray(heads, dtype=np.int64)
    cdef double[::1] fa = np.ascontiguousarray(sa, dtype=np.float64)
    cdef double[::1] fb = np.ascontiguousarray(sb, dtype=np.float64)
    cdef double[::1] dg = np.ascontiguousarray(deg, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0], nv = dg.shape[0], ne = tl.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[:, ::1] re = np.zeros((nv, nv))
    cdef double[:, ::1] im = np.zeros((nv, nv))
    cdef Py_ssize_t i, j, k, p, q
    cdef double ang, s, sr, si, piv, total
    cdef bint ok
    for i in range(n):
        for p in range(nv):
            for q in range(nv):
                re[p, q] = 0.0
                im[p, q] = 0.0
            re[p, p] = dg[p]
        for k in range(ne):
            ang = th[i] * fa[k] + ph[i] * fb[k]
            re[tl[k], hd[k]] -= cos(ang)
            im[tl[k], hd[k]] -= sin(ang)
        # lower Cholesky: A = L L^H, only the lower triangle is read
        total = 0.0
        ok = True
        for j in range(nv):
            s = re[j, j]
            for k in range(j):
                s -= re[j, k] * re[j, k] + im[j, k] * im[j, k]
            if s <= 0.0:
                ok = False
                break
            piv = sqrt(s)
            total += 2.0 * log(piv)
            re[j, j] = piv
            im[j, j] = 0.0
            for p in range(j + 1, nv):
                sr = re[p, j]
                si = im[p, j]
                for k in range(j):
                    # L[p,k] * conj(L[j,k])
                    sr -= re[p, k] * re[j, k] + im[p, k] * im[j, k]
                    si -= im[p, k] * re[j, k] - re[p, k] * im[j, k]
                re[p, j] = sr / piv
                im[p, j] = si / piv
        out[i] = total if ok else -INFINITY
    return out

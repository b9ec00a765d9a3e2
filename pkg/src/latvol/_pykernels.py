"""Pure numpy versions of the hot loops; used when the extension is absent."""
import numpy as np

from ._series import CLAUSEN_COEFFS

_CHUNK = 4096


def clausen_reduced(x):
    """Cl_2(x) for ``x`` in ``[0, pi]``, elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    nz = x > 0
    xs = x[nz]
    x2 = xs * xs
    acc = np.zeros_like(xs)
    for c in CLAUSEN_COEFFS[::-1]:
        acc = acc * x2 + c
    out[nz] = xs - xs * np.log(xs) + xs * x2 * acc
    return out


def symbol_logdet(theta, phi, tails, heads, sa, sb, deg):
    """log det of the Laplacian symbol at each node ``(theta[i], phi[i])``.

    Returns ``-inf`` where the matrix is numerically singular.
    """
    theta = np.ravel(np.asarray(theta, float))
    phi = np.ravel(np.asarray(phi, float))
    nv = len(deg)
    out = np.empty(len(theta))
    for lo in range(0, len(theta), _CHUNK):
        th = theta[lo : lo + _CHUNK]
        ph = phi[lo : lo + _CHUNK]
        n = len(th)
        mat = np.zeros((n, nv, nv), dtype=complex)
        idx = np.arange(nv)
        mat[:, idx, idx] = deg
        phase = np.exp(1j * (np.outer(th, sa) + np.outer(ph, sb)))
        for k in range(len(tails)):
            mat[:, tails[k], heads[k]] -= phase[:, k]
        try:
            chol = np.linalg.cholesky(mat)
            diag = np.abs(chol[:, idx, idx])
            out[lo : lo + n] = 2.0 * np.log(diag).sum(axis=1)
        except np.linalg.LinAlgError:
            ev = np.linalg.eigvalsh(mat)
            with np.errstate(divide="ignore", invalid="ignore"):
                bad = ev.min(axis=1) <= 1e-14 * np.abs(ev).max(axis=1)
                vals = np.log(np.where(ev > 0, ev, 1.0)).sum(axis=1)
            vals[bad] = -np.inf
            out[lo : lo + n] = vals
    return out

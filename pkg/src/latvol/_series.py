"""Power-series coefficients for the Clausen function near zero.

Cl_2(x) = x - x log x + sum_{k>=1} |B_2k| x^(2k+1) / (2k (2k+1)!),
valid for |x| < 2 pi.
"""
from fractions import Fraction
from math import comb, factorial

N_TERMS = 40


def _bernoulli(n):
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b


def _coeffs(n_terms):
    b = _bernoulli(2 * n_terms)
    return tuple(
        float(abs(b[2 * k]) / (2 * k * factorial(2 * k + 1))) for k in range(1, n_terms + 1)
    )


CLAUSEN_COEFFS = _coeffs(N_TERMS)

"""Special functions used by the reference solutions.

erfc/erfcx and the Bessel functions J0/J1 are thin wrappers over scipy's
vetted implementations (absolute error well under 1e-12 on the working
ranges; the tests assert the contract independently).  The complex
polylogarithms Li_2/3/4 on the closed unit disk are implemented here because
no pre-installed package offers a vectorized version; they accelerate the
slowly convergent Fourier-series tails of the furrow solution.
"""

from __future__ import annotations

import numpy as np
import scipy.special as sps

__all__ = ["erfc", "erfcx", "bessel_j0", "bessel_j1", "polylog"]


def erfc(x):
    """Complementary error function."""
    return sps.erfc(np.asarray(x, dtype=float))


def erfcx(x):
    """Scaled complementary error function e^{x^2} erfc(x)."""
    return sps.erfcx(np.asarray(x, dtype=float))


def bessel_j0(x):
    """Bessel function of the first kind, order 0."""
    return sps.j0(np.asarray(x, dtype=float))


def bessel_j1(x):
    """Bessel function of the first kind, order 1."""
    return sps.j1(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# Polylogarithm Li_s (s = 2, 3, 4) for complex |w| <= 1.
#
# |w| <= 0.6: defining power series.  0.6 < |w| <= 1: the expansion of
# Li_s(e^mu) in powers of mu = Log w (|mu| < 2 pi), which for integer s reads
#
#   Li_s(e^mu) = mu^{s-1}/(s-1)! (H_{s-1} - Log(-mu))
#                + sum_{n != s-1} zeta(s-n) mu^n / n!
#
# with H_k the harmonic numbers.  On the closed unit disk Re(mu) <= 0, so
# Log(-mu) stays on the principal branch (w = 1, mu = 0 is excluded).
# ---------------------------------------------------------------------------

_SERIES_RADIUS = 0.6
_N_SERIES = 84
_N_JONQ = 72

_HARMONIC = {1: 1.0, 2: 1.5, 3: 11.0 / 6.0}


def _zeta_table(p: int, n_terms: int) -> np.ndarray:
    """zeta(p - n) for n = 0..n_terms-1 (the n = p-1 slot is unused)."""
    out = np.zeros(n_terms)
    # Bernoulli numbers B_0..B_k with k large enough for zeta(negative).
    bern = sps.bernoulli(n_terms + 4)
    for n in range(n_terms):
        s = p - n
        if s > 1:
            out[n] = sps.zeta(s)
        elif s == 1:
            out[n] = np.nan  # replaced by the logarithmic term
        elif s == 0:
            out[n] = -0.5
        else:
            m = -s
            out[n] = 0.0 if m % 2 == 0 else -bern[m + 1] / (m + 1)
    return out


_ZETA = {p: _zeta_table(p, _N_JONQ) for p in (2, 3, 4)}
_INV_FACT = 1.0 / sps.factorial(np.arange(_N_JONQ))


def polylog(p: int, w):
    """Li_p(w) for p in {2, 3, 4}, vectorized over complex |w| <= 1."""
    if p not in (2, 3, 4):
        raise ValueError("polylog implemented for orders 2, 3, 4 only")
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    r = np.abs(w)
    if np.any(r > 1.0 + 1e-12):
        raise ValueError("polylog implemented on |w| <= 1 only")
    out = np.empty_like(w)

    inner = r <= _SERIES_RADIUS
    if np.any(inner):
        wi = w[inner]
        acc = np.zeros_like(wi)
        term = np.ones_like(wi)
        for n in range(1, _N_SERIES + 1):
            term = term * wi
            acc += term / n**p
        out[inner] = acc

    outer = ~inner
    if np.any(outer):
        wo = w[outer]
        mu = np.log(wo)  # Re(mu) <= 0 on the unit disk
        zt = _ZETA[p]
        acc = np.zeros_like(wo)
        mun = np.ones_like(wo)
        for n in range(_N_JONQ):
            if n != p - 1:
                acc += zt[n] * _INV_FACT[n] * mun
            mun = mun * mu
        # logarithmic term at n = p - 1 (its mu -> 0 limit is 0, so guard the log)
        mup = mu ** (p - 1)
        neg_mu = np.where(mu == 0.0, 1.0, -mu)
        acc += mup / sps.factorial(p - 1) * (_HARMONIC[p - 1] - np.log(neg_mu))
        out[outer] = acc

    return out[0] if scalar else out

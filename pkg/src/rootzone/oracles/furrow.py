"""Steady-periodic strip-source (furrow) solution in a 2D cross-section.

The Kirchhoff variable of the nonlinear-uptake soil family admits the exact
separated solution

    mu(x, z, t) = (theta_s / (alpha^2 t_s)) e^{(A/t_s) t} Phi(x, z),
    Phi(x, z)   = sum_{j>=0} c_j cos(j pi x / l) e^{-lambda_j z},

where each mode exponent solves the characteristic quadratic of the steady
transformed operator Lap(Phi) - alpha dPhi/dz + k alpha^2 Phi = 0:

    lambda_j = (alpha/2) (sqrt(1 + 4 ((j pi / (alpha l))^2 - k)) - 1),

and the coefficients c_j = 2 A_j / (1 + sqrt(S_j)) carry the cosine expansion
of the surface-source indicator (A_0 = F0 x0 / (K_s l),
A_j = 2 F0 sin(j pi x0 / l) / (K_s j pi)).  With these choices the vertical
flux -d(mu)/dz + alpha mu at z = 0 reproduces F0 e^{(A/t_s)t} on the strip
x <= x0 and 0 outside, mode by mode.

Series evaluation: direct summation where the depth factor q = e^{-pi z / l}
gives geometric decay; near the surface (q > 0.6) the coefficient tail is
expanded in powers of 1/j to three orders whose sums are closed-form
polylogarithms, leaving a certified remainder below ``tail_rel_bound`` times
Phi(0, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, OracleError
from ..hydraulics import Model2Params
from .special import polylog

__all__ = ["FurrowSource"]

_Q_SWITCH = 0.6          # depth factor below which direct summation is used
_J_NEAR = 1400           # exact-minus-asymptotic partial-sum length
_TAIL_REL = 1e-12        # certified tail bound, relative to Phi(0, 0)


@dataclass(frozen=True)
class FurrowSource:
    """Furrow geometry, soil scales, and plant parameters (cm/h units)."""

    F0: float            # irrigation rate through the strip [cm/h]
    x0: float            # strip half-width [cm]
    l: float             # half-period of the furrow pattern [cm]
    K_s: float           # saturated conductivity [cm/h]
    alpha: float         # 1/cm
    theta_s: float
    plant: Model2Params
    include_mean: bool = True   # keep the j = 0 (mean infiltration) mode

    def __post_init__(self):
        if not (0.0 < self.x0 < self.l):
            raise DomainError("need 0 < x0 < l")
        if min(self.F0, self.K_s, self.alpha, self.theta_s) <= 0.0:
            raise DomainError("F0, K_s, alpha, theta_s must be positive")

    # -- modes ---------------------------------------------------------------

    @property
    def time_rate(self) -> float:
        """Exponential time-decay rate A/t_s [1/h]."""
        return self.plant.A / self.plant.t_s

    @property
    def mu_prefactor(self) -> float:
        return self.theta_s / (self.alpha**2 * self.plant.t_s)

    def sqrt_S(self, j):
        j = np.asarray(j, dtype=float)
        return np.sqrt(1.0 + 4.0 * ((j * np.pi / (self.alpha * self.l)) ** 2
                                    - self.plant.k))

    def lambda_j(self, j):
        """Depth-decay exponent of mode j [1/cm]."""
        return 0.5 * self.alpha * (self.sqrt_S(j) - 1.0)

    def characteristic_residual(self, j) -> float:
        """|lam^2 + alpha lam + k alpha^2 - (j pi / l)^2|, 0 for exact modes."""
        lam = self.lambda_j(j)
        j = np.asarray(j, dtype=float)
        res = lam**2 + self.alpha * lam + self.plant.k * self.alpha**2 \
            - (j * np.pi / self.l) ** 2
        return np.abs(res)

    def fourier_A(self, j):
        """A_j of the source indicator: A_0 = F0 x0/(K_s l), else Fourier."""
        j = np.asarray(j, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            aj = 2.0 * self.F0 * np.sin(j * np.pi * self.x0 / self.l) \
                / (self.K_s * j * np.pi)
        return np.where(j == 0, self.F0 * self.x0 / (self.K_s * self.l), aj)

    def coeff(self, j):
        """Series coefficient c_j = 2 A_j / (1 + sqrt(S_j))."""
        return 2.0 * self.fourier_A(j) / (1.0 + self.sqrt_S(j))

    def phi_scale(self) -> float:
        """Crude positive scale of Phi(0, 0) used for relative tail bounds."""
        j = np.arange(0 if self.include_mean else 1, 200)
        return float(np.abs(self.coeff(j)).sum())

    # -- series evaluation ----------------------------------------------------

    def phi(self, x, z):
        """Phi(x, z), vectorized; x in [0, l], z >= 0 (depth)."""
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        if np.any((x < -1e-12) | (x > self.l + 1e-12)):
            raise DomainError("x outside [0, l]")
        if np.any(z < 0.0):
            raise DomainError("z must be >= 0")
        x, z = np.broadcast_arrays(x, z)
        shape = x.shape
        x = np.atleast_1d(x).ravel()
        z = np.atleast_1d(z).ravel()
        out = np.empty_like(x)
        q = np.exp(-np.pi * z / self.l)
        near = q > _Q_SWITCH
        if np.any(~near):
            out[~near] = self._phi_direct(x[~near], z[~near], q[~near])
        if np.any(near):
            out[near] = self._phi_near_surface(x[near], z[near])
        return out.reshape(shape) if shape else float(out[0])

    def _phi_direct(self, x, z, q):
        """Direct summation; geometric tail certified by q^J/(J^2 (1-q))."""
        scale = self.phi_scale() * _TAIL_REL
        cmax = 2.0 * self.F0 * self.alpha * self.l / (self.K_s * np.pi**2)
        out = np.zeros_like(x)
        qmax = float(q.max())
        # smallest J with cmax q^J / (J^2 (1-q)) < scale
        J = 32
        while J < 2_000_000:
            bound = cmax * qmax**J / (max(J, 1) ** 2 * (1.0 - qmax))
            if bound < scale:
                break
            J *= 2
        else:
            raise OracleError("direct series truncation failed to certify")
        j = np.arange(0 if self.include_mean else 1, J + 1)
        lam = self.lambda_j(j)
        cj = self.coeff(j)
        # chunk over nodes to bound the (nodes x modes) temporary
        chunk = max(1, 4_000_000 // (len(j) + 1))
        for lo in range(0, len(x), chunk):
            sl = slice(lo, lo + chunk)
            ang = np.outer(x[sl], j) * (np.pi / self.l)
            out[sl] = np.einsum("nj,nj->n", np.cos(ang),
                                cj[None, :] * np.exp(-np.outer(z[sl], lam)))
        return out

    def _asym_orders(self, z):
        """Coefficients p2, p3, p4 of the large-j term expansion.

        term_j = C sin(j a) cos(j b) q^j (p2/j^2 + p3/j^3 + p4/j^4 + O(1/j^5))
        with C = (4 F0 / (K_s pi)) e^{alpha z / 2}, q = e^{-pi z / l}.
        """
        gam = 1.0 - 4.0 * self.plant.k
        s = self.alpha * self.l / (2.0 * np.pi)
        w = z * gam * self.alpha**2 * self.l / (8.0 * np.pi)
        p2 = np.full_like(np.asarray(w, dtype=float), s)
        p3 = -(s**2 + s * w)
        p4 = (1.0 - gam / 2.0) * s**3 + s**2 * w + s * w**2 / 2.0
        return p2, p3, p4

    def _phi_near_surface(self, x, z):
        """Exact-minus-asymptotic partial sum plus closed-form polylog tail.

        Phi = sum_{j<=J} (exact_j - asym_j) + sum_{j>=1} asym_j, where asym_j
        is the three-order large-j expansion of the exact term; the infinite
        asym sum is Im[Li_{2,3,4}] at q e^{i(a +- b)}.  The dropped remainder
        sum_{j>J}(exact_j - asym_j) = O(1/J^4) is certified by
        ``tail_remainder_bound``.
        """
        J = _J_NEAR
        al, l = self.alpha, self.l
        a_ang = np.pi * self.x0 / l
        b_ang = np.pi * x / l
        q = np.exp(-np.pi * z / l)
        C = (4.0 * self.F0 / (self.K_s * np.pi)) * np.exp(al * z / 2.0)
        p2, p3, p4 = self._asym_orders(z)

        wp = q * np.exp(1j * (a_ang + b_ang))
        wm = q * np.exp(1j * (a_ang - b_ang))
        li = {p: 0.5 * (polylog(p, wp).imag + polylog(p, wm).imag) for p in (2, 3, 4)}
        out = C * (p2 * li[2] + p3 * li[3] + p4 * li[4])

        j = np.arange(1, J + 1)
        lam = self.lambda_j(j)
        cj = self.coeff(j)
        sin_a = np.sin(j * a_ang)
        inv2, inv3, inv4 = 1.0 / j**2, 1.0 / j**3, 1.0 / j**4
        chunk = max(1, 2_000_000 // (J + 1))
        for lo in range(0, len(x), chunk):
            sl = slice(lo, lo + chunk)
            cos_b = np.cos(np.outer(b_ang[sl], j))
            exact = cj[None, :] * np.exp(-np.outer(z[sl], lam)) \
                * np.cos(np.outer(x[sl], j) * (np.pi / l))
            qj = q[sl, None] ** j[None, :]
            poly = (p2[sl, None] * inv2 + p3[sl, None] * inv3
                    + p4[sl, None] * inv4)
            asym = C[sl, None] * sin_a[None, :] * cos_b * qj * poly
            out[sl] += (exact - asym).sum(axis=1)
        if self.include_mean:
            out += self.coeff(0) * np.exp(-self.lambda_j(0) * z)
        return out

    def tail_remainder_bound(self, z) -> float:
        """Certified bound on the dropped near-surface remainder."""
        zmax = float(np.max(np.asarray(z)))
        gam = 1.0 - 4.0 * self.plant.k
        s = self.alpha * self.l / (2.0 * np.pi)
        w = zmax * gam * self.alpha**2 * self.l / (8.0 * np.pi)
        # u^4 coefficient of P(u) plus slack for the higher orders
        c5 = abs((gam - 1.0) * s**4) + abs((1.0 - gam / 2.0) * s**3 * w) \
            + abs(s**2 * w**2 / 2.0) + abs(s * w**3 / 6.0) + s**4 + s
        C = (4.0 * self.F0 / (self.K_s * np.pi)) * math.exp(self.alpha * zmax / 2.0)
        return 3.0 * C * c5 / (4.0 * _J_NEAR**4)

    # -- physical fields --------------------------------------------------------

    def mu(self, x, z, t):
        """Matric flux potential mu(x, z, t) [cm^2/h]."""
        return self.mu_prefactor * np.exp(self.time_rate * t) * self.phi(x, z)

    def theta_normalized(self, x, z, t):
        """Theta from mu through the exponential-D inverse map (theta_r = 0)."""
        m = self.plant.m
        val = np.expm1(m) * np.exp(self.time_rate * t) * self.phi(x, z)
        if np.any(val <= -1.0):
            raise OracleError("oracle mu out of the invertible range")
        return np.log1p(val) / m

    def surface_flux(self, x, z, t):
        """Vertical flux series  -d(mu)/dz + alpha mu  at depth z [cm/h].

        Per mode (lambda_j + alpha) c_j = alpha A_j, so the flux series is
        F0 e^{(A/t_s)t} [x0/l + sum_j (2/(j pi)) sin(j pi x0/l) cos(...) e^{-lambda_j z}];
        at z = 0 it sums to the source indicator.  Used as boundary data on
        deep horizontal cuts, where a few terms suffice.
        """
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        x, z = np.broadcast_arrays(x, z)
        zmin = float(np.min(z))
        if zmin * self.lambda_j(1) < 2.0:
            raise DomainError("surface_flux series needs lambda_1 z >= 2")
        scale = _TAIL_REL * self.F0
        J = 8
        while J < 100_000:
            if (2.0 * self.F0 / (np.pi * (J + 1))) * math.exp(-self.lambda_j(J + 1) * zmin) < scale:
                break
            J *= 2
        j = np.arange(1, J + 1)
        terms = (2.0 / (j * np.pi)) * np.sin(j * np.pi * self.x0 / self.l)
        mean = (self.x0 / self.l) * np.exp(-self.lambda_j(0) * z) \
            if self.include_mean else 0.0
        series = mean + np.einsum(
            "...j,...j->...",
            np.cos(np.multiply.outer(x, j) * (np.pi / self.l)),
            terms * np.exp(-np.multiply.outer(z, self.lambda_j(j))),
        )
        return self.F0 * np.exp(self.time_rate * t) * series

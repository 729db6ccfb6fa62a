"""Soil constitutive relations and the Kirchhoff change of variable.

Two Gardner-type soil families are supported:

* ``GARDNER`` -- exponential conductivity K = K_s e^{a h}, water content
  theta = theta_r + (theta_s - theta_r) e^{a h}.  Its soil-water diffusivity
  D = K_s / (a (theta_s - theta_r)) is constant, so the Kirchhoff variable is
  simply proportional to theta - theta_r.
* ``BROADBRIDGE_WHITE`` -- D grows exponentially with the normalized content
  Theta, D = m e^{m Theta} / (a^2 t_s (e^m - 1)), the family used together
  with the nonlinear root-uptake sink.

The Kirchhoff variable ("matric flux potential", units L^2/T) is
mu = integral of D d(theta) from theta_r; in both families mu(theta_r) = 0 and
a*mu equals the hydraulic conductivity when theta_r = 0, which is what makes
the transformed flux expression -(d(mu)/dz + a*mu) the vertical Darcy flux.

Internal units are centimeters and hours throughout.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InversionError

__all__ = [
    "SoilModel",
    "Model2Params",
    "SoilHydraulics",
    "ADMISSIBILITY_TOL",
]

#: Absolute slack on the uptake-parameter admissibility bound; the published
#: "plant 1" parameters sit within 0.05% of the bound.
ADMISSIBILITY_TOL = 1e-9


class SoilModel(enum.Enum):
    GARDNER = "gardner"
    BROADBRIDGE_WHITE = "broadbridge_white"


@dataclass(frozen=True)
class Model2Params:
    """Dimensionless plant/soil parameters of the nonlinear-uptake family.

    ``t_s`` is the gravity time scale theta_s / (alpha * K_s) in hours; it is
    stored (not derived) so the dataclass stays self-contained, and validated
    against the owning soil at construction time.
    """

    m: float
    A: float
    k: float
    t_s: float

    def __post_init__(self):
        if not (self.m > 0.0):
            raise DomainError(f"m must be > 0, got {self.m}")
        if not (self.A < 0.0):
            raise DomainError(f"A must be < 0, got {self.A}")
        if not (self.t_s > 0.0):
            raise DomainError(f"t_s must be > 0, got {self.t_s}")
        bound = self.uptake_bound()
        margin = bound - abs(self.k)
        if margin < -ADMISSIBILITY_TOL:
            raise DomainError(
                f"|k|={abs(self.k):.6e} exceeds the admissible bound "
                f"{bound:.6e} (margin {margin:.3e})"
            )
        if margin < 0.01 * bound:
            warnings.warn(
                f"|k| within 1% of the admissibility bound (margin {margin:.3e})",
                stacklevel=2,
            )

    def uptake_bound(self) -> float:
        """Largest admissible |k|: (-A/m) e^{-m} (1 - e^{-m})."""
        return (-self.A / self.m) * math.exp(-self.m) * (1.0 - math.exp(-self.m))


@dataclass(frozen=True)
class SoilHydraulics:
    """Soil parameter set; conductivity in cm/h, alpha in 1/cm."""

    theta_r: float
    theta_s: float
    K_s: float
    alpha: float
    model: SoilModel = SoilModel.GARDNER
    model2: Model2Params | None = None

    def __post_init__(self):
        if not (0.0 <= self.theta_r < self.theta_s <= 1.0):
            raise DomainError(
                f"need 0 <= theta_r < theta_s <= 1, got {self.theta_r}, {self.theta_s}"
            )
        if self.K_s <= 0.0 or self.alpha <= 0.0:
            raise DomainError("K_s and alpha must be positive")
        if self.model is SoilModel.BROADBRIDGE_WHITE:
            if self.model2 is None:
                raise DomainError("BROADBRIDGE_WHITE soil requires model2 parameters")
            t_s = self.gravity_time_scale
            if not math.isclose(self.model2.t_s, t_s, rel_tol=1e-12):
                raise DomainError(
                    f"model2.t_s={self.model2.t_s} inconsistent with "
                    f"theta_s/(alpha*K_s)={t_s}"
                )

    # -- derived scales ----------------------------------------------------

    @property
    def delta_theta(self) -> float:
        return self.theta_s - self.theta_r

    @property
    def gravity_time_scale(self) -> float:
        """t_s = theta_s / (alpha K_s) [h]."""
        return self.theta_s / (self.alpha * self.K_s)

    @property
    def mu_max(self) -> float:
        """Kirchhoff value at saturation; equals K_s/alpha when theta_r=0."""
        if self.model is SoilModel.GARDNER:
            return self.K_s / self.alpha
        m = self.model2.m
        return self.delta_theta / (self.alpha**2 * self.model2.t_s)

    def _bw_gain(self) -> float:
        """G such that Theta = log(1 + G*mu)/m for the exponential-D family."""
        p = self.model2
        return self.alpha**2 * p.t_s * math.expm1(p.m) / self.delta_theta

    # -- content normalization ---------------------------------------------

    def normalized(self, theta):
        """Theta = (theta - theta_r)/(theta_s - theta_r), validated to [0,1]."""
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < self.theta_r - 1e-12) or np.any(theta > self.theta_s + 1e-12):
            bad = theta[(theta < self.theta_r - 1e-12) | (theta > self.theta_s + 1e-12)]
            raise DomainError(
                f"theta={bad.flat[0]!r} outside [theta_r, theta_s] = "
                f"[{self.theta_r}, {self.theta_s}]"
            )
        out = (theta - self.theta_r) / self.delta_theta
        return np.clip(out, 0.0, 1.0)

    def content_from_normalized(self, Theta):
        return self.theta_r + self.delta_theta * np.asarray(Theta, dtype=float)

    # -- Kirchhoff transform -----------------------------------------------

    def kirchhoff_forward(self, theta):
        """mu(theta), the matric flux potential [cm^2/h]."""
        Theta = self.normalized(theta)
        if self.model is SoilModel.GARDNER:
            mu = (self.K_s / self.alpha) * Theta
        else:
            p = self.model2
            mu = (self.delta_theta / (self.alpha**2 * p.t_s)) * (
                np.expm1(p.m * Theta) / math.expm1(p.m)
            )
        return mu if mu.ndim else float(mu)

    def kirchhoff_inverse(self, mu):
        """theta(mu); raises InversionError on unphysical mu."""
        Theta = self.normalized_from_kirchhoff(mu)
        out = self.content_from_normalized(Theta)
        return out if out.ndim else float(out)

    def normalized_from_kirchhoff(self, mu):
        """Theta(mu); tolerates round-off excursions of ~1e-9 below zero.

        The exponential-K family is linear in mu and is extended linearly
        beyond saturation (Theta > 1), which transient fluxes above K_s
        produce legitimately; the exponential-D family is range-checked
        strictly since its inverse lives inside a logarithm.
        """
        mu = np.asarray(mu, dtype=float)
        if self.model is SoilModel.GARDNER:
            Theta = mu * (self.alpha / self.K_s)
            if np.any(Theta < -1e-9):
                raise InversionError(
                    f"mu maps to Theta {Theta.min():.6e} < 0 (solver divergence?)"
                )
            out = np.maximum(Theta, 0.0)
            return out if out.ndim else float(out)
        arg = 1.0 + self._bw_gain() * mu
        if np.any(arg <= 0.0):
            raise InversionError(
                f"log argument {arg.min():.6e} <= 0: mu out of range "
                "(solver divergence?)"
            )
        Theta = np.log(arg) / self.model2.m
        if np.any(Theta < -1e-9) or np.any(Theta > 1.0 + 1e-9):
            raise InversionError(
                f"mu maps to Theta in [{Theta.min():.6e}, {Theta.max():.6e}], "
                "outside [0, 1]"
            )
        out = np.clip(Theta, 0.0, 1.0)
        return out if out.ndim else float(out)

    # -- derived quantities -------------------------------------------------

    def diffusivity(self, theta):
        """Soil-water diffusivity D(theta) = d(mu)/d(theta) [cm^2/h]."""
        Theta = self.normalized(theta)
        if self.model is SoilModel.GARDNER:
            D = np.full_like(Theta, self.K_s / (self.alpha * self.delta_theta))
        else:
            p = self.model2
            D = p.m * np.exp(p.m * Theta) / (
                self.alpha**2 * p.t_s * math.expm1(p.m)
            )
        return D if D.ndim else float(D)

    def diffusivity_from_kirchhoff(self, mu):
        """D as a function of mu (used inside the nonlinear time step)."""
        if self.model is SoilModel.GARDNER:
            mu = np.asarray(mu, dtype=float)
            D = np.full_like(mu, self.K_s / (self.alpha * self.delta_theta))
            return D if D.ndim else float(D)
        # e^{m Theta} = 1 + G mu, so D is affine in mu.
        p = self.model2
        mu = np.asarray(mu, dtype=float)
        ex = 1.0 + self._bw_gain() * mu
        if np.any(ex <= 0.0):
            raise InversionError("mu out of range for diffusivity evaluation")
        D = p.m * ex / (self.alpha**2 * p.t_s * math.expm1(p.m))
        return D if D.ndim else float(D)

    def conductivity(self, *, h=None, Theta=None):
        """K [cm/h] from pressure head (Gardner form) or normalized content."""
        if (h is None) == (Theta is None):
            raise DomainError("pass exactly one of h or Theta")
        if h is not None:
            h = np.asarray(h, dtype=float)
            if np.any(h > 0.0):
                raise DomainError("conductivity from h requires h <= 0")
            K = self.K_s * np.exp(self.alpha * h)
            return K if K.ndim else float(K)
        Theta = np.asarray(Theta, dtype=float)
        if np.any(Theta < 0.0) or np.any(Theta > 1.0):
            raise DomainError("Theta must lie in [0, 1]")
        if self.model is SoilModel.GARDNER:
            K = self.K_s * Theta
        else:
            p = self.model2
            K = self.K_s * np.expm1(p.m * Theta) / math.expm1(p.m)
        return K if K.ndim else float(K)

    def pressure_head(self, theta):
        """h(theta) [cm]; -inf is rejected (theta == theta_r)."""
        Theta = self.normalized(theta)
        if np.any(Theta <= 0.0):
            raise DomainError("h(theta) undefined at theta == theta_r (h -> -inf)")
        # Both families satisfy K = K_s e^{alpha h} with their own K(Theta).
        krel = self.conductivity(Theta=Theta) / self.K_s
        h = np.log(krel) / self.alpha
        return h if np.ndim(h) else float(h)

    def pressure_head_or_nan(self, Theta):
        """h(Theta) with -inf/out-of-range mapped to nan (field snapshots).

        Accepts Theta > 1 for the linear family (supersaturated transients),
        where the extension h = log(Theta)/alpha stays consistent with K(h).
        """
        Theta = np.asarray(Theta, dtype=float)
        if self.model is SoilModel.GARDNER:
            krel = Theta
        else:
            p = self.model2
            krel = np.expm1(p.m * np.clip(Theta, 0.0, 1.0)) / math.expm1(p.m)
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(krel > 0.0, np.log(np.maximum(krel, 1e-300)), np.nan) \
                / self.alpha
        return h

"""Root water-uptake sink terms.

The sink R(z, Theta) is the volumetric extraction rate [1/h]; it is returned
as extraction (positive = water removed).  The time stepper applies the sign
when moving it to the right-hand side of the mass balance.

Variants:

* ``NONE`` -- no roots.
* ``STEPWISE`` -- constant R0 inside the root zone L1 <= z <= L (z measured
  from the water table upward), zero below.  The Heaviside takes the value 1
  exactly at z = L1.
* ``EXPONENTIAL`` -- R0 e^{beta_r (z - L)}: maximum at the land surface z = L,
  decaying downward.  An optional root-depth cutoff zeroes the tail below L1.
* ``NONLINEAR`` -- uptake tied to the normalized water content through the
  (m, A, k) plant parameters; vanishes at Theta = 0 and is largest near
  saturation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hydraulics import ADMISSIBILITY_TOL, Model2Params

__all__ = ["UptakeKind", "UptakeModel", "check_admissibility"]


class UptakeKind(enum.Enum):
    NONE = "none"
    STEPWISE = "stepwise"
    EXPONENTIAL = "exponential"
    NONLINEAR = "nonlinear"


@dataclass(frozen=True)
class UptakeModel:
    kind: UptakeKind = UptakeKind.NONE
    R0: float = 0.0                 # max uptake rate [1/h]
    L1: float | None = None         # root-zone lower edge [cm]
    L: float | None = None          # column length / land surface [cm]
    beta_r: float = 0.0             # uptake decay rate [1/cm]
    root_cutoff: bool = True        # EXPONENTIAL only: zero below L1
    params: Model2Params | None = None   # NONLINEAR only
    theta_s: float | None = None         # NONLINEAR only

    def __post_init__(self):
        if self.R0 < 0.0 or self.beta_r < 0.0:
            raise DomainError("R0 and beta_r must be nonnegative")
        if self.kind in (UptakeKind.STEPWISE, UptakeKind.EXPONENTIAL):
            if self.L is None:
                raise DomainError(f"{self.kind.value} uptake requires L")
            needs_l1 = self.kind is UptakeKind.STEPWISE or self.root_cutoff
            if needs_l1 and self.L1 is None:
                raise DomainError(f"{self.kind.value} uptake requires L1")
            if self.L1 is not None and not (0.0 <= self.L1 <= self.L):
                raise DomainError(f"need 0 <= L1 <= L, got L1={self.L1}, L={self.L}")
        if self.kind is UptakeKind.NONLINEAR:
            if self.params is None or self.theta_s is None:
                raise DomainError("nonlinear uptake requires params and theta_s")
            ok, margin = check_admissibility(self.params)
            if not ok:
                raise DomainError(f"inadmissible uptake parameters (margin {margin:.3e})")

    @property
    def depends_on_state(self) -> bool:
        return self.kind is UptakeKind.NONLINEAR

    def rate(self, z=None, theta_norm=None):
        """Uptake rate R [1/h] at height z (cm above the water table) and/or Theta."""
        if self.kind is UptakeKind.NONE:
            ref = z if z is not None else theta_norm
            return np.zeros_like(np.asarray(ref, dtype=float))
        if self.kind is UptakeKind.STEPWISE:
            z = np.asarray(z, dtype=float)
            return np.where((z >= self.L1) & (z <= self.L), self.R0, 0.0)
        if self.kind is UptakeKind.EXPONENTIAL:
            z = np.asarray(z, dtype=float)
            r = self.R0 * np.exp(self.beta_r * (z - self.L))
            if self.root_cutoff and self.L1 is not None:
                r = np.where(z >= self.L1, r, 0.0)
            return r
        # NONLINEAR
        Theta = np.asarray(theta_norm, dtype=float)
        if np.any(Theta < -1e-12) or np.any(Theta > 1.0 + 1e-12):
            raise DomainError("Theta must lie in [0, 1] for nonlinear uptake")
        Theta = np.clip(Theta, 0.0, 1.0)
        p = self.params
        scale = self.theta_s / p.t_s
        r = scale * (
            -p.k / math.expm1(p.m) * np.expm1(Theta * p.m)
            - (p.A / p.m) * (-np.expm1(-Theta * p.m))
        )
        return r

    def depth_integral(self):
        """Closed-form integral of R over z in [0, L] (depth-independent kinds)."""
        if self.kind is UptakeKind.NONE:
            return 0.0
        if self.kind is UptakeKind.STEPWISE:
            return self.R0 * (self.L - self.L1)
        if self.kind is UptakeKind.EXPONENTIAL:
            zlo = self.L1 if (self.root_cutoff and self.L1 is not None) else 0.0
            if self.beta_r == 0.0:
                return self.R0 * (self.L - zlo)
            return (self.R0 / self.beta_r) * (
                1.0 - math.exp(self.beta_r * (zlo - self.L))
            )
        raise DomainError("depth integral undefined for state-dependent uptake")


def check_admissibility(params: Model2Params):
    """Return (ok, margin) for the |k| bound of the nonlinear uptake family."""
    bound = params.uptake_bound()
    margin = bound - abs(params.k)
    return margin >= -ADMISSIBILITY_TOL, margin

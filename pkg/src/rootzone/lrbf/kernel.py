"""Exponential RBF kernel and analytic differential-operator action.

The kernel is phi(r) = exp(-eps^2 r^2).  All derivative formulas are coded
analytically (no numerical differentiation): with d = x_s - x_k and
phi = exp(-eps^2 |d|^2),

    d phi / d x_j      = -2 eps^2 d_j phi
    d^2 phi / d x_j^2  = (-2 eps^2 + 4 eps^4 d_j^2) phi
    laplacian phi      = (-2 eps^2 dim + 4 eps^4 |d|^2) phi

Coordinate layout: the vertical coordinate is the last column (1D columns
store only z; 2D stores (x, z); axisymmetric stores (r, z)).  The
axisymmetric Laplacian adds (1/r_s) d/dr evaluated at the stencil center and
therefore requires r_s > 0 (axis nodes are handled as symmetry boundaries,
never with this operator).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import DomainError

__all__ = ["RbfKernel", "OperatorSpec"]


@dataclass(frozen=True)
class OperatorSpec:
    """Linear operator c_id*I + c_lap*Lap + c_dvert*d/dz + c_dlat*d/dx."""

    c_id: float = 0.0
    c_lap: float = 0.0
    c_dvert: float = 0.0
    c_dlat: float = 0.0
    axisymmetric: bool = False

    # -- constructors for the operators the solver uses ---------------------

    @staticmethod
    def interior(sigma: float, alpha: float, gravity_sign: int,
                 axisymmetric: bool = False) -> "OperatorSpec":
        """sigma*I - Lap - gravity_sign*alpha*d/dz (implicit-step operator)."""
        return OperatorSpec(c_id=sigma, c_lap=-1.0, c_dvert=-gravity_sign * alpha,
                            axisymmetric=axisymmetric)

    @staticmethod
    def dirichlet() -> "OperatorSpec":
        return OperatorSpec(c_id=1.0)

    @staticmethod
    def neumann_vertical(alpha: float, gravity_sign: int) -> "OperatorSpec":
        """-(d/dz + gravity_sign*alpha*I): data is flux along +z coordinate."""
        return OperatorSpec(c_id=-gravity_sign * alpha, c_dvert=-1.0)

    @staticmethod
    def neumann_lateral() -> "OperatorSpec":
        """-d/dx (x = first coordinate: lateral direction or cylinder radius)."""
        return OperatorSpec(c_dlat=-1.0)

    @staticmethod
    def derivative_vertical() -> "OperatorSpec":
        return OperatorSpec(c_dvert=1.0)

    def with_sigma(self, sigma: float) -> "OperatorSpec":
        return replace(self, c_id=sigma)


@dataclass(frozen=True)
class RbfKernel:
    """Shape parameter in physical inverse length (1/cm), applied unscaled."""

    epsilon: float

    def __post_init__(self):
        if not (self.epsilon > 0.0):
            raise DomainError(f"epsilon must be > 0, got {self.epsilon}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-(self.epsilon**2) * r * r)

    def gram(self, points: np.ndarray) -> np.ndarray:
        """Symmetric matrix phi(|x_i - x_j|) for one stencil."""
        pts = np.atleast_2d(points)
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        return np.exp(-(self.epsilon**2) * d2)

    def gram_batch(self, pts: np.ndarray) -> np.ndarray:
        """Batched Gram matrices; pts has shape (M, n_s, dim)."""
        d2 = ((pts[:, :, None, :] - pts[:, None, :, :]) ** 2).sum(-1)
        return np.exp(-(self.epsilon**2) * d2)

    def apply_operator(self, op: OperatorSpec, center: np.ndarray,
                       points: np.ndarray) -> np.ndarray:
        """(Op phi_k)(x_s) for every stencil basis function phi_k.

        ``center`` is x_s (shape (dim,)), ``points`` the stencil nodes
        (n_s, dim).  Returns shape (n_s,).
        """
        return self.apply_operator_batch(op, center[None, :], points[None, :, :])[0]

    def apply_operator_batch(self, op: OperatorSpec, centers: np.ndarray,
                             points: np.ndarray) -> np.ndarray:
        """Batched (Op phi)(x_s): centers (M, dim), points (M, n_s, dim)."""
        e2 = self.epsilon**2
        d = centers[:, None, :] - points          # (M, n_s, dim)
        r2 = (d * d).sum(-1)                      # (M, n_s)
        phi = np.exp(-e2 * r2)
        dim = centers.shape[1]
        out = np.zeros_like(phi)
        if op.c_id != 0.0:
            out += op.c_id * phi
        if op.c_lap != 0.0:
            lap = (-2.0 * e2 * dim + 4.0 * e2 * e2 * r2) * phi
            if op.axisymmetric:
                if dim != 2:
                    raise DomainError("axisymmetric operator requires (r, z) points")
                r_c = centers[:, 0]
                if np.any(r_c <= 0.0):
                    raise DomainError(
                        "axisymmetric Laplacian undefined at r<=0 "
                        "(axis nodes must carry symmetry rows)"
                    )
                lap += (-2.0 * e2 * d[:, :, 0]) * phi / r_c[:, None]
            out += op.c_lap * lap
        if op.c_dvert != 0.0:
            out += op.c_dvert * (-2.0 * e2 * d[:, :, -1]) * phi
        if op.c_dlat != 0.0:
            if dim < 2:
                raise DomainError("lateral derivative requires dim >= 2")
            out += op.c_dlat * (-2.0 * e2 * d[:, :, 0]) * phi
        return out

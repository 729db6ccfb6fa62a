"""Derived quantities: RMSE metrics and pointwise flux/derivative probes."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..lrbf.kernel import OperatorSpec, RbfKernel
from ..lrbf.nodes import NodeCloud, Stencil
from ..lrbf.weights import operator_row

__all__ = ["rmse", "FluxProbe", "nearest_node"]


def rmse(field_num, field_ref) -> float:
    """Root-mean-square difference over nodes."""
    a = np.asarray(field_num, dtype=float)
    b = np.asarray(field_ref, dtype=float)
    if a.shape != b.shape:
        raise ConfigurationError("rmse operands must share the node set")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def nearest_node(cloud: NodeCloud, target: np.ndarray) -> int:
    """Index of the node closest to a physical location inside the cloud."""
    target = np.asarray(target, dtype=float)
    lo = cloud.points.min(axis=0)
    hi = cloud.points.max(axis=0)
    if np.any(target < lo - 1e-12) or np.any(target > hi + 1e-12):
        raise ConfigurationError(
            f"probe location {target.tolist()} outside the node cloud"
        )
    d2 = ((cloud.points - target) ** 2).sum(axis=1)
    return int(np.argmin(d2))


class FluxProbe:
    """Evaluate a linear operator of the field at one node via its stencil."""

    def __init__(self, kernel: RbfKernel, cloud: NodeCloud, table: np.ndarray,
                 node: int, op: OperatorSpec, poly_degree: int | None = 1):
        st = Stencil(center=node, neighbors=table[node])
        row = operator_row(kernel, cloud, st, op, poly_degree=poly_degree)
        self.cols = row.cols
        self.weights = row.weights
        self.node = node

    def __call__(self, field: np.ndarray) -> float:
        return float(self.weights @ field[self.cols])

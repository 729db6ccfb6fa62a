"""Global sparse-system assembly from per-node weight rows.

The assembled matrix has the block layout: interior rows first (implicit-step
operator), boundary rows last, one row per node, with exactly n_s structural
nonzeros per row (the node's stencil).  The right-hand side stacks the
interior source values f and the boundary data g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import AssemblyError
from .nodes import NodeCloud
from .weights import OperatorWeights

__all__ = ["SparseSystem", "assemble", "assemble_table"]


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    n_interior: int
    #: positions in matrix.data of each row's diagonal entry (row index == col),
    #: used to add the per-node time-step coefficient without re-assembly.
    diag_pos: np.ndarray | None = None

    @property
    def n_total(self) -> int:
        return self.matrix.shape[0]

    def with_sigma(self, base_data: np.ndarray, sigma: np.ndarray) -> None:
        """Set matrix.data = base_data plus sigma added on each row's diagonal."""
        np.copyto(self.matrix.data, base_data)
        self.matrix.data[self.diag_pos] += sigma


def assemble_table(cloud: NodeCloud, table: np.ndarray, weights: np.ndarray,
                   f: np.ndarray, g: np.ndarray) -> SparseSystem:
    """Assemble from a full (N, n_s) neighbor table and matching weight rows."""
    N, n_s = table.shape
    if N != cloud.n_total:
        raise AssemblyError(f"expected {cloud.n_total} rows, got {N}")
    if weights.shape != table.shape:
        raise AssemblyError("weights and neighbor table shapes differ")
    n_i = cloud.n_interior
    if len(f) != n_i or len(g) != N - n_i:
        raise AssemblyError("rhs block lengths do not match the node split")
    rhs = np.concatenate([np.asarray(f, dtype=float), np.asarray(g, dtype=float)])
    if not np.all(np.isfinite(rhs)):
        raise AssemblyError("non-finite right-hand side")
    if not np.all(np.isfinite(weights)):
        raise AssemblyError("non-finite weight rows")

    # Sort each row's columns so the CSR is canonical and the diagonal is
    # addressable by position.
    order = np.argsort(table, axis=1, kind="stable")
    cols = np.take_along_axis(table, order, axis=1)
    data = np.take_along_axis(weights, order, axis=1)
    if np.any(cols[:, 1:] == cols[:, :-1]):
        raise AssemblyError("duplicate column inside a stencil row")
    indptr = np.arange(0, (N + 1) * n_s, n_s, dtype=np.int64)
    A = sp.csr_matrix((data.ravel(), cols.ravel().astype(np.int64), indptr),
                      shape=(N, N))

    diag_rows, diag_cols = np.nonzero(cols == np.arange(N)[:, None])
    if len(diag_rows) != N:
        missing = np.setdiff1d(np.arange(N), diag_rows)[0]
        raise AssemblyError(f"row {missing} has no diagonal entry (center missing)")
    diag_pos = (diag_rows * n_s + diag_cols).astype(np.int64)
    return SparseSystem(matrix=A, rhs=rhs, n_interior=n_i, diag_pos=diag_pos)


def assemble(cloud: NodeCloud, rows: list[OperatorWeights],
             f: np.ndarray, g: np.ndarray) -> SparseSystem:
    """Assemble from per-node OperatorWeights (interior + boundary rows).

    ``rows`` must contain exactly one row per node; interior rows carry the
    implicit-step operator, boundary rows the boundary operators, in any list
    order.
    """
    N = cloud.n_total
    seen = np.zeros(N, dtype=bool)
    n_s = rows[0].cols.shape[0] if rows else 0
    table = np.empty((N, n_s), dtype=np.intp)
    weights = np.empty((N, n_s))
    for rw in rows:
        if seen[rw.row]:
            raise AssemblyError(f"duplicate row for node {rw.row}")
        if len(rw.cols) != n_s:
            raise AssemblyError("all rows must share one stencil size")
        seen[rw.row] = True
        table[rw.row] = rw.cols
        weights[rw.row] = rw.weights
    if not seen.all():
        raise AssemblyError(f"missing row for node {int(np.nonzero(~seen)[0][0])}")
    return assemble_table(cloud, table, weights, f, g)

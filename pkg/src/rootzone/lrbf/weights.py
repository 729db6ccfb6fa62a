"""Per-node weight rows: local Gram systems and operator collocation.

A weight row for node s is w = theta_s Gram^{-1}, where theta_s collects the
operator applied to each stencil basis function at the center.  By
construction w reproduces the operator exactly on every stencil basis
function; the tests assert that identity to 1e-10.

Pure-kernel rows do not annihilate constants (the defect scales like
eps^4 h^2), which on fields with a large mean swamps the truncation error.
``poly_degree=1`` therefore borders the local system with the monomials
{1, x, z}, making every row exact on affine fields; this is the variant the
scenario discretizations use.  The plain rows remain available (and are the
ones satisfying the per-basis kernel identity exactly).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import StencilError
from .kernel import OperatorSpec, RbfKernel
from .nodes import NodeCloud, Stencil

__all__ = ["OperatorWeights", "local_gram", "operator_row", "weight_rows"]

#: Local Gram matrices beyond this 2-norm condition number are rejected.
COND_LIMIT = 1e14

#: Nodes per chunk in the batched row computation (bounds transient memory).
_CHUNK = 200_000


@dataclass(frozen=True)
class OperatorWeights:
    row: int
    cols: np.ndarray
    weights: np.ndarray


def local_gram(kernel: RbfKernel, points: np.ndarray, *, check: bool = True,
               node: int | None = None) -> np.ndarray:
    """Gram matrix of one stencil; optionally guarded against ill-conditioning."""
    G = kernel.gram(points)
    if check:
        cond = _gram_cond(G)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            where = f" at node {node}" if node is not None else ""
            raise StencilError(
                f"local Gram condition {cond:.2e} beyond {COND_LIMIT:.0e}{where}; "
                "decrease epsilon or increase node spacing"
            )
    return G


def _gram_cond(G: np.ndarray) -> float:
    ev = np.linalg.eigvalsh(G)
    if ev[0] <= 0.0:
        return np.inf
    return float(ev[-1] / ev[0])


def _poly_rhs(op: OperatorSpec, centers: np.ndarray, dim: int,
              scale: np.ndarray) -> np.ndarray:
    """Operator action at the center on the scaled monomials {1, (x-c)/s}."""
    M = len(centers)
    rhs = np.zeros((M, 1 + dim))
    rhs[:, 0] = op.c_id                         # Op(1)
    if dim >= 2 and op.c_dlat != 0.0:
        rhs[:, 1] += op.c_dlat / scale
    if op.c_dvert != 0.0:
        rhs[:, dim] += op.c_dvert / scale
    if op.c_lap != 0.0 and op.axisymmetric:
        # the (1/r) d/dr part of the axisymmetric laplacian on the r monomial
        rhs[:, 1] += op.c_lap / (centers[:, 0] * scale)
    return rhs


def _solve_rows(kernel: RbfKernel, centers: np.ndarray, pts: np.ndarray,
                op: OperatorSpec, poly_degree: int | None):
    """Batched weight rows; returns (weights (M, n_s), Gram batch)."""
    G = kernel.gram_batch(pts)
    theta = kernel.apply_operator_batch(op, centers, pts)
    if poly_degree is None:
        w = np.linalg.solve(G, theta[..., None])[..., 0]
        return w, G
    if poly_degree != 1:
        raise StencilError("only degree-1 polynomial augmentation is supported")
    M, n_s, dim = pts.shape
    m = 1 + dim
    d = pts - centers[:, None, :]
    scale = np.sqrt((d * d).sum(-1).max(axis=1))
    scale = np.maximum(scale, 1e-300)
    P = np.empty((M, n_s, m))
    P[:, :, 0] = 1.0
    P[:, :, 1:] = d / scale[:, None, None]
    prhs = _poly_rhs(op, centers, dim, scale)
    # collinear stencils (all nodes sharing one coordinate) make that monomial
    # column constant and the bordered system singular: drop it there
    spread = P.max(axis=1) - P.min(axis=1)            # (M, m)
    keep = spread > 1e-9
    keep[:, 0] = True
    w = np.empty((M, n_s))
    patterns = np.unique(keep, axis=0)
    for pat in patterns:
        rows = np.nonzero((keep == pat).all(axis=1))[0]
        cols = np.nonzero(pat)[0]
        mm = len(cols)
        S = np.zeros((len(rows), n_s + mm, n_s + mm))
        S[:, :n_s, :n_s] = G[rows]
        Pk = P[np.ix_(rows, np.arange(n_s), cols)]
        S[:, :n_s, n_s:] = Pk
        S[:, n_s:, :n_s] = np.transpose(Pk, (0, 2, 1))
        rhs = np.concatenate([theta[rows], prhs[np.ix_(rows, cols)]], axis=1)
        sol = np.linalg.solve(S, rhs[..., None])[..., 0]
        w[rows] = sol[:, :n_s]
    return w, G


def operator_row(kernel: RbfKernel, cloud: NodeCloud, stencil: Stencil,
                 op: OperatorSpec, poly_degree: int | None = None) -> OperatorWeights:
    """Collocation weights for one operator at one stencil center."""
    pts = cloud.points[stencil.neighbors][None, :, :]
    center = cloud.points[stencil.center][None, :]
    try:
        w, _ = _solve_rows(kernel, center, pts, op, poly_degree)
    except np.linalg.LinAlgError as exc:
        raise StencilError(f"singular local system at node {stencil.center}") from exc
    return OperatorWeights(row=stencil.center, cols=stencil.neighbors.copy(),
                           weights=w[0])


def weight_rows(kernel: RbfKernel, points: np.ndarray, table: np.ndarray,
                rows: np.ndarray, op: OperatorSpec,
                poly_degree: int | None = None,
                cond_sample: int = 512, rng_seed: int = 7) -> np.ndarray:
    """Batched weight rows sharing one OperatorSpec.

    ``table`` is the (N, n_s) neighbor table, ``rows`` the node indices to
    process.  Conditioning of the kernel Gram is guarded exactly on all rows
    when there are few, otherwise on a fixed-seed sample (stencil geometry
    repeats on gridded clouds, so a sample is representative).
    """
    rows = np.asarray(rows, dtype=np.intp)
    n_s = table.shape[1]
    out = np.empty((len(rows), n_s))
    if len(rows) == 0:
        return out
    rng = np.random.default_rng(rng_seed)
    if len(rows) <= cond_sample:
        check_rows = rows
    else:
        check_rows = rng.choice(rows, size=cond_sample, replace=False)
    for lo in range(0, len(rows), _CHUNK):
        sel = rows[lo:lo + _CHUNK]
        nbr = table[sel]                      # (m, n_s)
        pts = points[nbr]                     # (m, n_s, dim)
        centers = points[sel]                 # (m, dim)
        try:
            w, G = _solve_rows(kernel, centers, pts, op, poly_degree)
        except np.linalg.LinAlgError as exc:
            raise StencilError("singular local system in batched rows") from exc
        if not np.all(np.isfinite(w)):
            bad = sel[~np.isfinite(w).all(axis=1)][0]
            raise StencilError(f"non-finite weights at node {int(bad)}")
        out[lo:lo + _CHUNK] = w
        for j in np.nonzero(np.isin(sel, check_rows))[0]:
            cond = _gram_cond(G[j])
            if not np.isfinite(cond) or cond > COND_LIMIT:
                raise StencilError(
                    f"local Gram condition {cond:.2e} beyond {COND_LIMIT:.0e} "
                    f"at node {int(sel[j])}; decrease epsilon or increase spacing"
                )
    return out

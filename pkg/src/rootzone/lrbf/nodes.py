"""Scattered collocation nodes and nearest-neighbor influence domains."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ConfigurationError, StencilError

__all__ = [
    "NodeCloud",
    "Stencil",
    "build_stencils",
    "default_stencil_size",
    "neighbor_table",
    "brute_force_neighbors",
]


def default_stencil_size(dim: int) -> int:
    """Recommended influence-domain size: 2*dim + 1 nodes."""
    if dim not in (1, 2, 3):
        raise ConfigurationError(f"dim must be 1, 2, or 3, got {dim}")
    return 2 * dim + 1

# Relative slack when deciding that two neighbor distances tie.
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class NodeCloud:
    """Collocation points, interior nodes first, boundary nodes last.

    ``points`` has shape (N, dim).  ``regions`` optionally labels each
    boundary node (index >= n_interior) with the boundary patch it belongs to.
    """

    points: np.ndarray
    n_interior: int
    regions: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.atleast_2d(self.points), dtype=float)
        object.__setattr__(self, "points", pts)
        n = len(pts)
        if not (0 < self.n_interior < n):
            raise ConfigurationError(
                f"need 0 < n_interior < N, got {self.n_interior} of {n}"
            )
        for name, idx in self.regions.items():
            idx = np.asarray(idx, dtype=np.intp)
            if idx.size and (idx.min() < self.n_interior or idx.max() >= n):
                raise ConfigurationError(
                    f"region {name!r} references non-boundary node indices"
                )
            self.regions[name] = idx

    @property
    def n_total(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def interior(self) -> np.ndarray:
        return np.arange(self.n_interior)

    @property
    def boundary(self) -> np.ndarray:
        return np.arange(self.n_interior, self.n_total)

    def validate_distinct(self, sample: int = 2000, rng_seed: int = 0):
        """Cheap distinctness check: exact for small clouds, sampled above."""
        n = self.n_total
        tree = cKDTree(self.points)
        if n <= sample:
            d, _ = tree.query(self.points, k=2)
        else:
            rng = np.random.default_rng(rng_seed)
            idx = rng.choice(n, size=sample, replace=False)
            d, _ = tree.query(self.points[idx], k=2)
        if np.any(d[:, 1] <= 0.0):
            raise ConfigurationError("node cloud contains coincident points")


@dataclass(frozen=True)
class Stencil:
    """Influence domain of one node: the n_s nearest nodes (center included)."""

    center: int
    neighbors: np.ndarray

    @property
    def n_s(self) -> int:
        return len(self.neighbors)


def _rerank_ties(dist, idx):
    """Sort each row by (distance, node index) so ties are deterministic.

    cKDTree returns equidistant neighbors in an arbitrary order; re-rank with
    the smaller node index winning so stencils are reproducible.
    """
    n, k = idx.shape
    scale = np.maximum(dist[:, -1:], 1e-300)
    # Quantize distances so that floating noise below _TIE_RTOL ties.
    q = np.round(dist / (scale * _TIE_RTOL))
    order = np.lexsort((idx, q), axis=1)
    rows = np.arange(n)[:, None]
    return dist[rows, order], idx[rows, order]


def neighbor_table(cloud: NodeCloud, n_s: int, extra: int = 4) -> np.ndarray:
    """(N, n_s) nearest-neighbor index table (kd-tree search).

    Ties at the cutoff distance are broken by smaller node index.  ``extra``
    neighbors are fetched beyond n_s so a tie group straddling the cutoff is
    re-ranked correctly.
    """
    N = cloud.n_total
    if not (1 <= n_s <= N):
        raise ConfigurationError(f"n_s must lie in [1, {N}], got {n_s}")
    k = min(n_s + extra, N)
    tree = cKDTree(cloud.points)
    dist, idx = tree.query(cloud.points, k=k)
    if k == 1:
        dist = dist[:, None]
        idx = idx[:, None]
    dist, idx = _rerank_ties(dist, idx)
    neighbors = np.ascontiguousarray(idx[:, :n_s])
    # The center must always be its own nearest neighbor.
    if not np.all(neighbors[:, 0] == np.arange(N)):
        bad = int(np.nonzero(neighbors[:, 0] != np.arange(N))[0][0])
        raise StencilError(
            f"node {bad} is not its own nearest neighbor; coincident points?"
        )
    return neighbors


def build_stencils(cloud: NodeCloud, n_s: int) -> list[Stencil]:
    """One n_s-point stencil per node, as Stencil objects."""
    table = neighbor_table(cloud, n_s)
    return [Stencil(center=s, neighbors=table[s]) for s in range(cloud.n_total)]


def brute_force_neighbors(points: np.ndarray, n_s: int) -> np.ndarray:
    """O(N^2) reference neighbor search with the same tie rule (tests only)."""
    points = np.atleast_2d(points)
    n = len(points)
    d = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(-1))
    out = np.empty((n, n_s), dtype=np.intp)
    for s in range(n):
        scale = max(np.partition(d[s], n_s - 1)[n_s - 1], 1e-300)
        q = np.round(d[s] / (scale * _TIE_RTOL))
        order = np.lexsort((np.arange(n), q))
        out[s] = order[:n_s]
    return out

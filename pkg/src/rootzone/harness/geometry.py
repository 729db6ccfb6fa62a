"""Node-cloud builders for the scenario geometries.

All builders order nodes interior-first (the assembly contract) and label the
boundary nodes with named regions.  Corner nodes belong to the horizontal
surface/bottom regions, never to lateral/axis ones, so every boundary node
carries exactly one boundary row.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..lrbf.nodes import NodeCloud

__all__ = ["column_cloud", "rectangle_cloud", "cylinder_cloud"]


def column_cloud(L: float, nz: int, bottom_name: str, top_name: str) -> NodeCloud:
    """1D column of nz nodes on [0, L]; regions for the two end nodes."""
    if nz < 3:
        raise ConfigurationError("need at least 3 column nodes")
    z = np.linspace(0.0, L, nz)
    order = np.concatenate([np.arange(1, nz - 1), [0, nz - 1]])
    points = z[order, None]
    return NodeCloud(
        points=points,
        n_interior=nz - 2,
        regions={bottom_name: np.array([nz - 2]), top_name: np.array([nz - 1])},
    )


def _tensor_cloud(x, z, lateral_names: tuple[str, str]) -> NodeCloud:
    """(x, z) tensor grid; x may be a lateral coordinate or a radius."""
    nx, nz = len(x), len(z)
    X, Z = np.meshgrid(x, z)            # row-major over z, then x
    pts = np.column_stack([X.ravel(), Z.ravel()])
    ii, kk = np.meshgrid(np.arange(nx), np.arange(nz))
    ii = ii.ravel()
    kk = kk.ravel()
    surface = kk == 0
    bottom = kk == nz - 1
    left = (ii == 0) & ~surface & ~bottom
    right = (ii == nx - 1) & ~surface & ~bottom
    is_boundary = surface | bottom | left | right
    interior_idx = np.nonzero(~is_boundary)[0]
    blocks = [np.nonzero(m)[0] for m in (surface, bottom, left, right)]
    order = np.concatenate([interior_idx] + blocks)
    n_i = len(interior_idx)
    counts = np.cumsum([n_i] + [len(b) for b in blocks])
    regions = {
        "surface": np.arange(counts[0], counts[1]),
        "bottom": np.arange(counts[1], counts[2]),
        lateral_names[0]: np.arange(counts[2], counts[3]),
        lateral_names[1]: np.arange(counts[3], counts[4]),
    }
    return NodeCloud(points=pts[order], n_interior=n_i, regions=regions)


def rectangle_cloud(l: float, L: float, nx: int, nz: int) -> NodeCloud:
    """Furrow cross-section [0, l] x [0, L] (x lateral, z depth)."""
    if nx < 3 or nz < 3:
        raise ConfigurationError("need at least 3 nodes per direction")
    return _tensor_cloud(np.linspace(0.0, l, nx), np.linspace(0.0, L, nz),
                         ("left", "right"))


def cylinder_cloud(R: float, L: float, nr: int, nz: int) -> NodeCloud:
    """Axisymmetric half-section [0, R] x [0, L] (r radius, z depth)."""
    if nr < 3 or nz < 3:
        raise ConfigurationError("need at least 3 nodes per direction")
    return _tensor_cloud(np.linspace(0.0, R, nr), np.linspace(0.0, L, nz),
                         ("axis", "wall"))

"""Global assembly and manufactured-solution behavior of the steady operator."""

import numpy as np
import pytest

from rootzone.errors import AssemblyError
from rootzone.lrbf import (
    NodeCloud,
    OperatorSpec,
    OperatorWeights,
    RbfKernel,
    assemble,
    assemble_table,
    neighbor_table,
    weight_rows,
)


def column(nz, L=1.0):
    z = np.linspace(0.0, L, nz)
    order = np.concatenate([np.arange(1, nz - 1), [0, nz - 1]])
    return NodeCloud(points=z[order, None], n_interior=nz - 2,
                     regions={"lo": np.array([nz - 2]), "hi": np.array([nz - 1])})


def steady_column_system(nz, alpha, eps=0.4, L=1.0, poly_degree=1,
                         rhs_fn=None, bc=(1.0, 1.0)):
    """Assemble -mu'' - alpha mu' = f with Dirichlet ends."""
    cloud = column(nz, L)
    table = neighbor_table(cloud, 3)
    k = RbfKernel(eps)
    n_i = cloud.n_interior
    W = np.empty((cloud.n_total, 3))
    op = OperatorSpec(c_lap=-1.0, c_dvert=-alpha)
    W[:n_i] = weight_rows(k, cloud.points, table, np.arange(n_i), op,
                          poly_degree=poly_degree)
    W[n_i:] = weight_rows(k, cloud.points, table, np.arange(n_i, cloud.n_total),
                          OperatorSpec.dirichlet(), poly_degree=poly_degree)
    z_i = cloud.points[:n_i, 0]
    f = np.zeros(n_i) if rhs_fn is None else rhs_fn(z_i)
    return cloud, assemble_table(cloud, table, W, f, np.asarray(bc, dtype=float))


def test_structural_nonzeros():
    cloud = column(10)
    table = neighbor_table(cloud, 3)
    W = np.ones((10, 3))
    sys_ = assemble_table(cloud, table, W, np.zeros(8), np.zeros(2))
    assert sys_.matrix.nnz == 30
    assert sys_.n_interior == 8


def test_block_layout_and_unit_boundary_rows():
    _, sys_ = steady_column_system(12, alpha=0.3)
    A = sys_.matrix.toarray()
    for b in (10, 11):
        row = np.zeros(12)
        row[b] = 1.0
        assert np.allclose(A[b], row, atol=1e-9)
    assert np.allclose(sys_.rhs[10:], [1.0, 1.0])


def test_all_dirichlet_degenerate_system():
    # identity interior operator: solution equals the rhs
    cloud = column(8)
    table = neighbor_table(cloud, 3)
    k = RbfKernel(0.4)
    W = np.empty((8, 3))
    W[:] = weight_rows(k, cloud.points, table, np.arange(8),
                       OperatorSpec.dirichlet())
    rhs = np.arange(8.0)
    sys_ = assemble_table(cloud, table, W, rhs[:6], rhs[6:])
    x = np.linalg.solve(sys_.matrix.toarray(), sys_.rhs)
    assert np.allclose(x, rhs, atol=1e-9)


def test_with_sigma_updates_diagonal_only():
    cloud, sys_ = steady_column_system(12, alpha=0.3)
    base = sys_.matrix.data.copy()
    sigma = np.zeros(12)
    sigma[:10] = 2.5
    sys_.with_sigma(base, sigma)
    A2 = sys_.matrix.toarray()
    sys_.with_sigma(base, np.zeros(12))
    A0 = sys_.matrix.toarray()
    assert np.allclose(A2 - A0, np.diag(sigma))


def test_duplicate_and_missing_rows():
    cloud = column(6)
    rows = [OperatorWeights(row=i, cols=np.array([i, (i + 1) % 6, (i + 2) % 6]),
                            weights=np.ones(3)) for i in range(6)]
    sys_ = assemble(cloud, rows, np.zeros(4), np.zeros(2))
    assert sys_.matrix.nnz == 18
    with pytest.raises(AssemblyError):
        assemble(cloud, rows[:-1] + [rows[0]], np.zeros(4), np.zeros(2))
    with pytest.raises(AssemblyError):
        assemble(cloud, rows[:-1], np.zeros(4), np.zeros(2))
    with pytest.raises(AssemblyError):
        assemble_table(cloud, np.tile([0, 1, 2], (6, 1)), np.full((6, 3), np.nan),
                       np.zeros(4), np.zeros(2))


@pytest.mark.parametrize("poly_degree", [None, 1])
def test_mms_exponential_profile_convergence(poly_degree):
    """-mu'' - alpha mu' = 0 with mu = e^{-alpha z}: error -> 0, order >= 1."""
    alpha = 1.2
    errs = []
    for nz in (21, 41, 81, 161):
        cloud, sys_ = steady_column_system(
            nz, alpha, poly_degree=poly_degree,
            bc=(np.exp(-alpha * 0.0), np.exp(-alpha * 1.0)))
        x = np.linalg.solve(sys_.matrix.toarray(), sys_.rhs)
        exact = np.exp(-alpha * cloud.points[:, 0])
        errs.append(np.abs(x - exact).max())
    errs = np.array(errs)
    orders = np.log2(errs[:-1] / errs[1:])
    assert errs[-1] < errs[0]
    assert orders.mean() >= 1.0


def test_mms_forced_problem():
    """Manufactured mu = sin(pi z) e^{-z}: nonzero forcing, order >= 1."""
    alpha = 0.7
    mu = lambda z: np.sin(np.pi * z) * np.exp(-z)
    d1 = lambda z: np.exp(-z) * (np.pi * np.cos(np.pi * z) - np.sin(np.pi * z))
    d2 = lambda z: np.exp(-z) * (-np.pi**2 * np.sin(np.pi * z)
                                 - 2 * np.pi * np.cos(np.pi * z)
                                 + np.sin(np.pi * z))
    rhs = lambda z: -d2(z) - alpha * d1(z)
    errs = []
    for nz in (31, 61, 121):
        cloud, sys_ = steady_column_system(nz, alpha, rhs_fn=rhs,
                                           bc=(mu(0.0), mu(1.0)))
        x = np.linalg.solve(sys_.matrix.toarray(), sys_.rhs)
        errs.append(np.abs(x - mu(cloud.points[:, 0])).max())
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders.mean() >= 1.0

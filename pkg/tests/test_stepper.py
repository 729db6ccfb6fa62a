"""Time marching, Picard control, and the linear-solve contract."""

import numpy as np
import pytest
import scipy.sparse as sp

from rootzone.errors import NonConvergenceError
from rootzone.lrbf import (
    NodeCloud,
    OperatorSpec,
    RbfKernel,
    assemble_table,
    neighbor_table,
    weight_rows,
)
from rootzone.lrbf.assemble import SparseSystem
from rootzone.stepper import (
    MarchResult,
    SparseSolver,
    TimeControls,
    march,
    picard_step,
    solve_sparse,
)


def build_column_problem(nz=41, alpha=0.8, D=2.0, dt=0.05, L=1.0, eps=0.4,
                         g_lo=None, g_hi=None, orientation=-1):
    """Constant-D implicit column with Dirichlet data (callables of t)."""
    z = np.linspace(0.0, L, nz)
    order = np.concatenate([np.arange(1, nz - 1), [0, nz - 1]])
    cloud = NodeCloud(points=z[order, None], n_interior=nz - 2,
                      regions={"lo": np.array([nz - 2]), "hi": np.array([nz - 1])})
    table = neighbor_table(cloud, 3)
    k = RbfKernel(eps)
    n_i = cloud.n_interior
    W = np.empty((nz, 3))
    W[:n_i] = weight_rows(k, cloud.points, table, np.arange(n_i),
                          OperatorSpec.interior(0.0, alpha, orientation),
                          poly_degree=1)
    W[n_i:] = weight_rows(k, cloud.points, table, np.arange(n_i, nz),
                          OperatorSpec.dirichlet(), poly_degree=1)
    system = assemble_table(cloud, table, W, np.zeros(n_i), np.zeros(2))
    base = system.matrix.data.copy()
    sigma = np.zeros(nz)

    class Problem:
        def __init__(self):
            self.cloud = cloud
            self.system = system

        def system_for(self, mu_n, mu_m, t_new):
            sigma[:n_i] = 1.0 / (D * dt)
            system.with_sigma(base, sigma)
            system.rhs[:n_i] = mu_n[:n_i] / (D * dt)
            system.rhs[n_i] = g_lo(t_new) if g_lo else 0.0
            system.rhs[n_i + 1] = g_hi(t_new) if g_hi else 0.0
            return system

    return Problem(), cloud, TimeControls(dt=dt, t_end=10 * dt)


def column_flux_problem(nz=61, alpha=0.9, D=1.5, dt=0.05):
    """Flux-free column (hydrostatic fixed point): -(d/dz + alpha) mu = 0."""
    z = np.linspace(0.0, 1.0, nz)
    order = np.concatenate([np.arange(1, nz - 1), [0, nz - 1]])
    cloud = NodeCloud(points=z[order, None], n_interior=nz - 2,
                      regions={"lo": np.array([nz - 2]), "hi": np.array([nz - 1])})
    table = neighbor_table(cloud, 3)
    k = RbfKernel(0.4)
    n_i = cloud.n_interior
    W = np.empty((nz, 3))
    W[:n_i] = weight_rows(k, cloud.points, table, np.arange(n_i),
                          OperatorSpec.interior(0.0, alpha, +1), poly_degree=1)
    W[n_i:] = weight_rows(k, cloud.points, table, np.arange(n_i, nz),
                          OperatorSpec.neumann_vertical(alpha, +1), poly_degree=1)
    system = assemble_table(cloud, table, W, np.zeros(n_i), np.zeros(2))
    base = system.matrix.data.copy()
    sigma = np.zeros(nz)

    class Problem:
        cloudref = cloud

        def system_for(self, mu_n, mu_m, t_new):
            sigma[:n_i] = 1.0 / (D * dt)
            system.with_sigma(base, sigma)
            system.rhs[:n_i] = mu_n[:n_i] / (D * dt)
            system.rhs[n_i:] = 0.0
            return system

    return Problem(), cloud, TimeControls(dt=dt, t_end=100 * dt)


def test_controls_validation():
    with pytest.raises(ValueError):
        TimeControls(dt=-1.0, t_end=1.0)
    with pytest.raises(ValueError):
        TimeControls(dt=0.1, t_end=0.05)
    assert TimeControls(dt=0.1, t_end=1.0).n_steps == 10


def test_solve_sparse_identity():
    A = sp.eye(20, format="csr")
    b = np.arange(20.0)
    sys_ = SparseSystem(matrix=A, rhs=b, n_interior=18)
    assert np.allclose(solve_sparse(sys_, 1e-12), b)


def test_solve_sparse_matches_dense_lu():
    # 1D Dirichlet steady problem vs a dense-LU oracle on N <= 200
    from tests.test_assemble import steady_column_system

    cloud, sys_ = steady_column_system(200, alpha=0.9, bc=(1.0, np.exp(-0.9)))
    x = solve_sparse(sys_, 1e-10)
    ref = np.linalg.solve(sys_.matrix.toarray(), sys_.rhs)
    assert np.abs(x - ref).max() <= 1e-9


def test_residual_contract_on_unsymmetric_system():
    rng = np.random.default_rng(0)
    n = 500
    A = sp.diags([2.5 + rng.random(n), -1.2 * np.ones(n - 1), -0.8 * np.ones(n - 1)],
                 [0, 1, -1], format="csr")
    b = rng.standard_normal(n)
    solver = SparseSolver()
    x = solver.solve(A, b, 1e-11)
    assert np.linalg.norm(A @ x - b) / np.linalg.norm(b) <= 1e-11
    # perturb the diagonal: the cached factorization must refine to contract
    A2 = A.copy()
    A2.setdiag(A2.diagonal() * 1.02)
    x2 = solver.solve(A2, b, 1e-11)
    assert np.linalg.norm(A2 @ x2 - b) / np.linalg.norm(b) <= 1e-11


def test_picard_fixed_point_single_iteration():
    # start exactly at the discrete steady state: converges in one iteration
    alpha, D = 0.8, 2.0
    prob, cloud, controls = build_column_problem(
        alpha=alpha, D=D, g_lo=lambda t: 1.0, g_hi=lambda t: np.exp(-alpha))
    from rootzone.stepper import SolverState

    big = TimeControls(dt=1e12, t_end=1e12, solver_tol=1e-10)
    prob_steady, _, _ = build_column_problem(
        alpha=alpha, D=D, dt=1e12, g_lo=lambda t: 1.0,
        g_hi=lambda t: np.exp(-alpha))
    solver = SparseSolver()
    sys_ = prob_steady.system_for(np.zeros(cloud.n_total), None, 0.0)
    mu_steady = solver.solve(sys_.matrix, sys_.rhs, 1e-10)
    state = SolverState(mu=mu_steady, t=0.0)
    mu_next, count = picard_step(state, prob_steady, big, solver)
    assert count == 1
    assert np.abs(mu_next - mu_steady).max() < 1e-8


def test_huge_dt_reproduces_steady_solve():
    # zero time-derivative limit equals the direct steady assembly
    from tests.test_assemble import steady_column_system

    alpha = 0.8
    cloud, steady = steady_column_system(41, alpha, bc=(1.0, np.exp(-alpha)))
    ref = np.linalg.solve(steady.matrix.toarray(), steady.rhs)
    prob, cloud2, _ = build_column_problem(
        nz=41, alpha=alpha, dt=1e14, orientation=+1,
        g_lo=lambda t: 1.0, g_hi=lambda t: np.exp(-alpha))
    solver = SparseSolver()
    sys_ = prob.system_for(np.zeros(41), None, 0.0)
    x = solver.solve(sys_.matrix, sys_.rhs, 1e-10)
    assert np.abs(x - ref).max() < 1e-8


def test_march_single_step_and_snapshots():
    prob, cloud, _ = build_column_problem(g_lo=lambda t: 1.0, g_hi=lambda t: 0.5)
    controls = TimeControls(dt=0.05, t_end=0.05)
    res = march(prob, np.ones(cloud.n_total), controls, output_times=(0.05,))
    assert res.steps == 1
    assert len(res.snapshots) == 1
    assert res.snapshots[0][0] == pytest.approx(0.05)


def test_stationarity_from_steady_state():
    alpha = 0.8
    prob, cloud, _ = build_column_problem(
        alpha=alpha, g_lo=lambda t: 1.0, g_hi=lambda t: np.exp(-alpha))
    solver = SparseSolver()
    # steady state of the discrete operator (huge-dt solve)
    steady_prob, _, _ = build_column_problem(
        alpha=alpha, dt=1e14, g_lo=lambda t: 1.0, g_hi=lambda t: np.exp(-alpha))
    s2 = steady_prob.system_for(np.zeros(cloud.n_total), None, 0.0)
    mu0 = solver.solve(s2.matrix, s2.rhs, 1e-10)
    controls = TimeControls(dt=0.05, t_end=0.5)
    res = march(prob, mu0, controls, output_times=(0.25, 0.5))
    for _, mu in res.snapshots:
        assert np.abs(mu - mu0).max() < 1e-10


def test_hydrostatic_profile_is_discrete_fixed_point():
    """mu = c e^{-alpha z} with flux-free ends: the per-step change is at
    truncation level from the start and decays as equilibrium is approached."""
    alpha = 0.9
    prob, cloud, controls = column_flux_problem(alpha=alpha)
    z = cloud.points[:, 0]
    mu0 = 2.0 * np.exp(-alpha * z)
    rates = []
    prev = {"mu": mu0}

    def observer(step, t, mu):
        rates.append(np.abs(mu - prev["mu"]).max() / 0.05)
        prev["mu"] = mu.copy()

    res = march(prob, mu0, controls, observer=observer)
    # hydrostatic is a fixed point up to boundary-row truncation:
    assert rates[0] < 2e-3 * np.abs(mu0).max() / 0.05
    # the drift rate decays as the discrete equilibrium is approached
    assert rates[-1] < rates[0] / 3.0
    assert np.abs(res.final_mu - mu0).max() < 5e-3


def test_march_determinism_bitwise():
    prob, cloud, controls = build_column_problem(
        g_lo=lambda t: 1.0 + 0.1 * np.sin(t), g_hi=lambda t: 0.4)
    mu0 = np.linspace(1.0, 0.4, cloud.n_total)
    r1 = march(prob, mu0, controls)
    prob2, _, _ = build_column_problem(
        g_lo=lambda t: 1.0 + 0.1 * np.sin(t), g_hi=lambda t: 0.4)
    r2 = march(prob2, mu0, controls)
    assert np.array_equal(r1.final_mu, r2.final_mu)


def test_nonconvergence_error():
    class Oscillator:
        """State-dependent rhs engineered to defeat a one-iteration budget."""

        def __init__(self, system):
            self.system = system

        def system_for(self, mu_n, mu_m, t_new):
            self.system.rhs[:] = 1.0 + 10.0 * np.sin(3.0 * mu_m)
            return self.system

    A = sp.eye(5, format="csr")
    sys_ = SparseSystem(matrix=A, rhs=np.zeros(5), n_interior=4)
    prob = Oscillator(sys_)
    controls = TimeControls(dt=1.0, t_end=2.0, tol_picard=1e-12, max_picard=3)
    from rootzone.stepper import SolverState

    with pytest.raises(NonConvergenceError) as err:
        picard_step(SolverState(mu=np.zeros(5), t=0.0), prob, controls,
                    SparseSolver())
    assert err.value.last_delta is not None


def test_output_times_validation():
    prob, cloud, _ = build_column_problem(g_lo=lambda t: 1.0, g_hi=lambda t: 0.5)
    with pytest.raises(ValueError):
        march(prob, np.ones(cloud.n_total), TimeControls(dt=0.05, t_end=0.5),
              output_times=(0.033,))

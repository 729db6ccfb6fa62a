"""Backward-Euler time marching with Picard linearization.

Each implicit step freezes the state-dependent coefficients (diffusivity and
state-dependent uptake) at the previous Picard iterate, solves the global
sparse collocation system, and stops when the max-norm update drops below
``tol_picard``.  The linear-solve contract is purely a relative residual
tolerance; the engine picks a direct factorization for systems up to
``DIRECT_LIMIT`` rows and an AMG-preconditioned Krylov method above, caching
factorizations/hierarchies across the many nearly-identical solves a march
produces (only the time-step diagonal moves between Picard iterates).
"""

from __future__ import annotations

import logging
import time as _time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NonConvergenceError, SolverError
from .lrbf.assemble import SparseSystem

__all__ = [
    "TimeControls",
    "SolverState",
    "SparseSolver",
    "solve_sparse",
    "picard_step",
    "march",
    "MarchResult",
    "DIRECT_LIMIT",
]

log = logging.getLogger("rootzone.stepper")

#: Largest system handed to the sparse direct factorization.
DIRECT_LIMIT = 200_000


@dataclass(frozen=True)
class TimeControls:
    dt: float
    t_end: float
    tol_picard: float = 1e-8
    max_picard: int = 100
    solver_tol: float = 1e-12

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end >= self.dt):
            raise ValueError("need dt > 0 and t_end >= dt")
        if not (self.tol_picard > 0 and self.max_picard >= 1):
            raise ValueError("need tol_picard > 0 and max_picard >= 1")

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_end / self.dt))
        if abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            n = int(np.ceil(self.t_end / self.dt - 1e-12))
        return max(n, 1)


@dataclass
class SolverState:
    mu: np.ndarray
    t: float
    picard_counts: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)


class SparseSolver:
    """Residual-contract linear solver with factorization/hierarchy reuse.

    Direct path (N <= direct_limit): sparse LU, reused across solves through
    iterative refinement while the matrix drift stays small.  Iterative path:
    BiCGStab preconditioned by a smoothed-aggregation AMG hierarchy, rebuilt
    when convergence degrades.
    """

    def __init__(self, direct_limit: int = DIRECT_LIMIT):
        self.direct_limit = direct_limit
        self._lu = None
        self._ml = None
        self._ref_data = None
        self._ref_shape = None
        self.last_residual = np.nan
        self.last_iterations = 0

    # -- internals -----------------------------------------------------------

    def _drift(self, A) -> float:
        if self._ref_data is None or self._ref_shape != A.shape or \
                len(self._ref_data) != len(A.data):
            return np.inf
        scale = np.max(np.abs(self._ref_data))
        if scale == 0.0:
            return np.inf
        return float(np.max(np.abs(A.data - self._ref_data)) / scale)

    def _remember(self, A):
        self._ref_data = A.data.copy()
        self._ref_shape = A.shape

    def _factor_direct(self, A):
        self._lu = spla.splu(A.tocsc())
        self._remember(A)

    def _build_amg(self, A):
        import pyamg

        self._ml = pyamg.smoothed_aggregation_solver(A, max_coarse=500)
        self._remember(A)

    # -- public ---------------------------------------------------------------

    def invalidate(self):
        self._lu = None
        self._ml = None
        self._ref_data = None

    def solve(self, A: sp.csr_matrix, b: np.ndarray, tol: float,
              x0: np.ndarray | None = None) -> np.ndarray:
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            self.last_residual = 0.0
            return np.zeros_like(b)
        if A.shape[0] <= self.direct_limit:
            return self._solve_direct(A, b, tol, bnorm)
        return self._solve_iterative(A, b, tol, bnorm, x0)

    def _solve_direct(self, A, b, tol, bnorm):
        if self._lu is None or self._drift(A) > 0.1:
            self._factor_direct(A)
        x = self._lu.solve(b)
        for attempt in range(12):
            r = b - A @ x
            res = np.linalg.norm(r) / bnorm
            if res <= tol:
                self.last_residual = res
                self.last_iterations = attempt
                return x
            if attempt == 5:
                # refinement stalling: refactor on the current matrix
                self._factor_direct(A)
            x = x + self._lu.solve(r)
        res = float(np.linalg.norm(b - A @ x) / bnorm)
        if res <= tol:
            self.last_residual = res
            return x
        raise SolverError(f"direct solve stalled at relative residual {res:.3e}")

    def _solve_iterative(self, A, b, tol, bnorm, x0):
        for attempt in range(3):
            if self._ml is None or (attempt > 0):
                self._build_amg(A)
            residuals: list = []
            x = self._ml.solve(b, x0=x0, tol=tol, maxiter=300,
                               accel="bicgstab", residuals=residuals)
            res = float(np.linalg.norm(b - A @ x) / bnorm)
            self.last_iterations = len(residuals)
            if res <= tol:
                self.last_residual = res
                # Rebuild the hierarchy next time if convergence was slow.
                if len(residuals) > 60:
                    self._ml = None
                return x
            x0 = x
        if A.shape[0] <= 3_000_000:
            log.warning("AMG-preconditioned solve stalled (res %.3e); "
                        "falling back to direct factorization", res)
            self._factor_direct(A)
            return self._solve_direct(A, b, tol, bnorm)
        raise SolverError(f"iterative solve stalled at relative residual {res:.3e}")


def solve_sparse(system: SparseSystem, tol: float,
                 solver: SparseSolver | None = None) -> np.ndarray:
    """Solve one assembled system to the relative-residual contract."""
    eng = solver if solver is not None else SparseSolver()
    return eng.solve(system.matrix, system.rhs, tol)


def picard_step(state: SolverState, problem, controls: TimeControls,
                solver: SparseSolver) -> tuple[np.ndarray, int]:
    """Advance one backward-Euler step by Picard iteration.

    ``problem.system_for(mu_n, mu_iterate, t_new)`` must return the assembled
    SparseSystem with coefficients frozen at ``mu_iterate``.  Returns the
    converged field and the iteration count.
    """
    t_new = state.t + controls.dt
    mu_n = state.mu
    mu_m = mu_n  # initial guess: previous time level
    for m in range(1, controls.max_picard + 1):
        system = problem.system_for(mu_n, mu_m, t_new)
        mu_next = solver.solve(system.matrix, system.rhs, controls.solver_tol,
                               x0=mu_m)
        delta = float(np.max(np.abs(mu_next - mu_m)))
        mu_m = mu_next
        if delta < controls.tol_picard:
            return mu_m, m
    raise NonConvergenceError(
        f"Picard iteration did not reach {controls.tol_picard:.1e} in "
        f"{controls.max_picard} iterations (last delta {delta:.3e}) at t={t_new:g}",
        last_delta=delta, time=t_new,
    )


@dataclass
class MarchResult:
    snapshots: list                  # [(t, mu array)]
    picard_counts: list
    residual_history: list
    steady_time: float | None
    final_mu: np.ndarray
    final_t: float
    wall_seconds: float
    steps: int


def march(problem, mu0: np.ndarray, controls: TimeControls,
          output_times=None, solver: SparseSolver | None = None,
          steady_tol: float | None = None, stop_at_steady: bool = False,
          observer=None, log_every: int | None = None) -> MarchResult:
    """Fixed-step backward-Euler marching from mu0 to t_end.

    Snapshots are taken at the steps nearest each requested output time.
    ``observer(step, t, mu)`` runs after every accepted step (diagnostics).
    With ``steady_tol`` set, the first time max|mu^{n+1}-mu^n|/dt drops below
    it is recorded; ``stop_at_steady`` additionally ends the march there.
    """
    solver = solver if solver is not None else SparseSolver()
    n_steps = controls.n_steps
    out_steps: dict[int, float] = {}
    for t_out in (output_times or []):
        k = int(round(t_out / controls.dt))
        if abs(k * controls.dt - t_out) > 1e-6 * max(1.0, t_out):
            raise ValueError(f"output time {t_out} is not a multiple of dt")
        out_steps[min(max(k, 1), n_steps)] = t_out
    if log_every is None:
        log_every = max(1, n_steps // 20)

    state = SolverState(mu=np.asarray(mu0, dtype=float).copy(), t=0.0)
    snapshots = []
    steady_time = None
    t0 = _time.perf_counter()
    step = 0
    for step in range(1, n_steps + 1):
        mu_new, count = picard_step(state, problem, controls, solver)
        rate = float(np.max(np.abs(mu_new - state.mu)) / controls.dt)
        state.mu = mu_new
        state.t = step * controls.dt
        state.picard_counts.append(count)
        state.residual_history.append(solver.last_residual)
        log.debug("step=%d t=%.6g picard=%d delta_rate=%.3e lin_res=%.3e",
                  step, state.t, count, rate, solver.last_residual)
        if step % log_every == 0 or step == n_steps:
            log.info("step %d/%d t=%.6g picard=%d rate=%.3e res=%.3e",
                     step, n_steps, state.t, count, rate, solver.last_residual)
        if observer is not None:
            observer(step, state.t, state.mu)
        if step in out_steps:
            snapshots.append((state.t, state.mu.copy()))
        if steady_tol is not None and steady_time is None and rate < steady_tol:
            steady_time = state.t
            if stop_at_steady:
                break
    return MarchResult(
        snapshots=snapshots,
        picard_counts=state.picard_counts,
        residual_history=state.residual_history,
        steady_time=steady_time,
        final_mu=state.mu,
        final_t=state.t,
        wall_seconds=_time.perf_counter() - t0,
        steps=step,
    )

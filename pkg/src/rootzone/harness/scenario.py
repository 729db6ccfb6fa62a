"""Scenario definitions: the built-in experiment family.

A Scenario bundles geometry, soil, uptake, boundary conditions, numerics
parameters, and the reference-solution binding for one experiment.  The four
built-in families:

* ``test1`` -- 1D evaporation from a saturated 20 cm column (three drying
  cases), validated against the closed-form drying solution.
* ``test2`` -- 1D rooted column above a water table under constant or
  transient surface flux (property-based validation: flux plateaus, steady
  arrival, mass balance).
* ``test3`` -- 2D periodic furrow irrigation with nonlinear uptake, validated
  against the cosine-series solution.
* ``test4`` -- axisymmetric irrigation from a circular surface source,
  validated against the bounded-cylinder Bessel-series solution.

Boundary data are specified physically (water content for Dirichlet, cm/h
fluxes along the +coordinate direction for Neumann); the runner transforms to
Kirchhoff variables.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigurationError
from ..hydraulics import Model2Params, SoilHydraulics, SoilModel
from ..oracles.cylinder import CylinderSource
from ..oracles.evaporation import DryingColumn
from ..oracles.furrow import FurrowSource
from ..stepper import TimeControls
from ..uptake import UptakeKind, UptakeModel
from . import geometry

__all__ = [
    "BcKind",
    "BoundaryCondition",
    "Scenario",
    "build_scenario_test1",
    "build_scenario_test2",
    "build_scenario_test3",
    "build_scenario_test4",
    "SCENARIO_BUILDERS",
    "registry_entries",
    "from_registry",
]

CM_PER_M = 100.0
SEC_PER_HOUR = 3600.0

# Brindabella silty clay loam (tests 3 and 4)
BRINDABELLA = dict(theta_r=0.0, theta_s=0.485, K_s=12.0, alpha=0.142)
PLANTS = {1: dict(m=3.0, A=-0.0021, k=-3.31e-5),
          2: dict(m=5.0, A=-0.007, k=-3.18e-8)}
CHARACTERISTIC_LENGTH = 7.0       # l_s [cm]


class BcKind(enum.Enum):
    DIRICHLET_THETA = "dirichlet_theta"
    FLUX_VERTICAL = "flux_vertical"
    FLUX_LATERAL = "flux_lateral"


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary data on one named region.

    ``data(t, pts)`` returns water content (Dirichlet) or flux [cm/h] along
    the +coordinate direction (vertical/lateral Neumann), scalar or per-node.
    """

    region: str
    kind: BcKind
    data: object

    def values(self, t: float, pts: np.ndarray) -> np.ndarray:
        out = self.data(t, pts) if callable(self.data) else self.data
        return np.broadcast_to(np.asarray(out, dtype=float), (len(pts),))


@dataclass(frozen=True)
class Scenario:
    name: str
    dim: int
    soil: SoilHydraulics
    uptake: UptakeModel
    orientation: int                 # +1: coordinate is height; -1: depth
    axisymmetric: bool
    epsilon: float
    n_s: int
    controls: TimeControls
    geometry: dict
    node_counts: dict
    bcs: tuple
    initial_mu: object               # callable(points) -> mu
    output_times: tuple
    oracle: object | None = None
    oracle_theta: object | None = None   # callable(points, t) -> Theta
    rmse_variable: str = "Theta"
    diagnostics: str | None = None
    diag_interval: float = 1.0
    description: str = ""

    def build_cloud(self):
        g, n = self.geometry, self.node_counts
        if self.dim == 1:
            if self.orientation < 0:
                return geometry.column_cloud(g["L"], n["nz"], "surface", "bottom")
            return geometry.column_cloud(g["L"], n["nz"], "water_table", "surface")
        if self.axisymmetric:
            return geometry.cylinder_cloud(g["R_cyl"], g["L"], n["nr"], n["nz"])
        return geometry.rectangle_cloud(g["l"], g["L"], n["nx"], n["nz"])

    def with_overrides(self, **kw) -> "Scenario":
        """Return a copy with dt/t_end/epsilon/n_s/node counts replaced."""
        controls = self.controls
        tc = {k: kw.pop(k) for k in ("dt", "t_end", "tol_picard", "solver_tol")
              if k in kw}
        if tc:
            controls = replace(controls, **tc)
        counts = dict(self.node_counts)
        for key in list(kw):
            if key in counts:
                counts[key] = kw.pop(key)
        out = replace(self, controls=controls, node_counts=counts,
                      **{k: kw.pop(k) for k in ("epsilon", "n_s", "output_times")
                         if k in kw})
        if kw:
            raise ConfigurationError(f"unknown overrides: {sorted(kw)}")
        return out


# ---------------------------------------------------------------------------
# test 1: evaporation column
# ---------------------------------------------------------------------------

#: drying-rate fitting parameter b [1/m] and reporting time [h] per case
_TEST1_CASES = {1: (0.413, 600.0), 2: (0.489, 350.0), 3: (0.37, 900.0)}


def build_scenario_test1(case: int = 1) -> Scenario:
    """Saturated 20 cm column drying under a prescribed surface content."""
    if case not in _TEST1_CASES:
        raise ConfigurationError(f"test1 case must be 1, 2, or 3, got {case}")
    b_per_m, t_end = _TEST1_CASES[case]
    # K-7 sand, converted from m/s and 1/m to cm/h and 1/cm
    soil = SoilHydraulics(theta_r=0.0, theta_s=0.4,
                          K_s=3.9e-6 * CM_PER_M * SEC_PER_HOUR,
                          alpha=4.8 / CM_PER_M)
    L = 20.0
    oracle = DryingColumn(alpha=soil.alpha,
                          D=float(soil.diffusivity(soil.theta_s)),
                          b=b_per_m / CM_PER_M)

    def surface_theta(t, pts):
        return soil.content_from_normalized(math.exp(-oracle.beta * t))

    def bottom_theta(t, pts):
        return soil.content_from_normalized(oracle.theta_normalized(L, t))

    def initial_mu(pts):
        return np.full(len(pts), soil.kirchhoff_forward(soil.theta_s))

    def oracle_theta(pts, t):
        return oracle.theta_normalized(pts[:, 0], t)

    return Scenario(
        name=f"test1-case{case}",
        dim=1,
        soil=soil,
        uptake=UptakeModel(),
        orientation=-1,
        axisymmetric=False,
        epsilon=0.4,
        n_s=3,
        controls=TimeControls(dt=0.01, t_end=t_end),
        geometry={"L": L},
        node_counts={"nz": 200},
        bcs=(
            BoundaryCondition("surface", BcKind.DIRICHLET_THETA, surface_theta),
            BoundaryCondition("bottom", BcKind.DIRICHLET_THETA, bottom_theta),
        ),
        initial_mu=initial_mu,
        output_times=(t_end,),
        oracle=oracle,
        oracle_theta=oracle_theta,
        rmse_variable="Theta",
        diagnostics="evaporation",
        diag_interval=0.5,
        description=f"drying column, case {case} (b={b_per_m} 1/m, T={t_end} h)",
    )


# ---------------------------------------------------------------------------
# test 2: rooted column above a water table
# ---------------------------------------------------------------------------

_TEST2_ALPHA = {1: 0.01, 2: 0.1}          # 1/cm
_TEST2_R0 = {1: 0.02, 2: 0.0025}          # 1/h
_TEST2_Q_CONST = -0.9                     # cm/h upward (< 0: infiltration)
_TEST2_Q0_TRANSIENT = -1.0                # cm/h, the flux q1 decays onto this
_TEST2_DELTA = -0.8                       # cm/h
_TEST2_K1 = -0.1                          # 1/h


def build_scenario_test2(alpha_case: int, uptake_kind: str = "exponential",
                         surface: str = "constant",
                         beta_r: float = 0.04, t_end: float = 50.0) -> Scenario:
    """Rooted 100 cm column: water table below, prescribed flux above."""
    if alpha_case not in _TEST2_ALPHA:
        raise ConfigurationError(f"alpha_case must be 1 or 2, got {alpha_case}")
    if surface not in ("constant", "transient"):
        raise ConfigurationError(f"surface must be constant|transient, got {surface}")
    soil = SoilHydraulics(theta_r=0.2, theta_s=0.45, K_s=1.0,
                          alpha=_TEST2_ALPHA[alpha_case])
    L, L1 = 100.0, 60.0
    R0 = _TEST2_R0[alpha_case]
    if uptake_kind == "stepwise":
        uptake = UptakeModel(kind=UptakeKind.STEPWISE, R0=R0, L1=L1, L=L)
    elif uptake_kind == "exponential":
        uptake = UptakeModel(kind=UptakeKind.EXPONENTIAL, R0=R0, L1=L1, L=L,
                             beta_r=beta_r)
    elif uptake_kind == "none":
        uptake = UptakeModel()
    else:
        raise ConfigurationError(f"unknown uptake kind {uptake_kind!r}")

    if surface == "constant":
        def q_surface(t, pts):
            return _TEST2_Q_CONST
    else:
        def q_surface(t, pts):
            return _TEST2_Q0_TRANSIENT + _TEST2_DELTA * math.exp(_TEST2_K1 * t)

    def initial_mu(pts):
        # hydrostatic equilibrium above the water table: h = -z
        theta0 = soil.theta_r + soil.delta_theta * np.exp(-soil.alpha * pts[:, 0])
        return soil.kirchhoff_forward(theta0)

    return Scenario(
        name=f"test2-a{alpha_case}-{uptake_kind}-{surface}",
        dim=1,
        soil=soil,
        uptake=uptake,
        orientation=+1,
        axisymmetric=False,
        epsilon=0.2,
        n_s=5,
        controls=TimeControls(dt=0.005, t_end=t_end),
        geometry={"L": L, "L1": L1},
        node_counts={"nz": 1001},
        bcs=(
            BoundaryCondition("water_table", BcKind.DIRICHLET_THETA,
                              soil.theta_s),
            BoundaryCondition("surface", BcKind.FLUX_VERTICAL, q_surface),
        ),
        initial_mu=initial_mu,
        output_times=(t_end,),
        oracle=None,
        rmse_variable="theta",
        diagnostics="root_fluxes",
        diag_interval=0.5,
        description=(f"rooted column, alpha={soil.alpha} 1/cm, R0={R0} 1/h, "
                     f"{uptake_kind} uptake, {surface} surface flux"),
    )


# ---------------------------------------------------------------------------
# tests 3 and 4: nonlinear uptake under irrigation
# ---------------------------------------------------------------------------

def _brindabella(plant: int):
    if plant not in PLANTS:
        raise ConfigurationError(f"plant must be 1 or 2, got {plant}")
    soil_kw = dict(BRINDABELLA)
    t_s = soil_kw["theta_s"] / (soil_kw["alpha"] * soil_kw["K_s"])
    params = Model2Params(t_s=t_s, **PLANTS[plant])
    soil = SoilHydraulics(model=SoilModel.BROADBRIDGE_WHITE, model2=params,
                          **soil_kw)
    uptake = UptakeModel(kind=UptakeKind.NONLINEAR, params=params,
                         theta_s=soil.theta_s)
    return soil, uptake, params


def build_scenario_test3(plant: int = 1, t_end: float = 0.1,
                         nx: int = 1000, nz: int = 2000) -> Scenario:
    """2D furrow irrigation with nonlinear uptake (Brindabella soil)."""
    soil, uptake, params = _brindabella(plant)
    l_s = CHARACTERISTIC_LENGTH
    l, x0 = 4.0 * l_s, l_s
    L = 8.0 * l_s     # depth chosen so the published grids are isotropic
    oracle = FurrowSource(F0=4.0, x0=x0, l=l, K_s=soil.K_s, alpha=soil.alpha,
                          theta_s=soil.theta_s, plant=params)

    def q_surface(t, pts):
        # midpoint value at the strip edge: the series trace at the jump
        v0 = oracle.F0 * math.exp(oracle.time_rate * t)
        x = pts[:, 0]
        vals = np.where(x <= x0 + 1e-9, v0, 0.0)
        return np.where(np.abs(x - x0) <= 1e-9, 0.5 * v0, vals)

    def q_bottom(t, pts):
        return oracle.surface_flux(pts[:, 0], L, t)

    phi_cache = {}

    def _phi_at(pts):
        key = len(pts)
        if phi_cache.get("key") != key:
            phi_cache["key"] = key
            phi_cache["phi"] = oracle.phi(pts[:, 0], pts[:, 1])
        return phi_cache["phi"]

    def oracle_theta(pts, t):
        val = np.expm1(params.m) * np.exp(oracle.time_rate * t) * _phi_at(pts)
        return np.log1p(val) / params.m

    def initial_mu(pts):
        return oracle.mu_prefactor * _phi_at(pts)

    return Scenario(
        name=f"test3-plant{plant}",
        dim=2,
        soil=soil,
        uptake=uptake,
        orientation=-1,
        axisymmetric=False,
        epsilon=0.5,
        n_s=5,
        controls=TimeControls(dt=0.001, t_end=t_end),
        geometry={"l": l, "L": L, "x0": x0, "l_s": l_s},
        node_counts={"nx": nx, "nz": nz},
        bcs=(
            BoundaryCondition("surface", BcKind.FLUX_VERTICAL, q_surface),
            BoundaryCondition("bottom", BcKind.FLUX_VERTICAL, q_bottom),
            BoundaryCondition("left", BcKind.FLUX_LATERAL, 0.0),
            BoundaryCondition("right", BcKind.FLUX_LATERAL, 0.0),
        ),
        initial_mu=initial_mu,
        output_times=(t_end,),
        oracle=oracle,
        oracle_theta=oracle_theta,
        rmse_variable="Theta",
        diagnostics=None,
        description=f"furrow irrigation, plant {plant}",
    )


def build_scenario_test4(plant: int = 1, r0_star: float = 0.5, t_end: float = 0.1,
                         nr: int = 125, nz: int = 1000,
                         epsilon: float = 0.5) -> Scenario:
    """Axisymmetric irrigation from a circular source (Brindabella soil)."""
    soil, uptake, params = _brindabella(plant)
    if r0_star not in (0.2, 0.5):
        raise ConfigurationError("r0_star must be 0.2 (=1/5) or 0.5 (=1/2)")
    l_s = CHARACTERISTIC_LENGTH
    r0 = r0_star * l_s
    R_cyl, L = 7.0, 56.0
    oracle = CylinderSource(F0=4.0, r0=r0, R_cyl=R_cyl, K_s=soil.K_s,
                            alpha=soil.alpha, theta_s=soil.theta_s,
                            plant=params)

    def q_surface(t, pts):
        # midpoint value at the source rim: the series trace at the jump
        v0 = oracle.F0 * math.exp(oracle.time_rate * t)
        r = pts[:, 0]
        vals = np.where(r <= r0 + 1e-9, v0, 0.0)
        return np.where(np.abs(r - r0) <= 1e-9, 0.5 * v0, vals)

    def q_bottom(t, pts):
        return oracle.vertical_flux(pts[:, 0], L, t)

    phi_cache = {}

    def _phi_at(pts):
        """Phi at the cloud nodes via the tensor-grid evaluator."""
        key = len(pts)
        if phi_cache.get("key") != key:
            r_grid = np.linspace(0.0, R_cyl, nr)
            z_grid = np.linspace(0.0, L, nz)
            G = oracle.phi_grid(r_grid, z_grid, tol=1e-7)
            ir = np.clip(np.rint(pts[:, 0] / (R_cyl / (nr - 1))), 0, nr - 1)
            iz = np.clip(np.rint(pts[:, 1] / (L / (nz - 1))), 0, nz - 1)
            phi_cache["key"] = key
            phi_cache["phi"] = G[iz.astype(int), ir.astype(int)]
        return phi_cache["phi"]

    def oracle_theta(pts, t):
        return oracle.theta_normalized_from_phi(_phi_at(pts), t)

    def initial_mu(pts):
        return oracle.mu_prefactor * _phi_at(pts)

    return Scenario(
        name=f"test4-plant{plant}-r{'half' if r0_star == 0.5 else 'fifth'}",
        dim=3,
        soil=soil,
        uptake=uptake,
        orientation=-1,
        axisymmetric=True,
        epsilon=epsilon,
        n_s=7,
        controls=TimeControls(dt=0.01, t_end=t_end),
        geometry={"R_cyl": R_cyl, "L": L, "r0": r0, "l_s": l_s},
        node_counts={"nr": nr, "nz": nz},
        bcs=(
            BoundaryCondition("surface", BcKind.FLUX_VERTICAL, q_surface),
            BoundaryCondition("bottom", BcKind.FLUX_VERTICAL, q_bottom),
            BoundaryCondition("axis", BcKind.FLUX_LATERAL, 0.0),
            BoundaryCondition("wall", BcKind.FLUX_LATERAL, 0.0),
        ),
        initial_mu=initial_mu,
        output_times=(t_end,),
        oracle=oracle,
        oracle_theta=oracle_theta,
        rmse_variable="Theta",
        diagnostics=None,
        description=f"circular-source irrigation, plant {plant}, r0*={r0_star}",
    )


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

SCENARIO_BUILDERS = {
    "test1": (build_scenario_test1, {"case": (1, 2, 3)}),
    "test2": (build_scenario_test2, {"alpha_case": (1, 2),
                                     "uptake_kind": ("stepwise", "exponential", "none"),
                                     "surface": ("constant", "transient")}),
    "test3": (build_scenario_test3, {"plant": (1, 2)}),
    "test4": (build_scenario_test4, {"plant": (1, 2), "r0_star": (0.2, 0.5)}),
}


def registry_entries():
    """(name, description) for every built-in scenario variant."""
    out = []
    for case in (1, 2, 3):
        s = build_scenario_test1(case)
        out.append((s.name, s.description))
    for a in (1, 2):
        for kind in ("stepwise", "exponential", "none"):
            for surf in ("constant", "transient"):
                s = build_scenario_test2(a, kind, surf)
                out.append((s.name, s.description))
    for p in (1, 2):
        s = build_scenario_test3(p)
        out.append((s.name, s.description))
        for r in (0.2, 0.5):
            s = build_scenario_test4(p, r)
            out.append((s.name, s.description))
    return out


def from_registry(family: str, **kw) -> Scenario:
    if family not in SCENARIO_BUILDERS:
        raise ConfigurationError(
            f"unknown scenario {family!r}; use one of {sorted(SCENARIO_BUILDERS)}"
        )
    builder, _ = SCENARIO_BUILDERS[family]
    return builder(**kw)

"""Self-checks of the reference solutions (the `verify-oracles` command).

Each check returns (name, passed, detail).  They are deliberately
independent of the solver: finite differences, quadrature refinement, and
closed-form identities only.
"""

from __future__ import annotations

import numpy as np

from .hydraulics import Model2Params
from .oracles.cylinder import CylinderSource
from .oracles.disc_source import DiscSource
from .oracles.evaporation import DryingColumn
from .oracles.furrow import FurrowSource
from .oracles.special import bessel_j0, bessel_j1, erfc

__all__ = ["oracle_self_checks"]


def _teng_case():
    # evaporation-column parameters in cm/h units
    Ks = 3.9e-6 * 100 * 3600
    alpha, dtheta = 0.048, 0.4
    return DryingColumn(alpha=alpha, D=Ks / (alpha * dtheta), b=0.489 / 100.0)


def _plant(m, A, k):
    t_s = 0.485 / (0.142 * 12.0)
    return Model2Params(m=m, A=A, k=k, t_s=t_s)


def _furrow():
    return FurrowSource(F0=4.0, x0=7.0, l=28.0, K_s=12.0, alpha=0.142,
                        theta_s=0.485, plant=_plant(3.0, -0.0021, -3.31e-5))


def _pde_residual(col: DryingColumn, variant: str) -> float:
    """|Theta_t - D Theta_zz + alpha D Theta_z| at interior sample points."""
    z = np.array([2.0, 5.0, 9.0, 14.0])
    t = np.array([15.0, 40.0, 80.0])
    hz, ht = 1e-3, 1e-3
    worst = 0.0
    for ti in t:
        f = lambda zz, tt: col.theta_normalized(zz, tt, variant)
        th_t = (f(z, ti + ht) - f(z, ti - ht)) / (2 * ht)
        th_z = (f(z + hz, ti) - f(z - hz, ti)) / (2 * hz)
        th_zz = (f(z + hz, ti) - 2 * f(z, ti) + f(z - hz, ti)) / hz**2
        res = th_t - col.D * th_zz + col.alpha * col.D * th_z
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def oracle_self_checks():
    checks = []

    x = np.linspace(-5, 5, 41)
    err = np.abs(erfc(-x) - (2.0 - erfc(x))).max()
    checks.append(("erfc reflection identity", err < 1e-14, f"max err {err:.2e}"))

    xs = np.linspace(0.1, 60.0, 100)
    h = 1e-6
    fd = (bessel_j0(xs + h) - bessel_j0(xs - h)) / (2 * h)
    err = np.abs(fd + bessel_j1(xs)).max()
    checks.append(("J0' = -J1 (finite differences)", err < 1e-8,
                   f"max err {err:.2e}"))

    col = _teng_case()
    res_c = _pde_residual(col, "corrected")
    res_p = _pde_residual(col, "printed")
    checks.append(("drying solution satisfies its PDE (corrected variant)",
                   res_c < 1e-6, f"residual {res_c:.2e}"))
    checks.append(("printed drying variant fails the PDE (known misprint)",
                   res_p > 1e3 * max(res_c, 1e-12), f"residual {res_p:.2e}"))
    bc = abs(col.theta_normalized(0.0, 50.0) - np.exp(-col.beta * 50.0))
    ic = abs(col.theta_normalized(7.0, 1e-10) - 1.0)
    checks.append(("drying solution boundary/initial limits",
                   bc < 1e-13 and ic < 1e-10, f"bc {bc:.1e}, ic {ic:.1e}"))

    fur = _furrow()
    j = np.arange(1, 40)
    res = fur.characteristic_residual(j).max()
    checks.append(("furrow modes solve the characteristic quadratic",
                   res < 1e-12, f"max residual {res:.2e}"))
    xs = np.linspace(0.0, fur.l, 4001)
    hz = 1e-6
    dphidz = (fur.phi(xs, hz) - fur.phi(xs, 0.0)) / hz
    flux = fur.mu_prefactor * (-dphidz + fur.alpha * fur.phi(xs, 0.0))
    mean = np.trapezoid(flux, xs) / fur.l
    target = fur.F0 * fur.x0 / fur.l
    err = abs(mean - target) / target
    checks.append(("furrow surface flux carries the mean infiltration",
                   err < 1e-6, f"rel err {err:.2e}"))

    disc = DiscSource(F0=4.0, r0=3.5, R_cyl=7.0, K_s=12.0, alpha=0.142,
                      theta_s=0.485, plant=_plant(5.0, -0.007, -3.18e-8),
                      tol=1e-8)
    fine = DiscSource(F0=4.0, r0=3.5, R_cyl=7.0, K_s=12.0, alpha=0.142,
                      theta_s=0.485, plant=_plant(5.0, -0.007, -3.18e-8),
                      tol=1e-9, panel_scale=14.0)
    pts = [(0.0, 1.0), (2.0, 0.5), (3.5, 2.0), (5.0, 0.0), (1.0, 10.0)]
    worst = max(abs(disc.phi(r, z) - fine.phi(r, z)) / abs(fine.phi(r, z))
                for r, z in pts)
    checks.append(("half-space integral quadrature self-consistency",
                   worst < 1e-8, f"max rel diff {worst:.2e}"))

    cyl = CylinderSource(F0=4.0, r0=3.5, R_cyl=7.0, K_s=12.0, alpha=0.142,
                         theta_s=0.485, plant=_plant(5.0, -0.007, -3.18e-8))
    big = CylinderSource(F0=4.0, r0=3.5, R_cyl=70.0, K_s=12.0, alpha=0.142,
                         theta_s=0.485, plant=_plant(5.0, -0.007, -3.18e-8))
    worst = max(abs(big.phi(r, z, tol=1e-7) - fine.phi(r, z)) / abs(fine.phi(r, z))
                for r, z in [(0.0, 1.0), (2.0, 0.5), (3.5, 2.0)])
    checks.append(("bounded-cylinder series matches the half-space limit",
                   worst < 1e-4, f"max rel diff at R=70: {worst:.2e}"))
    res = cyl.characteristic_residual(np.arange(1, 30)).max()
    checks.append(("cylinder modes solve the characteristic quadratic",
                   res < 1e-10, f"max residual {res:.2e}"))
    return checks

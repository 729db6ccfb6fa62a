"""Root water-uptake sink terms and admissibility."""

import math

import numpy as np
import pytest

from rootzone.errors import DomainError
from rootzone.hydraulics import Model2Params
from rootzone.uptake import UptakeKind, UptakeModel, check_admissibility

T_S = 0.485 / (0.142 * 12.0)


def plant(m, A, k):
    return Model2Params(m=m, A=A, k=k, t_s=T_S)


def test_admissibility_plant1():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = plant(3.0, -0.0021, -3.31e-5)
    ok, margin = check_admissibility(p)
    assert ok
    # bound = (-A/m) e^{-m} (1 - e^{-m}) = 3.3116e-5, published k is 3.31e-5
    assert p.uptake_bound() == pytest.approx(3.3116e-5, rel=1e-4)
    assert margin == pytest.approx(1.58e-8, rel=0.02)


def test_admissibility_plant2():
    p = plant(5.0, -0.007, -3.18e-8)
    ok, margin = check_admissibility(p)
    assert ok
    assert margin == pytest.approx(9.34e-6, rel=0.01)


def test_admissibility_trivial():
    p = plant(1.0, -1.0, 0.0)
    ok, margin = check_admissibility(p)
    assert ok
    assert margin == pytest.approx(math.exp(-1) * (1 - math.exp(-1)), rel=1e-12)


def test_stepwise_branches():
    u = UptakeModel(kind=UptakeKind.STEPWISE, R0=0.02, L1=60.0, L=100.0)
    assert u.rate(z=70.0) == 0.02
    assert u.rate(z=50.0) == 0.0
    # Heaviside takes the value 1 exactly at z = L1
    assert u.rate(z=60.0) == 0.02
    assert u.depth_integral() == pytest.approx(0.02 * 40.0, rel=1e-14)


def test_exponential_surface_value_and_integral():
    u = UptakeModel(kind=UptakeKind.EXPONENTIAL, R0=0.02, L1=60.0, L=100.0,
                    beta_r=0.04)
    assert u.rate(z=100.0) == pytest.approx(0.02, rel=1e-14)
    z = np.linspace(0.0, 100.0, 2_000_001)  # node at the root-zone edge
    trapz = np.trapezoid(u.rate(z=z), z)
    assert trapz == pytest.approx(u.depth_integral(), rel=1e-6)
    # without the root cutoff the integral extends to the water table
    u_nc = UptakeModel(kind=UptakeKind.EXPONENTIAL, R0=0.02, L=100.0,
                       beta_r=0.04, root_cutoff=False)
    assert u_nc.depth_integral() == pytest.approx(
        0.5 * (1 - math.exp(-4.0)), rel=1e-12)


def test_stepwise_integral_matches_trapezoid():
    u = UptakeModel(kind=UptakeKind.STEPWISE, R0=0.02, L1=60.0, L=100.0)
    z = np.linspace(0.0, 100.0, 2_000_001)  # node at exactly z=60
    trapz = np.trapezoid(u.rate(z=z), z)
    assert trapz == pytest.approx(u.depth_integral(), rel=1e-6)


def test_nonlinear_limits_and_value():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = plant(3.0, -0.0021, -3.31e-5)
    u = UptakeModel(kind=UptakeKind.NONLINEAR, params=p, theta_s=0.485)
    assert u.rate(theta_norm=0.0) == 0.0
    # direct evaluation at saturation; cross-check theta_s/t_s = alpha K_s
    assert 0.485 / T_S == pytest.approx(0.142 * 12.0, rel=1e-14)
    assert u.rate(theta_norm=1.0) == pytest.approx(1.19e-3, rel=2e-3)


@pytest.mark.parametrize("m,A,k", [(3.0, -0.0021, -3.31e-5),
                                   (5.0, -0.007, -3.18e-8)])
def test_nonlinear_monotone_nonnegative(m, A, k):
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = plant(m, A, k)
    u = UptakeModel(kind=UptakeKind.NONLINEAR, params=p, theta_s=0.485)
    Theta = np.linspace(0.0, 1.0, 1000)
    r = u.rate(theta_norm=Theta)
    assert r[0] == 0.0
    assert np.all(r >= 0.0)
    assert np.all(np.diff(r) >= 0.0)


def test_none_kind():
    u = UptakeModel()
    assert not u.depends_on_state
    assert np.all(u.rate(z=np.array([0.0, 50.0])) == 0.0)
    assert u.depth_integral() == 0.0


def test_validation_errors():
    with pytest.raises(DomainError):
        UptakeModel(kind=UptakeKind.STEPWISE, R0=0.02, L1=60.0)  # missing L
    with pytest.raises(DomainError):
        UptakeModel(kind=UptakeKind.STEPWISE, R0=0.02, L1=120.0, L=100.0)
    with pytest.raises(DomainError):
        UptakeModel(kind=UptakeKind.STEPWISE, R0=-0.1, L1=0.0, L=1.0)
    with pytest.raises(DomainError):
        UptakeModel(kind=UptakeKind.NONLINEAR, theta_s=0.4)
    u = UptakeModel(kind=UptakeKind.NONLINEAR, params=plant(5.0, -0.007, 0.0),
                    theta_s=0.485)
    with pytest.raises(DomainError):
        u.rate(theta_norm=1.5)
    with pytest.raises(DomainError):
        u.depth_integral()

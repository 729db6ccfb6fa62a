"""Meshless root-zone unsaturated-flow solver.

Localized radial-basis-function collocation for the Kirchhoff-transformed
unsaturated flow equation with plant root water-uptake sinks, in 1D columns,
2D furrow cross-sections, and axisymmetric (r, z) cylinders.
"""

from .hydraulics import Model2Params, SoilHydraulics, SoilModel
from .uptake import UptakeKind, UptakeModel, check_admissibility

__version__ = "0.1.0"

__all__ = [
    "Model2Params",
    "SoilHydraulics",
    "SoilModel",
    "UptakeKind",
    "UptakeModel",
    "check_admissibility",
    "__version__",
]

from .disc_source import DiscSource
from .evaporation import DryingColumn
from .furrow import FurrowSource
from .special import bessel_j0, bessel_j1, erfc, erfcx, polylog

__all__ = [
    "DiscSource",
    "DryingColumn",
    "FurrowSource",
    "bessel_j0",
    "bessel_j1",
    "erfc",
    "erfcx",
    "polylog",
]

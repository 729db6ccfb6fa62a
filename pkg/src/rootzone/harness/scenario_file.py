"""Scenario files: TOML with explicit unit suffixes on physical quantities.

A scenario file selects a built-in family and overrides its parameters::

    family = "test2"            # test1 | test2 | test3 | test4

    [parameters]                # builder arguments of the family
    alpha_case = 1
    uptake_kind = "exponential"
    surface = "constant"

    [numerics]                  # optional overrides
    dt = "0.005 h"
    t_end = "50 h"
    epsilon = 0.2               # 1/cm, dimensionless entries need no suffix
    n_s = 5
    nz = 1001

Dimensional values are strings "<number> <unit>"; accepted units are cm, m,
h, s, cm/h, m/s, 1/cm, 1/m, cm^2/h and they are converted to the internal
cm-hour system.  Bare numbers are accepted only for dimensionless entries.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..errors import ConfigurationError
from .scenario import SCENARIO_BUILDERS, Scenario

__all__ = ["load_scenario_file", "parse_quantity"]

_LENGTH = {"cm": 1.0, "m": 100.0}
_TIME = {"h": 1.0, "s": 1.0 / 3600.0}
_UNIT_FACTORS = {
    **_LENGTH,
    **_TIME,
    "cm/h": 1.0,
    "m/s": 100.0 * 3600.0,
    "m/h": 100.0,
    "1/cm": 1.0,
    "1/m": 1.0 / 100.0,
    "1/h": 1.0,
    "1/s": 3600.0,
    "cm^2/h": 1.0,
    "m^2/s": 1e4 * 3600.0,
    "-": 1.0,
}

#: unit dimension expected per numeric key (None: dimensionless)
_EXPECTED = {
    "dt": ("h", "s"),
    "t_end": ("h", "s"),
    "epsilon": None,       # 1/cm, but conventionally written bare
    "n_s": None,
    "nz": None, "nx": None, "nr": None,
    "tol_picard": None,
    "solver_tol": None,
    "beta_r": ("1/cm", "1/m"),
    "t_end_hours": ("h",),
}


def parse_quantity(value, allowed_units=None) -> float:
    """'3.9e-6 m/s' -> value in cm-hour units; bare numbers pass through."""
    if isinstance(value, (int, float)):
        if allowed_units:
            raise ConfigurationError(
                f"value {value!r} needs a unit suffix ({'/'.join(allowed_units)})"
            )
        return float(value)
    if not isinstance(value, str):
        raise ConfigurationError(f"cannot parse quantity {value!r}")
    parts = value.split()
    if len(parts) != 2:
        raise ConfigurationError(
            f"quantity {value!r} must look like '<number> <unit>'"
        )
    num, unit = parts
    if unit not in _UNIT_FACTORS:
        raise ConfigurationError(f"unknown unit {unit!r} in {value!r}")
    if allowed_units and unit not in allowed_units:
        raise ConfigurationError(
            f"unit {unit!r} not valid here; expected one of {allowed_units}"
        )
    try:
        return float(num) * _UNIT_FACTORS[unit]
    except ValueError as exc:
        raise ConfigurationError(f"bad number in {value!r}") from exc


def load_scenario_file(path: str) -> Scenario:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"scenario file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"scenario file {path} is not valid TOML: {exc}")

    family = doc.get("family")
    if family not in SCENARIO_BUILDERS:
        raise ConfigurationError(
            f"scenario file must set family to one of {sorted(SCENARIO_BUILDERS)}"
        )
    builder, _ = SCENARIO_BUILDERS[family]
    params = dict(doc.get("parameters", {}))
    if "beta_r" in params:
        params["beta_r"] = parse_quantity(params["beta_r"], _EXPECTED["beta_r"])
    try:
        scenario = builder(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {family}: {exc}")

    numerics = dict(doc.get("numerics", {}))
    overrides = {}
    for key, raw in numerics.items():
        if key not in _EXPECTED:
            raise ConfigurationError(f"unknown numerics key {key!r}")
        val = parse_quantity(raw, _EXPECTED[key])
        overrides[key] = int(val) if key in ("n_s", "nz", "nx", "nr") else val
    if overrides:
        scenario = scenario.with_overrides(**overrides)
    return scenario

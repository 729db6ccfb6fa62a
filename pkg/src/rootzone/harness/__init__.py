from .diagnostics import FluxProbe, nearest_node, rmse
from .report import write_report
from .runner import DiscreteProblem, RunReport, run_scenario
from .scenario import (
    BcKind,
    BoundaryCondition,
    Scenario,
    build_scenario_test1,
    build_scenario_test2,
    build_scenario_test3,
    build_scenario_test4,
    from_registry,
    registry_entries,
)
from .scenario_file import load_scenario_file

__all__ = [
    "BcKind",
    "BoundaryCondition",
    "DiscreteProblem",
    "FluxProbe",
    "RunReport",
    "Scenario",
    "build_scenario_test1",
    "build_scenario_test2",
    "build_scenario_test3",
    "build_scenario_test4",
    "from_registry",
    "load_scenario_file",
    "nearest_node",
    "registry_entries",
    "rmse",
    "run_scenario",
    "write_report",
]

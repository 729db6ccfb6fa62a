"""CSV serialization of run results.

Every file carries a header row and 17-significant-digit values so repeated
identical runs are byte-identical (no timestamps inside data files).
"""

from __future__ import annotations

import os

import numpy as np

from .runner import RunReport

__all__ = ["write_report", "format_value"]


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def _coord_columns(scenario, points: np.ndarray) -> list[tuple[str, np.ndarray]]:
    if points.shape[1] == 1:
        return [("z", points[:, 0])]
    first = "r" if scenario.axisymmetric else "x"
    return [(first, points[:, 0]), ("z", points[:, 1])]


def write_report(report: RunReport, out_dir: str) -> list[str]:
    """Write field snapshots, metrics, diagnostics, and the config echo."""
    os.makedirs(out_dir, exist_ok=True)
    prob = report.problem
    sc = prob.sc
    written = []

    for i in range(len(report.snapshots)):
        fields = report.fields_at(sc.soil, i)
        coords = _coord_columns(sc, prob.cloud.points)
        header = [name for name, _ in coords] + ["theta", "Theta", "h", "mu"]
        cols = [col for _, col in coords] + [fields["theta"], fields["Theta"],
                                             fields["h"], fields["mu"]]
        path = os.path.join(out_dir, f"fields_{i:03d}.csv")
        _write_csv(path, header, zip(*cols))
        written.append(path)

    if report.metrics:
        path = os.path.join(out_dir, "metrics.csv")
        _write_csv(path, ["time", "rmse"], report.metrics)
        written.append(path)

    if report.diagnostics:
        path = os.path.join(out_dir, "diagnostics.csv")
        _write_csv(path, list(report.diagnostic_columns), report.diagnostics)
        written.append(path)

    path = os.path.join(out_dir, "config.txt")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, val in report.config.items():
            fh.write(f"{key} = {val}\n")
        fh.write(f"config_hash = {report.config_hash}\n")
    written.append(path)
    return written

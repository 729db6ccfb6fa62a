"""Command-line interface.

    rootzone run --scenario test1 --case 1 --out results/
    rootzone run --scenario-file furrow.toml --out results/
    rootzone list-scenarios
    rootzone verify-oracles

Exit codes: 0 success, 2 usage error, 3 scenario/configuration error,
4 solver non-convergence.

``LRBF_THREADS`` caps the worker threads of the numerical backends; it must
be honored before the numerical stack loads, so the heavy imports live inside
the command handlers.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCENARIO = 3
EXIT_SOLVER = 4


def _apply_thread_cap() -> None:
    cap = os.environ.get("LRBF_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rootzone",
        description="Meshless root-zone unsaturated-flow solver",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a built-in or file-defined scenario")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="built-in family: test1..test4")
    src.add_argument("--scenario-file", help="TOML scenario file")
    run.add_argument("--case", type=int, help="test1 case (1-3)")
    run.add_argument("--plant", type=int, help="test3/test4 plant (1-2)")
    run.add_argument("--alpha-case", type=int, dest="alpha_case",
                     help="test2 soil case (1-2)")
    run.add_argument("--uptake", help="test2 uptake kind "
                     "(stepwise|exponential|none)")
    run.add_argument("--surface", help="test2 surface flux (constant|transient)")
    run.add_argument("--r0-star", type=float, dest="r0_star",
                     help="test4 source radius ratio (0.2|0.5)")
    run.add_argument("--out", default="rootzone-out", help="output directory")
    run.add_argument("--dt", type=float, help="time step [h]")
    run.add_argument("--t-end", type=float, dest="t_end", help="final time [h]")
    run.add_argument("--eps", type=float, help="kernel shape parameter [1/cm]")
    run.add_argument("--ns", type=int, help="stencil size")
    run.add_argument("--nodes", help="node counts, e.g. nz=200 or nx=500,nz=1000")
    run.add_argument("--tol", type=float, help="Picard tolerance")
    run.add_argument("--quiet", action="store_true", help="warnings only")

    sub.add_parser("list-scenarios", help="print the built-in registry")
    ver = sub.add_parser("verify-oracles",
                         help="run the reference-solution self-checks")
    ver.add_argument("--quiet", action="store_true")
    return p


def _scenario_from_args(args):
    from .errors import ConfigurationError
    from .harness import from_registry, load_scenario_file

    if args.scenario_file:
        return load_scenario_file(args.scenario_file)
    family = args.scenario
    kw = {}
    if family == "test1":
        kw["case"] = args.case if args.case is not None else 1
    elif family == "test2":
        kw["alpha_case"] = args.alpha_case if args.alpha_case is not None else 1
        if args.uptake:
            kw["uptake_kind"] = args.uptake
        if args.surface:
            kw["surface"] = args.surface
    elif family in ("test3", "test4"):
        kw["plant"] = args.plant if args.plant is not None else 1
        if family == "test4" and args.r0_star is not None:
            kw["r0_star"] = args.r0_star
    else:
        raise ConfigurationError(f"unknown scenario {family!r}")
    return from_registry(family, **kw)


def _overrides_from_args(args) -> dict:
    from .errors import ConfigurationError

    out = {}
    if args.dt is not None:
        out["dt"] = args.dt
    if args.t_end is not None:
        out["t_end"] = args.t_end
        out["output_times"] = (args.t_end,)
    if args.eps is not None:
        out["epsilon"] = args.eps
    if args.ns is not None:
        out["n_s"] = args.ns
    if args.tol is not None:
        out["tol_picard"] = args.tol
    if args.nodes:
        for item in args.nodes.split(","):
            key, _, val = item.partition("=")
            if key not in ("nz", "nx", "nr") or not val.isdigit():
                raise ConfigurationError(
                    f"--nodes expects nz=<n>[,nx=<n>|,nr=<n>], got {args.nodes!r}"
                )
            out[key] = int(val)
    return out


def _cmd_run(args) -> int:
    from .errors import NonConvergenceError, RootzoneError, SolverError
    from .harness import run_scenario, write_report

    try:
        scenario = _scenario_from_args(args)
        overrides = _overrides_from_args(args)
        if overrides:
            scenario = scenario.with_overrides(**overrides)
        report = run_scenario(scenario)
        files = write_report(report, args.out)
    except (NonConvergenceError, SolverError) as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except RootzoneError as exc:
        print(f"error: scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    for f in files:
        print(f)
    if report.metrics:
        for t, r in report.metrics:
            print(f"rmse t={t:g}: {r:.6e}")
    return EXIT_OK


def _cmd_list() -> int:
    from .harness import registry_entries

    for name, desc in registry_entries():
        print(f"{name:32s} {desc}")
    return EXIT_OK


def _cmd_verify() -> int:
    from .verify import oracle_self_checks

    ok = True
    for name, passed, detail in oracle_self_checks():
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else 1


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list-scenarios":
        return _cmd_list()
    return _cmd_verify()


if __name__ == "__main__":
    sys.exit(main())

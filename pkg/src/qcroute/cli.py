"""Command-line front end: validate, qubo, solve, sweep, report.

Exit codes: 0 success, 2 usage or validation problem, 3 I/O failure.  An
infeasible solver outcome is data, not an error, and exits 0.  Progress and
informational notes go to stderr; stdout stays machine-parseable.

The instance path argument also accepts the bundled layout names
``layout-1`` and ``layout-2`` directly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .instance import Instance, bundled_layouts, parse_instance
from .metrics import (
    build_report,
    plot_tables,
    records_from_csv,
    records_to_csv,
    run_sweep,
    summary_table,
)
from .oracle import brute_force_min, shortest_path_opt
from .qubo import (
    build_cable_qubo,
    default_penalties,
    ising_document,
    qubo_document,
    scale_penalties,
)
from .vqe import VqeConfig, cable_subseed, vqe_solve

__all__ = ["main", "main_entry"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

_JOBS_ENV = "QCROUTE_JOBS"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load_instance(path: str) -> Instance:
    for layout in bundled_layouts():
        if layout.name == path:
            return layout
    with open(path, encoding="utf-8") as handle:
        return parse_instance(handle.read())


def _solver_config(args, seed: int | None = None) -> VqeConfig:
    return VqeConfig(
        shots=args.shots,
        reps=args.reps,
        maxiter=args.maxiter,
        seed=args.seed if seed is None else seed,
    )


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--shots", type=int, default=1000, help="measurement shots (0 = exact)")
    parser.add_argument("--reps", type=int, default=1, help="ansatz repetition depth")
    parser.add_argument("--maxiter", type=int, default=100, help="objective evaluation budget")


def cmd_validate(args) -> int:
    instance = _load_instance(args.path)
    qubits = instance.block_dim(instance.cables[0])
    print(
        f"cables={instance.num_cables} segments={instance.num_segments} "
        f"nodes={instance.num_nodes} qubits_per_cable={qubits}"
    )
    return EXIT_OK


def cmd_qubo(args) -> int:
    instance = _load_instance(args.path)
    cable = instance.cable(args.cable)
    penalties = scale_penalties(default_penalties(instance, cable), args.kappa)
    block = build_cable_qubo(instance, cable, penalties)
    document = ising_document(block) if args.ising else qubo_document(block)
    text = json.dumps(document, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    eta = ",".join(_fmt(e) for e in penalties.as_vector())
    print(
        f"cable={cable.id} dim={block.dim} offset={_fmt(block.offset)} "
        f"eta=({eta}) kappa={_fmt(penalties.kappa)}",
        file=sys.stderr,
    )
    return EXIT_OK


def _result_line(cable_id: str, feasible: bool, route, objective, energy: float) -> str:
    route_text = "-".join(route) if route else "-"
    objective_text = "-" if objective is None else _fmt(objective)
    return (
        f"cable={cable_id} feasible={'true' if feasible else 'false'} "
        f"route={route_text} objective={objective_text} energy={_fmt(energy)}"
    )


def cmd_solve(args) -> int:
    instance = _load_instance(args.path)
    if args.cable:
        wanted = {instance.cable(args.cable).id}
    else:
        wanted = {c.id for c in instance.cables}

    lines = []
    total_energy = 0.0
    all_feasible = True
    for index, cable in enumerate(instance.cables):
        if cable.id not in wanted:
            continue
        if args.method == "dijkstra":
            solution = shortest_path_opt(instance, cable)
            lines.append(_result_line(cable.id, True, solution.route, solution.objective, solution.energy))
            total_energy += solution.energy
            continue
        penalties = scale_penalties(default_penalties(instance, cable), args.kappa)
        block = build_cable_qubo(instance, cable, penalties)
        if args.method == "brute":
            solution = brute_force_min(block, instance)
            feasible = bool(solution.route)
            objective = solution.objective if feasible else None
            lines.append(_result_line(cable.id, feasible, solution.route, objective, solution.energy))
            total_energy += solution.energy
            all_feasible = all_feasible and feasible
        else:
            config = _solver_config(args, seed=cable_subseed(args.seed, index))
            result = vqe_solve(block, config, instance)
            route = result.feasibility.decoded_route or ()
            lines.append(
                _result_line(cable.id, result.feasibility.feasible_path, route, result.objective, result.energy)
            )
            total_energy += result.energy
            all_feasible = all_feasible and result.feasibility.feasible_path

    for line in lines:
        print(line)
    if not args.cable:
        print(f"total_energy={_fmt(total_energy)} all_feasible={'true' if all_feasible else 'false'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    instance = _load_instance(args.path)
    kappas = [float(k) for k in args.kappas.split(",") if k]
    config = _solver_config(args)

    def progress(kappa: float, seed: int) -> None:
        print(f"sweep kappa={_fmt(kappa)} seed={seed} done", file=sys.stderr)

    report = run_sweep(instance, kappas, args.seeds, config, jobs=args.jobs, progress=progress)
    with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(records_to_csv(report.records))
    sys.stdout.write(summary_table(report))
    return EXIT_OK


def cmd_report(args) -> int:
    with open(args.path, encoding="utf-8") as handle:
        records = records_from_csv(handle.read())
    if not records:
        raise ValueError("results CSV has no data rows")
    layouts: dict[str, list] = {}
    for record in records:
        layouts.setdefault(record.layout, []).append(record)
    for layout_records in layouts.values():
        report = build_report(layout_records)
        sys.stdout.write(summary_table(report))
        sys.stdout.write("\n")
        sys.stdout.write(plot_tables(report))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcroute",
        description="Compile cable-routing instances to per-cable QUBOs and solve them "
        "with a sampling VQE, classical brute force, or shortest paths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check an instance document")
    p_validate.add_argument("path", help="instance file or bundled layout name")
    p_validate.set_defaults(fn=cmd_validate)

    p_qubo = sub.add_parser("qubo", help="export one cable block")
    p_qubo.add_argument("path")
    p_qubo.add_argument("--cable", required=True, help="cable id")
    p_qubo.add_argument("--kappa", type=float, default=1.0)
    p_qubo.add_argument("--ising", action="store_true", help="export the spin form")
    p_qubo.add_argument("--out", help="write the document here instead of stdout")
    p_qubo.set_defaults(fn=cmd_qubo)

    p_solve = sub.add_parser("solve", help="route cables")
    p_solve.add_argument("path")
    p_solve.add_argument("--cable", help="solve a single cable block")
    p_solve.add_argument("--method", choices=("vqe", "brute", "dijkstra"), default="vqe")
    p_solve.add_argument("--kappa", type=float, default=1.0, help="penalty scaling factor")
    _add_solver_flags(p_solve)
    p_solve.set_defaults(fn=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run the (kappa x seed) benchmark grid")
    p_sweep.add_argument("path")
    p_sweep.add_argument("--kappas", default="0.25,0.5,1,2,4", help="comma-separated scales")
    p_sweep.add_argument("--seeds", type=int, default=30, help="number of seeds")
    p_sweep.add_argument("--out", default="results.csv", help="results CSV path")
    p_sweep.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get(_JOBS_ENV, "1")),
        help=f"parallel worker processes (env {_JOBS_ENV})",
    )
    _add_solver_flags(p_sweep)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_report = sub.add_parser("report", help="recompute tables from a results CSV")
    p_report.add_argument("path")
    p_report.set_defaults(fn=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ValueError as exc:  # InstanceError included: validation and usage
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry() -> None:
    raise SystemExit(main())

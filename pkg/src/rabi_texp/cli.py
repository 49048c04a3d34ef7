"""Command-line front end: single-point estimates, branch-tracked sweeps,
and one-command reproduction of the benchmark tables and figure data.

Output is CSV (sweeps, tables, figures) or JSON (single estimates), always
with 12 significant digits and LF line endings so fixtures diff cleanly.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import NoMinimumFound, NoPhysicalSolution
from .exact import exact_levels, parity_resolve
from .extrapolation import Method
from .model import RabiParams, TrialKind
from .optimize import (
    BranchTrace,
    ContinuationSettings,
    continue_branch,
    estimate_energy,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NO_SOLUTION = 2
EXIT_ORACLE = 3

DEFAULT_OMEGA_LIST = (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0)

_CONFIG_TYPES = {
    "omega0": float,
    "omega": float,
    "g": float,
    "g_start": float,
    "g_stop": float,
    "g_count": int,
    "order": int,
    "jobs": int,
    "oracle_tol": float,
    "kind": str,
    "method": str,
    "out": str,
    "target": str,
    "blind_arms": lambda s: s.lower() in ("1", "true", "yes"),
}


def _fmt(value) -> str:
    return f"{value:.12g}"


def _oracle(params: RabiParams, kind: TrialKind, tol: float) -> tuple[float, bool]:
    """Reference energy for the given trial family: the ground level for the
    non-symmetrized and positive-parity families, the lowest negative-parity
    level for the negative-parity family."""
    if kind is TrialKind.NEG_PARITY:
        spectrum = exact_levels(params, n_levels=4, tol=tol)
        labels = parity_resolve(params, spectrum)
        negatives = np.flatnonzero(labels < 0)
        value = float(spectrum.levels[negatives[0]])
    else:
        spectrum = exact_levels(params, n_levels=1, tol=tol)
        value = float(spectrum.levels[0])
    return value, spectrum.converged


def _oracle_task(args) -> tuple[float, bool]:
    omega0, omega, g, kind_value, tol = args
    return _oracle(RabiParams(omega0, omega, g), TrialKind(kind_value), tol)


def _oracle_column(
    base: RabiParams, kind: TrialKind, g_grid, tol: float, jobs: int
) -> list[tuple[float, bool]]:
    tasks = [(base.omega0, base.omega, float(g), kind.value, tol) for g in g_grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_oracle_task, tasks))
    return [_oracle_task(t) for t in tasks]


def _rel_error(energy: float, exact: float) -> float:
    return abs(energy - exact) / abs(exact)


def _write_csv(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            converter = _CONFIG_TYPES.get(key)
            if converter is None:
                raise SystemExit(f"config: unknown key {key!r}")
            values[key] = converter(value.strip())
    return values


def cmd_estimate(args) -> int:
    params = RabiParams(args.omega0, args.omega, args.g)
    kind = TrialKind(args.kind)
    method = Method(args.method)
    try:
        estimate, point = estimate_energy(params, kind, method, args.order)
    except (NoPhysicalSolution, NoMinimumFound) as exc:
        print(f"estimate: optimization failed: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    oracle, converged = _oracle(params, kind, args.oracle_tol)
    record = {
        "method": estimate.method.value,
        "order": estimate.order,
        "energy": float(_fmt(estimate.value)),
        "x_opt": float(_fmt(point.x)),
        "y_opt": float(_fmt(point.y)),
        "grad_norm": float(f"{point.grad_norm:.3g}"),
        "oracle": float(_fmt(oracle)),
        "rel_error": float(f"{_rel_error(estimate.value, oracle):.6g}"),
    }
    text = json.dumps(record, indent=2)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    if not converged:
        print("estimate: oracle diagonalization did not converge", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


def _trace_rows(
    trace: BranchTrace,
    label: str,
    method: Method,
    order: int,
    oracle: list[tuple[float, bool]],
) -> list[list[str]]:
    rows = []
    for i, g in enumerate(trace.g_grid):
        point = trace.points[i]
        exact, _ = oracle[i]
        if point is None:
            rows.append(
                [_fmt(g), "", "", "", label, method.value, str(order), _fmt(exact), ""]
            )
        else:
            rows.append(
                [
                    _fmt(g),
                    _fmt(point.x),
                    _fmt(point.y),
                    _fmt(point.energy),
                    label,
                    method.value,
                    str(order),
                    _fmt(exact),
                    _fmt(_rel_error(point.energy, exact)),
                ]
            )
    return rows


def cmd_sweep(args) -> int:
    params = RabiParams(args.omega0, args.omega, args.g_start)
    kind = TrialKind(args.kind)
    method = Method(args.method)
    if args.g_count < 2:
        print("sweep: need at least two grid points", file=sys.stderr)
        return EXIT_FAILURE
    g_grid = np.linspace(args.g_start, args.g_stop, args.g_count)
    settings = ContinuationSettings(exhaustive=args.blind_arms)
    status = EXIT_OK
    try:
        trace = continue_branch(params, kind, method, args.order, g_grid, settings)
    except (NoPhysicalSolution, NoMinimumFound) as exc:
        print(f"sweep: continuation failed: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    oracle = _oracle_column(params, kind, g_grid, args.oracle_tol, args.jobs)
    if not all(ok for _, ok in oracle):
        print("sweep: oracle diagonalization did not converge", file=sys.stderr)
        status = EXIT_ORACLE
    header = [
        "g", "x_opt", "y_opt", "energy", "branch_label",
        "method", "order", "exact", "rel_error",
    ]
    rows = _trace_rows(trace, trace.label.value, method, args.order, oracle)
    for arm in trace.blind_arms:
        for i, point in enumerate(arm.points):
            if point is None:
                continue
            exact, _ = oracle[i]
            rows.append(
                [
                    _fmt(arm.g_grid[i]),
                    _fmt(point.x),
                    _fmt(point.y),
                    _fmt(point.energy),
                    arm.label.value,
                    method.value,
                    str(args.order),
                    _fmt(exact),
                    _fmt(_rel_error(point.energy, exact)),
                ]
            )
    _write_csv(args.out, header, rows)
    return status


def _reproduce_table1(args) -> tuple[list[str], list[list[str]]]:
    g = 5.0
    columns = {}
    for omega in (1.0, 2.0):
        params = RabiParams(1.0, omega, g)
        e0_var, _ = estimate_energy(params, TrialKind.NONSYM, Method.VARIATIONAL, 1)
        e0_six, _ = estimate_energy(params, TrialKind.NONSYM, Method.CSM, 6)
        e0_exact, _ = _oracle(params, TrialKind.NONSYM, args.oracle_tol)
        e1_var, _ = estimate_energy(params, TrialKind.NEG_PARITY, Method.VARIATIONAL, 1)
        e1_six, _ = estimate_energy(params, TrialKind.NEG_PARITY, Method.CSM, 6)
        columns[omega] = [
            e0_var.value, e0_six.value, e0_exact, e1_var.value, e1_six.value,
        ]
    names = ["E0_var", "E0_csm6", "E0_exact", "E1_var_nparity", "E1_csm6_nparity"]
    rows = [
        [name, _fmt(columns[1.0][i]), _fmt(columns[2.0][i])]
        for i, name in enumerate(names)
    ]
    return ["quantity", "omega_1", "omega_2"], rows


def _reproduce_table2(args) -> tuple[list[str], list[list[str]]]:
    params = RabiParams(1.0, 1.0, 0.2)
    kind = TrialKind.NEG_PARITY
    exact, _ = _oracle(params, kind, args.oracle_tol)
    entries = [
        ("E1_var_nparity", estimate_energy(params, kind, Method.VARIATIONAL, 1)[0]),
        ("E1_cmx5_nparity", estimate_energy(params, kind, Method.CMX, 5)[0]),
        ("E1_csm6_nparity", estimate_energy(params, kind, Method.CSM, 6)[0]),
    ]
    rows = [
        [name, _fmt(est.value), _fmt(_rel_error(est.value, exact))]
        for name, est in entries
    ]
    rows.append(["E1_exact", _fmt(exact), "0"])
    return ["quantity", "estimate", "rel_error"], rows


def _reproduce_fig3(args) -> tuple[list[str], list[list[str]]]:
    params = RabiParams(1.0, 1.0, 1.0)
    kind = TrialKind.POS_PARITY
    exact, _ = _oracle(params, kind, args.oracle_tol)
    rows = []
    for method, orders in ((Method.CSM, (1, 3, 4, 5, 6)), (Method.CMX, (1, 3, 5))):
        for order in orders:
            est, _ = estimate_energy(params, kind, method, order)
            rows.append(
                [
                    method.value,
                    str(order),
                    _fmt(est.value),
                    _fmt(_rel_error(est.value, exact)),
                ]
            )
    rows.append(["exact", "", _fmt(exact), "0"])
    return ["method", "order", "energy", "rel_error"], rows


def _reproduce_fig4(args) -> tuple[list[str], list[list[str]]]:
    g_grid = np.linspace(0.0, 1.0, args.g_count)
    header = ["omega", "g", "x_opt", "y_opt", "energy", "exact", "rel_error"]
    rows = []
    for omega in args.omega_list:
        base = RabiParams(1.0, omega, 0.0)
        trace = continue_branch(base, TrialKind.POS_PARITY, Method.CSM, 6, g_grid)
        oracle = _oracle_column(
            base, TrialKind.POS_PARITY, g_grid, args.oracle_tol, args.jobs
        )
        for i, g in enumerate(g_grid):
            point = trace.points[i]
            exact, _ = oracle[i]
            if point is None:
                rows.append([_fmt(omega), _fmt(g), "", "", "", _fmt(exact), ""])
            else:
                rows.append(
                    [
                        _fmt(omega), _fmt(g), _fmt(point.x), _fmt(point.y),
                        _fmt(point.energy), _fmt(exact),
                        _fmt(_rel_error(point.energy, exact)),
                    ]
                )
    return header, rows


def _reproduce_fig5(args) -> tuple[list[str], list[list[str]]]:
    g_grid = np.linspace(0.0, 1.0, args.g_count)
    base = RabiParams(1.0, 1.0, 0.0)
    ground = continue_branch(base, TrialKind.POS_PARITY, Method.CSM, 6, g_grid)
    excited = continue_branch(base, TrialKind.NEG_PARITY, Method.CSM, 6, g_grid)
    oracle_e0 = _oracle_column(base, TrialKind.POS_PARITY, g_grid, args.oracle_tol, args.jobs)
    oracle_e1 = _oracle_column(base, TrialKind.NEG_PARITY, g_grid, args.oracle_tol, args.jobs)
    header = ["g", "e0", "e0_exact", "e0_rel_error", "e1", "e1_exact", "e1_rel_error"]
    rows = []
    for i, g in enumerate(g_grid):
        row = [_fmt(g)]
        for trace, (exact, _) in ((ground, oracle_e0[i]), (excited, oracle_e1[i])):
            point = trace.points[i]
            if point is None:
                row += ["", _fmt(exact), ""]
            else:
                row += [
                    _fmt(point.energy),
                    _fmt(exact),
                    _fmt(_rel_error(point.energy, exact)),
                ]
        rows.append(row)
    return header, rows


def cmd_reproduce(args) -> int:
    builders = {
        "table1": _reproduce_table1,
        "table2": _reproduce_table2,
        "fig3": _reproduce_fig3,
        "fig4": _reproduce_fig4,
        "fig5": _reproduce_fig5,
    }
    try:
        header, rows = builders[args.target](args)
    except (NoPhysicalSolution, NoMinimumFound) as exc:
        print(f"reproduce: optimization failed: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    _write_csv(args.out, header, rows)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabi-texp",
        description="t-expansion (CMX/CSM) energy estimates for the Rabi model",
    )
    parser.add_argument("--config", help="key=value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--omega0", type=float, default=1.0)
        p.add_argument("--omega", type=float, required=True)
        p.add_argument("--kind", choices=[k.value for k in TrialKind],
                       default=TrialKind.NONSYM.value)
        p.add_argument("--method", choices=[m.value for m in Method],
                       default=Method.CSM.value)
        p.add_argument("--order", type=int, default=6)
        p.add_argument("--oracle-tol", type=float, default=1e-10)
        p.add_argument("--out", help="output path (default: stdout)")

    p_est = sub.add_parser("estimate", help="single-point energy estimate")
    common(p_est)
    p_est.add_argument("--g", type=float, required=True)
    p_est.set_defaults(func=cmd_estimate)

    p_sweep = sub.add_parser("sweep", help="branch-tracked sweep over g")
    common(p_sweep)
    p_sweep.add_argument("--g-start", type=float, default=0.0)
    p_sweep.add_argument("--g-stop", type=float, required=True)
    p_sweep.add_argument("--g-count", type=int, default=101)
    p_sweep.add_argument("--blind-arms", action="store_true",
                         help="scan every grid point and emit blind arms")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="parallel workers for the oracle column")
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("reproduce", help="benchmark tables / figure data")
    p_rep.add_argument("target", choices=["table1", "table2", "fig3", "fig4", "fig5"])
    p_rep.add_argument("--omega-list", type=float, nargs="+",
                       default=list(DEFAULT_OMEGA_LIST),
                       help="boson energies for fig4")
    p_rep.add_argument("--g-count", type=int, default=101)
    p_rep.add_argument("--oracle-tol", type=float, default=1e-10)
    p_rep.add_argument("--jobs", type=int, default=1)
    p_rep.add_argument("--out", help="output path (default: stdout)")
    p_rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args, _ = parser.parse_known_args(argv)
    if args.config:
        parser.set_defaults(**_load_config(args.config))
        args = parser.parse_args(argv)
    else:
        args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

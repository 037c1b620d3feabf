"""Command-line front end.

Subcommands: gate, sweep, trace, solve, two-qudit.  Configuration comes
from JSON files plus flags, with flags taking precedence; every command
is deterministic given its configuration.  Exit codes: 0 success,
1 numerical failure, 2 usage error.

Report-style commands (sweep, trace) render a matplotlib figure next to
the delimited output unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .evolution import DEFAULT_CONFIG, IntegrationError, IntegratorConfig
from .gates import (
    GateProgram,
    NAMED_GATE_LABELS,
    compose,
    find_parameters,
    min_loops,
    named_gate,
    simulated_gate,
)
from .levels import gate_distance
from .robustness import SweepSpec, population_trace, run_sweep
from .serialize import (
    matrix_to_json_dict,
    read_json,
    read_matrix_json,
    read_program_json,
    write_json,
)
from .twoqudit import (
    LaserConfig,
    TwoQuditSpace,
    conditional_gate,
    conditional_target,
    laser_to_couplings,
)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return read_json(path)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def _resolve(flag_value, config: dict, key: str, default):
    """Flag beats config file beats built-in default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _integrator_config(rtol: float | None, config: dict) -> IntegratorConfig:
    rtol = _resolve(rtol, config, "rel_tol", DEFAULT_CONFIG.rel_tol)
    return IntegratorConfig(rel_tol=float(rtol), abs_tol=float(rtol) * 1e-2)


def _threads(args, config: dict) -> int:
    env = os.environ.get("DARKPATH_THREADS")
    fallback = int(env) if env else 1
    return int(_resolve(args.threads, config, "threads", fallback))


def _load_program(args, config: dict) -> GateProgram:
    name = _resolve(getattr(args, "name", None), config, "name", None)
    program_path = _resolve(getattr(args, "program", None), config, "program", None)
    if (name is None) == (program_path is None):
        raise UsageError("specify exactly one of --name or --program")
    if name is not None:
        if name not in NAMED_GATE_LABELS:
            raise UsageError(
                f"unknown gate {name!r}; valid names: {', '.join(NAMED_GATE_LABELS)}"
            )
        eta = getattr(args, "eta", None)
        _, program = named_gate(name, eta=eta if eta is not None else 4.0)
        return program
    try:
        program = read_program_json(program_path)
    except FileNotFoundError:
        raise UsageError(f"program file not found: {program_path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{program_path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed program file {program_path}: {exc}")
    eta = getattr(args, "eta", None)
    return program.with_eta(eta) if eta is not None else program


def _parse_state(text: str, d: int) -> np.ndarray:
    text = text.strip()
    if text.startswith("uniform"):
        n = int(text[len("uniform") :] or d)
        if n != d:
            raise UsageError(f"uniform state dimension {n} does not match gate dimension {d}")
        return np.ones(d, dtype=complex) / np.sqrt(d)
    try:
        parts = [complex(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"could not parse state {text!r}")
    if len(parts) == 0:
        raise UsageError("state specification is empty")
    if len(parts) != d:
        raise UsageError(f"state has {len(parts)} components, gate needs {d}")
    vec = np.array(parts)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise UsageError("state has zero norm")
    return vec / norm


def _print_matrix(label: str, matrix: np.ndarray) -> None:
    print(f"{label}:")
    print(np.array2string(matrix, precision=4, suppress_small=True))


def _matrix_csv_rows(matrices: dict[str, np.ndarray]):
    names = list(matrices)
    header = ["row", "col"]
    for name in names:
        header += [f"{name}_re", f"{name}_im"]
    first = next(iter(matrices.values()))
    rows = [header]
    for i in range(first.shape[0]):
        for j in range(first.shape[1]):
            row = [i, j]
            for name in names:
                z = matrices[name][i, j]
                row += [f"{z.real:.12g}", f"{z.imag:.12g}"]
            rows.append(row)
    return rows


def _write_matrices(path: str, fmt: str, matrices: dict[str, np.ndarray], extra: dict) -> None:
    if fmt == "json":
        doc = {name: matrix_to_json_dict(m) for name, m in matrices.items()}
        doc.update(extra)
        write_json(path, doc)
    else:
        import csv as _csv

        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh)
            for row in _matrix_csv_rows(matrices):
                writer.writerow(row)


def _maybe_plot(args, out_path: str | None, render) -> None:
    if getattr(args, "no_plot", False) or out_path is None:
        return
    fig_path = Path(out_path).with_suffix(".png")
    render(fig_path)
    print(f"figure written to {fig_path}")


def cmd_gate(args) -> int:
    config = _load_config(args.config)
    program = _load_program(args, config)
    cfg = _integrator_config(args.rtol, config)
    analytic = compose(program)
    simulated = simulated_gate(program, cfg=cfg)
    distance = gate_distance(simulated, analytic)
    _print_matrix("analytic gate", analytic)
    _print_matrix("simulated gate", simulated)
    print(f"gate_distance(simulated, analytic) = {distance:.3e}")
    if args.out:
        _write_matrices(
            args.out,
            args.format,
            {"analytic": analytic, "simulated": simulated},
            {"distance": distance, "label": program.label},
        )
        print(f"output written to {args.out}")
    return EXIT_OK


def _sweep_spec_from(args, config: dict) -> SweepSpec:
    gates = tuple(_resolve(args.gates, config, "gates", ("T3", "X3", "H3", "Z3")))
    samples = int(_resolve(args.samples, config, "samples", 500))
    seed = int(_resolve(args.seed, config, "seed", 0))
    etas = tuple(float(e) for e in _resolve(args.etas, config, "etas", (0.0, 4.0)))
    if "deltas" in config and args.grid is None:
        deltas = np.asarray(config["deltas"], dtype=float)
    else:
        half_width = float(_resolve(args.grid, config, "delta_half_width", 0.1))
        points = int(_resolve(args.points, config, "delta_points", 21))
        deltas = (
            np.array([0.0])
            if half_width == 0.0
            else np.linspace(-half_width, half_width, points)
        )
    programs = None
    if "programs" in config:
        programs = {
            label: GateProgram.from_json_dict(doc) for label, doc in config["programs"].items()
        }
    return SweepSpec(
        gates=gates,
        programs=programs,
        deltas=deltas,
        etas=etas,
        samples=samples,
        seed=seed,
        cfg=_integrator_config(args.rtol, config),
    )


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    spec = _sweep_spec_from(args, config)
    result = run_sweep(spec, threads=_threads(args, config))

    print(f"{'gate':<6} {'eta':>5} {'delta range':>16} {'min mean':>10} {'mean@0':>10}")
    for gate in result.gates():
        for eta in result.etas():
            deltas, means = result.curve(gate, eta)
            at_zero = means[np.argmin(np.abs(deltas))]
            print(
                f"{gate:<6} {eta:>5g} [{deltas.min():>6.3f}, {deltas.max():>6.3f}] "
                f"{means.min():>10.6f} {at_zero:>10.6f}"
            )
    if args.out:
        if args.format == "json":
            write_json(args.out, result.to_json_dict())
        else:
            result.to_csv(args.out)
        print(f"{len(result)} rows written to {args.out}")

        def render(fig_path):
            from .plots import plot_sweep

            plot_sweep(result, fig_path, title="Rabi-error robustness")

        _maybe_plot(args, args.out, render)
    return EXIT_OK


def cmd_trace(args) -> int:
    config = _load_config(args.config)
    program = _load_program(args, config)
    cfg = _integrator_config(args.rtol, config)
    state = _parse_state(_resolve(args.state, config, "state", f"uniform{program.d}"), program.d)
    traj = population_trace(
        program,
        state,
        cfg=cfg,
        delta=float(_resolve(args.delta, config, "delta", 0.0)),
        n_points=int(_resolve(args.points, config, "points", 400)),
    )
    final_comp = traj.population_computational[-1]
    print(
        f"traced {program.label or 'program'} over {program.n_loops} loop(s); "
        f"final computational population {final_comp:.6f}"
    )
    if args.out:
        if args.format == "json":
            from .serialize import trajectory_columns

            header, table = trajectory_columns(traj)
            write_json(args.out, {name: table[:, i].tolist() for i, name in enumerate(header)})
        else:
            traj.to_csv(args.out)
        print(f"{len(traj.times)} samples written to {args.out}")

        def render(fig_path):
            from .plots import plot_trajectory

            plot_trajectory(traj, fig_path, title=program.label)

        _maybe_plot(args, args.out, render)
    return EXIT_OK


def cmd_solve(args) -> int:
    config = _load_config(args.config)
    target_path = _resolve(args.target, config, "target", None)
    if target_path is None:
        raise UsageError("solve requires --target pointing to a JSON matrix file")
    try:
        target = read_matrix_json(target_path)
    except FileNotFoundError:
        raise UsageError(f"target file not found: {target_path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{target_path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    if target.ndim != 2 or target.shape[0] != target.shape[1]:
        raise UsageError(f"target must be a square matrix, got shape {target.shape}")

    d = target.shape[0]
    loops = int(_resolve(args.loops, config, "loops", min_loops(d)))
    tol = float(_resolve(args.tol, config, "tol", 1e-6))
    seed = int(_resolve(args.seed, config, "seed", 0))
    restarts = int(_resolve(args.restarts, config, "restarts", 50))

    result = find_parameters(target, n_loops=loops, tol=tol, seed=seed, restarts=restarts)
    status = "reached" if result.success else "NOT reached"
    print(
        f"search over {loops} loop(s): distance {result.distance:.3e} "
        f"({status} tol {tol:g} after {result.restarts_used} start(s))"
    )
    if args.out:
        doc = result.program.to_json_dict()
        doc["distance"] = result.distance
        doc["success"] = result.success
        write_json(args.out, doc)
        print(f"program written to {args.out}")
    return EXIT_OK if result.success else EXIT_NUMERICAL


def cmd_two_qudit(args) -> int:
    config = _load_config(args.config)
    program = _load_program(args, config)
    cfg = _integrator_config(args.rtol, config)

    laser_path = _resolve(args.laser, config, "laser", None)
    if laser_path is not None:
        try:
            laser = LaserConfig.from_json_dict(read_json(laser_path))
        except FileNotFoundError:
            raise UsageError(f"laser config not found: {laser_path}")
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed laser config {laser_path}: {exc}")
        if laser.d != program.d:
            raise UsageError(
                f"laser config is for d={laser.d} but the program has d={program.d}"
            )
        omega, omega_aux = laser_to_couplings(laser)
        print(f"laser drives: {laser.drive_count} (control + {laser.n_target_drives} target + auxiliary)")
        print(f"coupling prefactor kappa = {laser.eta_L**2 * laser.nu / (laser.Delta**2 - laser.nu**2):.6g}")
        _print_matrix("effective couplings omega_{k,l}", omega)
        print(f"auxiliary coupling Omega_a = {omega_aux:.6g}")

    gate = conditional_gate(program, cfg=cfg)
    target = conditional_target(program)
    d = program.d
    space = TwoQuditSpace(d)

    control_block = slice((d - 1) * d, d * d)  # control in |d>
    identity_part = gate[: (d - 1) * d, : (d - 1) * d]
    conditioned = gate[control_block, control_block]
    off_upper = gate[: (d - 1) * d, control_block]
    off_lower = gate[control_block, : (d - 1) * d]
    off_block_max = max(np.max(np.abs(off_upper)), np.max(np.abs(off_lower)))
    identity_defect = np.max(np.abs(identity_part - np.eye((d - 1) * d)))
    block_distance = gate_distance(conditioned, compose(program))

    print(f"conditional gate on the {d * d}-dimensional computational subspace")
    print(f"off-block max |entry|        : {off_block_max:.3e}")
    print(f"identity-sector max deviation: {identity_defect:.3e}")
    print(f"conditioned-block distance to one-qudit gate: {block_distance:.3e}")
    print(f"distance to ideal conditional gate: {gate_distance(gate, target):.3e}")
    if args.out:
        _write_matrices(
            args.out,
            args.format,
            {"conditional_gate": gate},
            {
                "off_block_max": float(off_block_max),
                "identity_defect": float(identity_defect),
                "block_distance": float(block_distance),
                "d": d,
                "dim": space.dim,
            },
        )
        print(f"output written to {args.out}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--rtol", type=float, help="integrator relative tolerance")
    parser.add_argument("--threads", type=int,
                        help="worker cap for sweeps (env DARKPATH_THREADS as fallback)")


def _add_program_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--name", help=f"named gate: one of {', '.join(NAMED_GATE_LABELS)}")
    parser.add_argument("--program", help="gate program JSON file")
    parser.add_argument("--eta", type=float, help="override the auxiliary coupling strength")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkpath",
        description="Dark-path holonomic qudit gates: simulate, sweep and solve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gate = sub.add_parser("gate", help="analytic vs simulated gate matrix")
    _add_common(p_gate)
    _add_program_source(p_gate)
    p_gate.set_defaults(func=cmd_gate)

    p_sweep = sub.add_parser("sweep", help="Rabi-error robustness sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--gates", nargs="+", help="gate labels to sweep")
    p_sweep.add_argument("--etas", nargs="+", type=float, help="auxiliary couplings")
    p_sweep.add_argument("--samples", type=int, help="initial states per point")
    p_sweep.add_argument("--grid", type=float,
                         help="delta half-width (0 collapses the grid to delta = 0)")
    p_sweep.add_argument("--points", type=int, help="number of delta points")
    p_sweep.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_sweep.set_defaults(func=cmd_sweep)

    p_trace = sub.add_parser("trace", help="population trace through a program")
    _add_common(p_trace)
    _add_program_source(p_trace)
    p_trace.add_argument("--state",
                         help='initial state: "uniform3" or comma-separated amplitudes')
    p_trace.add_argument("--delta", type=float, help="systematic Rabi error")
    p_trace.add_argument("--points", type=int, help="grid points per loop")
    p_trace.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_trace.set_defaults(func=cmd_trace)

    p_solve = sub.add_parser("solve", help="search loop parameters for a target unitary")
    _add_common(p_solve)
    p_solve.add_argument("--target", help="target unitary as a JSON matrix file")
    p_solve.add_argument("--loops", type=int, help="number of loops (default: minimum bound)")
    p_solve.add_argument("--tol", type=float, help="gate-distance tolerance (default 1e-6)")
    p_solve.add_argument("--restarts", type=int, help="search restart budget (default 50)")
    p_solve.set_defaults(func=cmd_solve)

    p_two = sub.add_parser("two-qudit", help="simulate the conditional two-qudit gate")
    _add_common(p_two)
    _add_program_source(p_two)
    p_two.add_argument("--laser", help="physical laser config JSON for the coupling map")
    p_two.set_defaults(func=cmd_two_qudit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

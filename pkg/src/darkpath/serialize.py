"""CSV and JSON readers and writers for the library's data products.

Complex matrices are serialized as row-major [re, im] pairs; every
writer here has a matching reader so outputs round-trip.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .evolution import Trajectory
    from .robustness import SweepResult

SWEEP_CSV_HEADER = ["gate", "eta", "delta", "mean_fidelity", "stderr", "samples"]


def matrix_to_json_dict(matrix: np.ndarray) -> dict:
    matrix = np.asarray(matrix, dtype=complex)
    return {
        "shape": list(matrix.shape),
        "entries": [[z.real, z.imag] for z in matrix.ravel(order="C")],
    }


def matrix_from_json_dict(doc: dict) -> np.ndarray:
    shape = tuple(doc["shape"])
    flat = np.array([complex(re, im) for re, im in doc["entries"]])
    return flat.reshape(shape, order="C")


def write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_matrix_json(matrix: np.ndarray, path) -> None:
    write_json(path, matrix_to_json_dict(matrix))


def read_matrix_json(path) -> np.ndarray:
    return matrix_from_json_dict(read_json(path))


def trajectory_columns(traj: "Trajectory") -> tuple[list[str], np.ndarray]:
    """Column names and the numeric table for a trajectory CSV."""
    labels = traj.space.labels()
    header = (
        ["time_over_tau", "loop", "pop_computational", "pop_excited", "pop_auxiliary"]
        + [f"pop_{label}" for label in labels]
    )
    table = np.column_stack(
        [
            traj.time_over_tau,
            traj.loop_index.astype(float),
            traj.population_computational,
            traj.population_excited,
            traj.population_auxiliary,
            traj.level_populations,
        ]
    )
    return header, table


def write_trajectory_csv(traj: "Trajectory", path) -> None:
    header, table = trajectory_columns(traj)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in table:
            writer.writerow([f"{x:.12g}" for x in row])


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Trajectory table keyed by column name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    table = np.array(rows)
    return {name: table[:, i] for i, name in enumerate(header)}


def write_sweep_csv(result: "SweepResult", path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_HEADER)
        for r in result.rows:
            writer.writerow(
                [r.gate, f"{r.eta:.12g}", f"{r.delta:.12g}", f"{r.mean_fidelity:.12g}",
                 f"{r.stderr:.12g}", r.samples]
            )


def read_sweep_csv(path) -> "SweepResult":
    from .robustness import SweepResult, SweepRow

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != SWEEP_CSV_HEADER:
            raise ValueError(f"unexpected sweep CSV header: {header}")
        rows = tuple(
            SweepRow(
                gate=row[0],
                eta=float(row[1]),
                delta=float(row[2]),
                mean_fidelity=float(row[3]),
                stderr=float(row[4]),
                samples=int(row[5]),
            )
            for row in reader
        )
    return SweepResult(rows=rows)


def write_program_json(program, path) -> None:
    write_json(path, program.to_json_dict())


def read_program_json(path):
    from .gates import GateProgram

    return GateProgram.from_json_dict(read_json(path))

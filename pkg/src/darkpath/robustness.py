"""Systematic Rabi-error sweeps and population traces.

A sweep perturbs every Rabi frequency by a common factor (1 + delta),
simulates each gate program, and compares against the analytic composed
gate over Haar-random computational initial states.  Sweep points are
independent; each derives its sampling seed from (master seed, gate,
eta, delta) indices so parallel execution order never changes results.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .darkbright import basis_from_angles
from .evolution import (
    DEFAULT_CONFIG,
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    simulate_state,
)
from .gates import GateProgram, compose, named_gate_table, program_propagator
from .levels import haar_state

DEFAULT_DELTAS = np.linspace(-0.1, 0.1, 21)
DEFAULT_ETAS = (0.0, 4.0)


@dataclass(frozen=True)
class SweepSpec:
    """Full description of a robustness sweep.

    gates may be named-gate labels or a mapping from labels to custom
    programs; deltas and etas define the Cartesian grid.
    """

    gates: tuple[str, ...] = ("T3", "X3", "H3", "Z3")
    programs: Mapping[str, GateProgram] | None = None
    deltas: np.ndarray = field(default_factory=lambda: DEFAULT_DELTAS.copy())
    etas: tuple[float, ...] = DEFAULT_ETAS
    samples: int = 500
    seed: int = 0
    cfg: IntegratorConfig = DEFAULT_CONFIG

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "etas", tuple(float(e) for e in self.etas))
        object.__setattr__(self, "deltas", np.atleast_1d(np.asarray(self.deltas, dtype=float)))
        if self.samples < 1:
            raise ValueError(f"need at least one sample per point, got {self.samples}")
        if len(self.deltas) == 0:
            raise ValueError("delta grid must be non-empty")
        if not self.gates:
            raise ValueError("need at least one gate")

    def resolve_programs(self) -> dict[str, GateProgram]:
        table = named_gate_table()
        resolved = {}
        for label in self.gates:
            if self.programs is not None and label in self.programs:
                resolved[label] = self.programs[label]
            elif label in table:
                resolved[label] = table[label][1]
            else:
                raise ValueError(f"no program available for gate {label!r}")
        return resolved

    def point_seed(self, gate_index: int, eta_index: int, delta_index: int) -> int:
        ss = np.random.SeedSequence([self.seed, gate_index, eta_index, delta_index])
        return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class SweepRow:
    gate: str
    eta: float
    delta: float
    mean_fidelity: float
    stderr: float
    samples: int
    failures: int = 0


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))

    def __len__(self) -> int:
        return len(self.rows)

    def curve(self, gate: str, eta: float) -> tuple[np.ndarray, np.ndarray]:
        """(deltas, mean fidelities) for one gate at one eta, in grid order."""
        picked = [r for r in self.rows if r.gate == gate and r.eta == eta]
        return (
            np.array([r.delta for r in picked]),
            np.array([r.mean_fidelity for r in picked]),
        )

    def gates(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.rows:
            seen.setdefault(r.gate, None)
        return list(seen)

    def etas(self) -> list[float]:
        seen: dict[float, None] = {}
        for r in self.rows:
            seen.setdefault(r.eta, None)
        return list(seen)

    def to_csv(self, path) -> None:
        from .serialize import write_sweep_csv

        write_sweep_csv(self, path)

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {
                    "gate": r.gate,
                    "eta": r.eta,
                    "delta": r.delta,
                    "mean_fidelity": r.mean_fidelity,
                    "stderr": r.stderr,
                    "samples": r.samples,
                    "failures": r.failures,
                }
                for r in self.rows
            ]
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "SweepResult":
        return cls(
            rows=tuple(
                SweepRow(
                    gate=str(e["gate"]),
                    eta=float(e["eta"]),
                    delta=float(e["delta"]),
                    mean_fidelity=float(e["mean_fidelity"]),
                    stderr=float(e["stderr"]),
                    samples=int(e["samples"]),
                    failures=int(e.get("failures", 0)),
                )
                for e in doc["rows"]
            )
        )


def average_fidelity(
    program: GateProgram,
    delta: float,
    eta: float,
    samples: int,
    seed: int,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Mean fidelity and standard error over Haar-random initial states.

    The perturbed dynamics (common Rabi scale 1 + delta, auxiliary
    coupling eta) are integrated once as a propagator and applied to all
    sampled states; the reference output is the analytic composed gate,
    which is independent of eta and delta.  Deterministic per seed.
    """
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    prog = program.with_eta(eta)
    d = prog.d
    ideal = compose(prog)
    u_sim = program_propagator(prog, delta, cfg)

    rng = np.random.default_rng(seed)
    states = np.array([haar_state(d, rng) for _ in range(samples)])
    ideal_out = states @ ideal.T
    sim_out = states @ u_sim[: 2 * d, :d].T  # ground-supported inputs
    fids = np.abs(np.einsum("ij,ij->i", ideal_out.conj(), sim_out[:, :d]))
    mean = float(fids.mean())
    stderr = float(fids.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return mean, stderr


def _sweep_point(args) -> SweepRow:
    label, program, delta, eta, samples, seed, cfg = args
    try:
        mean, stderr = average_fidelity(program, delta, eta, samples, seed, cfg)
        return SweepRow(label, eta, delta, mean, stderr, samples)
    except IntegrationError:
        return SweepRow(label, eta, delta, float("nan"), float("nan"), samples, failures=samples)


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Full Cartesian sweep over (gate, eta, delta), rows in that order."""
    programs = spec.resolve_programs()
    tasks = []
    for gi, label in enumerate(spec.gates):
        for ei, eta in enumerate(spec.etas):
            for di, delta in enumerate(spec.deltas):
                tasks.append(
                    (
                        label,
                        programs[label],
                        float(delta),
                        float(eta),
                        spec.samples,
                        spec.point_seed(gi, ei, di),
                        spec.cfg,
                    )
                )
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(task) for task in tasks]
    return SweepResult(rows=tuple(rows))


def population_trace(
    program: GateProgram,
    initial: np.ndarray,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    delta: float = 0.0,
    n_points: int = 400,
) -> Trajectory:
    """Block populations through every loop of a program.

    Each loop is simulated in sequence with the previous final state as
    input; times accumulate across loops and loop_index marks the
    boundaries.
    """
    initial = np.asarray(initial, dtype=complex)
    d = program.d
    if initial.shape == (d,):
        full = np.zeros(2 * d, dtype=complex)
        full[:d] = initial
        initial = full

    times: list[np.ndarray] = []
    states: list[np.ndarray] = []
    loop_index: list[np.ndarray] = []
    offset = 0.0
    state = initial
    for i, loop in enumerate(program.loops):
        basis = basis_from_angles(loop.angles)
        traj = simulate_state(
            state,
            loop,
            basis,
            delta=delta,
            cfg=cfg,
            n_points=n_points,
            support_tol=1e-10 if i == 0 else 1e-5,
        )
        skip = 1 if i > 0 else 0  # boundary sample duplicates the previous loop's end
        times.append(traj.times[skip:] + offset)
        states.append(traj.states[skip:])
        loop_index.append(np.full(len(traj.times) - skip, i, dtype=int))
        offset += loop.tau
        state = traj.final_state

    tau = program.loops[0].tau
    return Trajectory(
        times=np.concatenate(times),
        states=np.vstack(states),
        d=d,
        tau=tau,
        loop_index=np.concatenate(loop_index),
    )

"""One-qudit holonomic gates: loops, compositions, named gates and search.

A single loop realizes the holonomy |D><D| + sum_k e^{i gamma_k}
|b_k><b_k| on the computational subspace.  Arbitrary gates are built by
composing loops with different parameters; ceil((d+1)/3) loops always
suffice by dimension counting, and any diagonal gate needs just one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np
from scipy.optimize import minimize

from .darkbright import DarkAngles, basis_from_angles
from .evolution import DEFAULT_CONFIG, IntegratorConfig, loop_propagator
from .levels import gate_distance, haar_unitary
from .pulses import LoopParams, qutrit_loop

NAMED_GATE_LABELS = ("X3", "Z3", "T3", "H3")

DIAGONAL_TOL = 1e-12


@dataclass(frozen=True)
class GateProgram:
    """An ordered sequence of loops, applied left to right in time.

    The realized unitary is the right-to-left matrix product of the
    per-loop holonomies.
    """

    d: int
    loops: tuple[LoopParams, ...]
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "loops", tuple(self.loops))
        if not self.loops:
            raise ValueError("a gate program needs at least one loop")
        for loop in self.loops:
            if loop.d != self.d:
                raise ValueError(f"loop dimension {loop.d} does not match program d={self.d}")

    @property
    def n_loops(self) -> int:
        return len(self.loops)

    def with_eta(self, eta: float) -> "GateProgram":
        """Copy of the program with the auxiliary coupling replaced on every loop."""
        return GateProgram(
            self.d, tuple(replace(loop, eta=eta) for loop in self.loops), self.label
        )

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "loops": [
                {
                    "thetas": loop.angles.thetas.tolist(),
                    "phis": loop.angles.phis.tolist(),
                    "pulse_phases": loop.pulse_phases.tolist(),
                    "gammas": loop.gammas.tolist(),
                    "eta": loop.eta,
                    "tau": loop.tau,
                }
                for loop in self.loops
            ],
            "label": self.label,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "GateProgram":
        loops = tuple(
            LoopParams(
                angles=DarkAngles(np.asarray(entry["thetas"]), np.asarray(entry["phis"])),
                pulse_phases=np.asarray(entry["pulse_phases"]),
                gammas=np.asarray(entry["gammas"]),
                eta=float(entry["eta"]),
                tau=float(entry["tau"]),
            )
            for entry in doc["loops"]
        )
        return cls(d=int(doc["d"]), loops=loops, label=doc.get("label"))


def holonomy_one_loop(loop: LoopParams) -> np.ndarray:
    """Analytic single-loop gate on the computational subspace (d x d)."""
    basis = basis_from_angles(loop.angles)
    gate = np.outer(basis.c, basis.c.conj())
    for k in range(loop.d - 1):
        bk = basis.brights[k]
        gate += np.exp(1j * loop.gammas[k]) * np.outer(bk, bk.conj())
    return gate


def compose(program: GateProgram) -> np.ndarray:
    """Matrix for the whole program: later loops multiply from the left."""
    gate = np.eye(program.d, dtype=complex)
    for loop in program.loops:
        gate = holonomy_one_loop(loop) @ gate
    return gate


def program_propagator(
    program: GateProgram,
    delta: float = 0.0,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Integrated full-space propagator over every loop of the program."""
    dim = 2 * program.d
    u = np.eye(dim, dtype=complex)
    for loop in program.loops:
        basis = basis_from_angles(loop.angles)
        u = loop_propagator(loop, basis, delta, cfg) @ u
    return u


def simulated_gate(
    program: GateProgram,
    delta: float = 0.0,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Computational-subspace block of the simulated program propagator."""
    return program_propagator(program, delta, cfg)[: program.d, : program.d]


def min_loops(d: int) -> int:
    """Smallest loop count n with 3(d-1)n >= d^2 - 1, i.e. ceil((d+1)/3)."""
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {d}")
    return math.ceil((d + 1) / 3)


def diagonal_program(
    phases: np.ndarray, eta: float = 4.0, tau: float = 1.0, label: str | None = None
) -> GateProgram:
    """Single-loop program for diag(1, e^{i g_1}, ..., e^{i g_{d-1}}).

    With all angles zero the dark state is |1> and the bright states are
    the remaining levels, so the loop phases write the diagonal directly.
    """
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    d = len(phases) + 1
    loop = LoopParams(
        angles=DarkAngles.zeros(d),
        pulse_phases=np.zeros(d - 1),
        gammas=phases,
        eta=eta,
        tau=tau,
    )
    return GateProgram(d=d, loops=(loop,), label=label)


# Hand-tabulated two-loop parameter set for the qutrit Hadamard-like gate,
# accurate to roughly two decimals (composed distance ~ 2e-5).  Kept as a
# regression anchor; named_gate ships the optimizer-refined program below.
H3_COARSE_PARAMS = (
    (6.41e-4, 6.56e-4, 0.48, 0.79, 1.58, 1.56),
    (9.81e-3, 0.00, 1.187, 2.15, 0.00, 1.57),
)

# Refined from H3_COARSE_PARAMS by refine_program (seed 7); composed
# distance to the H3 target is at rounding level (< 1e-12).
H3_REFINED_PARAMS = (
    (
        0.0006559779914944411,
        0.0006708475114099018,
        0.47567886399978004,
        0.7853585203669355,
        1.5804666321743763,
        1.5631084322810775,
    ),
    (
        0.009742831163090873,
        1.7230287613108866e-05,
        1.187459649953669,
        2.1506070628616154,
        5.633348619470078e-06,
        1.5688462620163177,
    ),
)


def h3_coarse_program(eta: float = 4.0, tau: float = 1.0) -> GateProgram:
    """The two-decimal H3 parameter set as a runnable program."""
    loops = tuple(qutrit_loop(*params, eta=eta, tau=tau) for params in H3_COARSE_PARAMS)
    return GateProgram(d=3, loops=loops, label="H3-coarse")


def named_gate_table(eta: float = 4.0, tau: float = 1.0) -> dict[str, tuple[np.ndarray, GateProgram]]:
    """Targets and programs for the named qutrit gates X3, Z3, T3, H3."""
    w = np.exp(2j * np.pi / 3)
    x3 = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
    z3 = np.diag([1.0, w, w**2]).astype(complex)
    t3 = np.diag([1.0, np.exp(2j * np.pi / 9), np.exp(-2j * np.pi / 9)]).astype(complex)
    h3 = np.array([[1, 1, 1], [1, w, w**2], [1, w**2, w]], dtype=complex) / np.sqrt(3)

    x3_program = GateProgram(
        3,
        (
            qutrit_loop(0, 0, np.pi / 4, np.pi / 2, 0, np.pi, eta=eta, tau=tau),
            qutrit_loop(0, 0, np.pi / 2, np.pi / 4, 0, np.pi, eta=eta, tau=tau),
        ),
        label="X3",
    )
    z3_program = GateProgram(
        3, (qutrit_loop(0, 0, 0, 0, 2 * np.pi / 3, 4 * np.pi / 3, eta=eta, tau=tau),), label="Z3"
    )
    t3_program = GateProgram(
        3, (qutrit_loop(0, 0, 0, 0, 2 * np.pi / 9, -2 * np.pi / 9, eta=eta, tau=tau),), label="T3"
    )
    h3_program = GateProgram(
        3,
        tuple(qutrit_loop(*params, eta=eta, tau=tau) for params in H3_REFINED_PARAMS),
        label="H3",
    )
    return {
        "X3": (x3, x3_program),
        "Z3": (z3, z3_program),
        "T3": (t3, t3_program),
        "H3": (h3, h3_program),
    }


def named_gate(name: str, eta: float = 4.0, tau: float = 1.0) -> tuple[np.ndarray, GateProgram]:
    """Target matrix and realizing program for one of X3, Z3, T3, H3."""
    table = named_gate_table(eta=eta, tau=tau)
    if name not in table:
        raise ValueError(f"unknown gate {name!r}; valid names: {', '.join(NAMED_GATE_LABELS)}")
    return table[name]


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a gate-parameter search."""

    program: GateProgram
    distance: float
    success: bool
    restarts_used: int


def _params_to_program(x: np.ndarray, d: int, n_loops: int, eta: float, tau: float) -> GateProgram:
    n = d - 1
    loops = []
    for i in range(n_loops):
        block = x[3 * n * i : 3 * n * (i + 1)]
        loops.append(
            LoopParams(
                angles=DarkAngles(block[:n], block[n : 2 * n]),
                pulse_phases=np.zeros(n),
                gammas=block[2 * n : 3 * n],
                eta=eta,
                tau=tau,
            )
        )
    return GateProgram(d=d, loops=tuple(loops))


def _program_to_params(program: GateProgram) -> np.ndarray:
    parts = []
    for loop in program.loops:
        parts.extend([loop.angles.thetas, loop.angles.phis, loop.gammas])
    return np.concatenate(parts)


def find_parameters(
    target: np.ndarray,
    n_loops: int,
    tol: float = 1e-6,
    seed: int = 0,
    restarts: int = 50,
    eta: float = 4.0,
    tau: float = 1.0,
    x0: np.ndarray | None = None,
) -> SearchResult:
    """Search loop parameters whose composed holonomy approximates a target.

    Runs derivative-free simplex minimization of the gate distance from
    up to `restarts` random starting points (plus the optional explicit
    x0 first), stopping at the first start that reaches `tol`.  Diagonal
    targets bypass the search entirely via the exact single-loop
    construction.  Never raises on a failed search: the best program
    found is returned with success=False.
    """
    target = np.asarray(target, dtype=complex)
    d = target.shape[0]
    if target.shape != (d, d):
        raise ValueError(f"target must be square, got shape {target.shape}")
    if n_loops < 1:
        raise ValueError("need at least one loop")

    off_diag = target - np.diag(np.diagonal(target))
    if np.max(np.abs(off_diag)) < DIAGONAL_TOL:
        phases = np.angle(np.diagonal(target))
        program = diagonal_program(phases[1:] - phases[0], eta=eta, tau=tau)
        if n_loops > 1:
            identity_loop = LoopParams(
                DarkAngles.zeros(d), np.zeros(d - 1), np.zeros(d - 1), eta=eta, tau=tau
            )
            program = GateProgram(
                d, program.loops + (identity_loop,) * (n_loops - 1), program.label
            )
        return SearchResult(
            program=program,
            distance=gate_distance(compose(program), target),
            success=True,
            restarts_used=0,
        )

    n_params = 3 * (d - 1) * n_loops

    def objective(x: np.ndarray) -> float:
        return gate_distance(compose(_params_to_program(x, d, n_loops, eta, tau)), target)

    rng = np.random.default_rng(seed)
    best_x = None
    best_val = np.inf
    used = 0
    for attempt in range(restarts):
        if attempt == 0 and x0 is not None:
            start = np.asarray(x0, dtype=float)
        else:
            start = rng.uniform(-np.pi, np.pi, n_params)
        used = attempt + 1
        x, val = _simplex_with_polish(objective, start)
        if val < best_val:
            best_x, best_val = x, val
        if best_val < tol:
            break

    program = _params_to_program(best_x, d, n_loops, eta, tau)
    return SearchResult(
        program=program, distance=best_val, success=bool(best_val < tol), restarts_used=used
    )


def _simplex_with_polish(objective, x0: np.ndarray, rounds: int = 3) -> tuple[np.ndarray, float]:
    """Nelder-Mead plus restarts from the incumbent until it stalls."""
    x, val = x0, np.inf
    for _ in range(rounds):
        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={
                "maxiter": 4000,
                "xatol": 1e-12,
                "fatol": 1e-14,
                "adaptive": True,
            },
        )
        if res.fun >= val - 1e-15:
            return (x, val) if val < res.fun else (res.x, float(res.fun))
        x, val = res.x, float(res.fun)
    return x, val


def refine_program(
    program: GateProgram, target: np.ndarray, tol: float = 1e-10, seed: int = 0
) -> SearchResult:
    """Polish an existing program against a target (single seeded start)."""
    return find_parameters(
        target,
        program.n_loops,
        tol=tol,
        seed=seed,
        restarts=1,
        eta=program.loops[0].eta,
        tau=program.loops[0].tau,
        x0=_program_to_params(program),
    )


def random_target(d: int, seed: int) -> np.ndarray:
    """Haar-random special-unitary target for search benchmarks."""
    u = haar_unitary(d, np.random.default_rng(seed))
    return u / np.linalg.det(u) ** (1.0 / d)

"""Time-dependent Schrodinger integration and the analytic dark paths.

Propagators are obtained by integrating the matrix equation
i dU/dt = H(t) U column-wise from the identity with an adaptive
high-order explicit scheme (DOP853); H(t) is smooth and bounded so no
stiffness handling is needed.  The closed-form dark paths provide an
exact oracle for the integrator: propagating a dark path's initial
state must track the analytic state at machine-level fidelity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .darkbright import DarkBrightBasis
from .levels import LevelSpace, unitarity_defect
from .pulses import FIRST, SECOND, LoopParams, PulseSchedule, hamiltonian, u_v

log = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    """Integrator failure, carrying the time at which it occurred."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for the adaptive integrator.

    max_step_frac caps the step size at that fraction of the loop time so
    the pulse structure cannot be stepped over.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step_frac: float = 1.0 / 200.0

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_step_frac <= 0:
            raise ValueError("integrator tolerances must be positive")

    def max_step(self, tau: float) -> float:
        return self.max_step_frac * tau


DEFAULT_CONFIG = IntegratorConfig()


def _solve(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t1: float,
    cfg: IntegratorConfig,
    max_step: float,
    t_eval: np.ndarray | None = None,
):
    sol = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method="DOP853",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=max_step,
        t_eval=t_eval,
        dense_output=False,
    )
    if not sol.success:
        t_fail = float(sol.t[-1]) if len(sol.t) else t0
        raise IntegrationError(f"integration failed near t={t_fail:.6g}: {sol.message}", t_fail)
    return sol


def propagate_operator(
    h_func: Callable[[float], np.ndarray],
    t0: float,
    t1: float,
    dim: int,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    max_step: float = np.inf,
) -> np.ndarray:
    """Time-ordered propagator of i dU/dt = h_func(t) U on [t0, t1].

    Re-unitarizes by polar projection only if the defect exceeds
    10 * rel_tol, and logs that event.
    """
    if not t0 < t1:
        raise ValueError(f"need t0 < t1, got [{t0}, {t1}]")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        u = y.reshape(dim, dim)
        return (-1j * (h_func(t) @ u)).ravel()

    y0 = np.eye(dim, dtype=complex).ravel()
    sol = _solve(rhs, y0, t0, t1, cfg, max_step)
    u_final = sol.y[:, -1].reshape(dim, dim)

    defect = unitarity_defect(u_final)
    if defect > 10 * cfg.rel_tol:
        log.warning(
            "propagator unitarity defect %.2e exceeds %.1e on [%g, %g]; applying polar projection",
            defect,
            10 * cfg.rel_tol,
            t0,
            t1,
        )
        w, _, vh = np.linalg.svd(u_final)
        u_final = w @ vh
    return u_final


def propagate(
    schedule: PulseSchedule,
    basis: DarkBrightBasis,
    t0: float,
    t1: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Propagator of the driven Hamiltonian over [t0, t1] inside one segment."""
    lo, hi = schedule.t_span
    slack = 1e-9 * schedule.loop.tau
    if t0 < lo - slack or t1 > hi + slack:
        raise ValueError(
            f"[{t0}, {t1}] outside the {schedule.segment} segment domain [{lo}, {hi}]"
        )

    def h_func(t: float) -> np.ndarray:
        return hamiltonian(t, schedule, basis)

    return propagate_operator(
        h_func, t0, t1, 2 * basis.d, cfg, max_step=cfg.max_step(schedule.loop.tau)
    )


def loop_propagator(
    loop: LoopParams,
    basis: DarkBrightBasis,
    delta: float = 0.0,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Full-loop propagator: second segment applied after the first."""
    tau = loop.tau
    u1 = propagate(PulseSchedule(loop, FIRST, delta), basis, 0.0, tau / 2, cfg)
    u2 = propagate(PulseSchedule(loop, SECOND, delta), basis, tau / 2, tau, cfg)
    return u2 @ u1


def evolve_state(
    initial: np.ndarray,
    schedule: PulseSchedule,
    basis: DarkBrightBasis,
    times: np.ndarray,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """States of one segment's driven evolution at the requested times.

    Integration starts from the segment's opening time; times must lie
    inside the segment domain and be sorted ascending.
    """
    t0, t1 = schedule.t_span
    times = np.asarray(times, dtype=float)
    slack = 1e-9 * schedule.loop.tau
    if len(times) == 0 or times[0] < t0 - slack or times[-1] > t1 + slack:
        raise ValueError(f"times must lie within the segment domain [{t0}, {t1}]")
    states, _ = _evolve_grid(
        lambda t: hamiltonian(t, schedule, basis),
        np.asarray(initial, dtype=complex),
        t0,
        t1,
        times,
        cfg,
        cfg.max_step(schedule.loop.tau),
    )
    return states


def dark_path_state(t: float, k: int, loop: LoopParams, basis: DarkBrightBasis) -> np.ndarray:
    """Analytic dark-path state |D_k(t)> in the full 2d-level space.

    For k <= d-2 the path swings between |b_k> and |e_k>; the last path
    (k = d-1) additionally dips into the auxiliary level with weight
    controlled by v(t).  Both start and end in the bright state, so the
    evolution is cyclic.
    """
    d = loop.d
    if basis.d != d:
        raise ValueError(f"dimension mismatch: loop d={d}, basis d={basis.d}")
    if not 1 <= k <= d - 1:
        raise ValueError(f"dark-path index must be in 1..{d - 1}, got {k}")
    u, v = u_v(t, loop.tau, loop.eta)
    space = basis.space
    phase = np.exp(-1j * loop.pulse_phases[k - 1])
    bright = basis.bright_full(k)
    excited = space.basis_state(space.excited(k))
    if k <= d - 2:
        return np.cos(u) * phase * bright + 1j * np.sin(u) * excited
    auxiliary = space.basis_state(space.aux)
    return (
        np.cos(u) * np.cos(v) * phase * bright
        - 1j * np.sin(u) * excited
        - np.cos(u) * np.sin(v) * auxiliary
    )


@dataclass(frozen=True)
class Trajectory:
    """States and block populations sampled on a time grid.

    times are in loop-time units; time_over_tau rescales by the loop run
    time.  loop_index marks which loop of a multi-loop program each sample
    belongs to (all zero for a single loop).
    """

    times: np.ndarray
    states: np.ndarray
    d: int
    tau: float
    loop_index: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.loop_index is None:
            object.__setattr__(self, "loop_index", np.zeros(len(self.times), dtype=int))
        if len(self.times) != len(self.states) or len(self.times) != len(self.loop_index):
            raise ValueError("times, states and loop_index must have equal lengths")

    @property
    def space(self) -> LevelSpace:
        return LevelSpace(self.d)

    @property
    def time_over_tau(self) -> np.ndarray:
        return self.times / self.tau

    @property
    def level_populations(self) -> np.ndarray:
        """Per-level populations, shape (n_times, 2d)."""
        return np.abs(self.states) ** 2

    @property
    def population_computational(self) -> np.ndarray:
        return self.level_populations[:, : self.d].sum(axis=1)

    @property
    def population_excited(self) -> np.ndarray:
        return self.level_populations[:, self.d : 2 * self.d - 1].sum(axis=1)

    @property
    def population_auxiliary(self) -> np.ndarray:
        return self.level_populations[:, 2 * self.d - 1]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path) -> None:
        from .serialize import write_trajectory_csv

        write_trajectory_csv(self, path)


def _evolve_grid(
    h_func: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    t0: float,
    t1: float,
    grid: np.ndarray,
    cfg: IntegratorConfig,
    max_step: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Evolve a state over [t0, t1], returning states on grid plus the endpoint."""

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return -1j * (h_func(t) @ y)

    t_eval = np.unique(np.concatenate([grid, [t1]]))
    sol = _solve(rhs, psi0, t0, t1, cfg, max_step, t_eval=t_eval)
    on_grid = np.array([sol.y[:, np.searchsorted(sol.t, t)] for t in grid])
    return on_grid, sol.y[:, -1]


def simulate_state(
    initial: np.ndarray,
    loop: LoopParams,
    basis: DarkBrightBasis,
    delta: float = 0.0,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    n_points: int = 400,
    support_tol: float = 1e-10,
) -> Trajectory:
    """Evolve a computational-subspace state through one full loop.

    Runs both segments (the second with its gamma phase shifts) and
    records the state on a uniform n_points grid over [0, tau].
    support_tol bounds how much weight the initial state may carry
    outside the ground subspace; loop chaining passes a looser value to
    tolerate integrator-level leakage from the previous loop.
    """
    initial = np.asarray(initial, dtype=complex)
    d = basis.d
    if initial.shape != (2 * d,):
        raise ValueError(f"expected a state of length {2 * d}, got shape {initial.shape}")
    outside = np.linalg.norm(initial[d:])
    if outside > support_tol:
        raise ValueError(f"initial state has weight {outside:.3e} outside the ground subspace")

    tau = loop.tau
    grid = np.linspace(0.0, tau, n_points)
    max_step = cfg.max_step(tau)
    first = PulseSchedule(loop, FIRST, delta)
    second = PulseSchedule(loop, SECOND, delta)

    mask1 = grid <= tau / 2
    states1, at_half = _evolve_grid(
        lambda t: hamiltonian(t, first, basis), initial, 0.0, tau / 2, grid[mask1], cfg, max_step
    )
    states2, _ = _evolve_grid(
        lambda t: hamiltonian(t, second, basis), at_half, tau / 2, tau, grid[~mask1], cfg, max_step
    )
    states = np.vstack([states1, states2]) if states2.size else states1
    return Trajectory(times=grid, states=states, d=d, tau=tau)

"""Conditional two-qudit holonomic gates via an effective ion-ion coupling.

The control ion is truncated to its d ground levels plus the one excited
level |e_{d-1}> the effective coupling touches; the target carries the
full 2d-level layout.  The effective Hamiltonian
|d><e_{d-1}|_control (x) H_target(t) + h.c. leaves every control state
other than |d> untouched and writes the one-qudit loop holonomy onto the
target conditioned on the control being in |d>.

The companion counter-rotating term commutes with the effective
Hamiltonian at equal times and acts trivially on the computational
subspace, so including it does not change the conditional gate there.

A pure function maps physical two-color drive parameters (single-ion
Rabi frequencies, Lamb-Dicke parameter, trap frequency, detuning) to the
effective couplings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .darkbright import DarkBrightBasis, basis_from_angles
from .evolution import DEFAULT_CONFIG, IntegratorConfig, propagate_operator
from .gates import GateProgram, compose
from .levels import LevelSpace
from .pulses import FIRST, SECOND, PulseSchedule, coupling_half

LAMB_DICKE_WARN = 0.3


@dataclass(frozen=True)
class TwoQuditSpace:
    """Index layout of the control-target pair.

    Control levels |1>..|d>, |e_{d-1}> occupy indices 0..d; the composite
    index is control * 2d + target with the target in the usual 2d-level
    layout.  The computational subspace is the d^2 states with both ions
    in their ground levels.
    """

    d: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"qudit dimension must be >= 2, got {self.d}")

    @property
    def control_dim(self) -> int:
        return self.d + 1

    @property
    def target_space(self) -> LevelSpace:
        return LevelSpace(self.d)

    @property
    def dim(self) -> int:
        return self.control_dim * 2 * self.d

    @property
    def control_d_index(self) -> int:
        """Index of the control ground level |d>."""
        return self.d - 1

    @property
    def control_excited_index(self) -> int:
        return self.d

    def index(self, control: int, target: int) -> int:
        return control * 2 * self.d + target

    def computational_indices(self) -> np.ndarray:
        """Composite indices of |k l> with k, l = 1..d, row-major in (k, l)."""
        return np.array(
            [self.index(k, l) for k in range(self.d) for l in range(self.d)], dtype=int
        )

    def control_raising(self) -> np.ndarray:
        """|d><e_{d-1}| on the control ion."""
        op = np.zeros((self.control_dim, self.control_dim), dtype=complex)
        op[self.control_d_index, self.control_excited_index] = 1.0
        return op


def effective_hamiltonian(
    t: float, schedule: PulseSchedule, basis: DarkBrightBasis
) -> np.ndarray:
    """|d><e_{d-1}|_control (x) H_target(t) + h.c. on the composite space."""
    space = TwoQuditSpace(basis.d)
    half = coupling_half(t, schedule, basis)
    h_target = half + half.conj().T
    sigma = space.control_raising()
    block = np.kron(sigma, h_target)
    return block + block.conj().T


def bar_hamiltonian(t: float, schedule: PulseSchedule, basis: DarkBrightBasis) -> np.ndarray:
    """Counter-rotating companion term of the effective Hamiltonian.

    Carries the raised target couplings with a minus sign:
    -|d><e_{d-1}|_control (x) B^dag + h.c. with B the lowering half of
    the target Hamiltonian.
    """
    space = TwoQuditSpace(basis.d)
    half = coupling_half(t, schedule, basis)
    sigma = space.control_raising()
    block = -np.kron(sigma, half.conj().T)
    return block + block.conj().T


def conditional_propagator(
    program: GateProgram,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    delta: float = 0.0,
    include_counter_term: bool = False,
) -> np.ndarray:
    """Full composite propagator of the program under the effective coupling."""
    space = TwoQuditSpace(program.d)
    u = np.eye(space.dim, dtype=complex)
    for loop in program.loops:
        basis = basis_from_angles(loop.angles)
        for segment in (FIRST, SECOND):
            schedule = PulseSchedule(loop, segment, delta)

            def h_func(t: float) -> np.ndarray:
                h = effective_hamiltonian(t, schedule, basis)
                if include_counter_term:
                    h = h + bar_hamiltonian(t, schedule, basis)
                return h

            t0, t1 = schedule.t_span
            u = (
                propagate_operator(h_func, t0, t1, space.dim, cfg, cfg.max_step(loop.tau))
                @ u
            )
    return u


def conditional_gate(
    program: GateProgram,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    delta: float = 0.0,
) -> np.ndarray:
    """Computational-subspace block (d^2 x d^2) of the conditional gate."""
    space = TwoQuditSpace(program.d)
    u = conditional_propagator(program, cfg, delta)
    comp = space.computational_indices()
    return u[np.ix_(comp, comp)]


def conditional_target(program: GateProgram) -> np.ndarray:
    """Ideal conditional gate: identity except U^{(1)} when control is |d>."""
    d = program.d
    p_d = np.zeros((d, d))
    p_d[d - 1, d - 1] = 1.0
    return np.kron(np.eye(d) - p_d, np.eye(d)) + np.kron(p_d, compose(program))


@dataclass(frozen=True)
class LaserConfig:
    """Physical two-color drive parameters for the conditional gate.

    omega0 drives the control ion; omegas (length N = (d^2+d)/2 - 1) and
    omega_a drive the target transitions in the fixed enumeration order
    (|1><e_1|, |2><e_1|, |1><e_2|, ..., |d><e_{d-1}|, auxiliary last).
    Phases are measured relative to the control drive:
    phi_j = arg(omega_j) + phi_0.
    """

    omega0: complex
    omegas: np.ndarray
    omega_a: complex
    eta_L: float
    nu: float
    Delta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "omegas", np.atleast_1d(np.asarray(self.omegas, dtype=complex)))
        object.__setattr__(self, "omega0", complex(self.omega0))
        object.__setattr__(self, "omega_a", complex(self.omega_a))
        if self.eta_L <= 0:
            raise ValueError(f"Lamb-Dicke parameter must be positive, got {self.eta_L}")
        d = self._infer_d(len(self.omegas))
        if d is None:
            raise ValueError(
                f"{len(self.omegas)} target drives do not match any qudit dimension; "
                "need (d^2+d)/2 - 1 of them"
            )

    @staticmethod
    def _infer_d(n_drives: int) -> int | None:
        root = (-1 + np.sqrt(1 + 8 * (n_drives + 1))) / 2
        d = int(round(root))
        if d >= 2 and d * (d + 1) // 2 - 1 == n_drives:
            return d
        return None

    @property
    def d(self) -> int:
        return self._infer_d(len(self.omegas))

    @property
    def n_target_drives(self) -> int:
        return len(self.omegas)

    @property
    def drive_count(self) -> int:
        """Total distinct laser drives: control + targets + auxiliary."""
        return self.n_target_drives + 2

    @property
    def phi0(self) -> float:
        return float(np.angle(self.omega0))

    def phases(self) -> tuple[np.ndarray, float]:
        """Laser phases (phi_1..phi_N, phi_a) relative to the lab frame."""
        return np.angle(self.omegas) + self.phi0, float(np.angle(self.omega_a) + self.phi0)

    def to_json_dict(self) -> dict:
        return {
            "omega0": [self.omega0.real, self.omega0.imag],
            "omegas": [[w.real, w.imag] for w in self.omegas],
            "omega_a": [self.omega_a.real, self.omega_a.imag],
            "eta_L": self.eta_L,
            "nu": self.nu,
            "Delta": self.Delta,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LaserConfig":
        return cls(
            omega0=complex(doc["omega0"][0], doc["omega0"][1]),
            omegas=np.array([complex(re, im) for re, im in doc["omegas"]]),
            omega_a=complex(doc["omega_a"][0], doc["omega_a"][1]),
            eta_L=float(doc["eta_L"]),
            nu=float(doc["nu"]),
            Delta=float(doc["Delta"]),
        )


def coupling_enumeration(d: int) -> list[tuple[int, int]]:
    """Driven target transitions (k, l) in laser order.

    Excited level l couples to ground levels 1..l+1, except the last one
    (l = d-1) which couples to all d ground levels, so omega_{k,l} = 0
    whenever k > l+1.
    """
    pairs = []
    for l in range(1, d):
        top = l + 1 if l < d - 1 else d
        pairs.extend((k, l) for k in range(1, top + 1))
    return pairs


def laser_to_couplings(cfg: LaserConfig) -> tuple[np.ndarray, complex]:
    """Effective couplings (omega_{k,l} matrix, Omega_a) from drive parameters.

    The prefactor is kappa = eta_L^2 nu / (Delta^2 - nu^2); each entry is
    kappa |omega_0 omega_j| e^{i phi_j} in the fixed enumeration order and
    the auxiliary coupling carries an extra factor 2.
    """
    if cfg.eta_L >= 1.0:
        raise ValueError(f"Lamb-Dicke parameter {cfg.eta_L} >= 1 invalidates the expansion")
    if cfg.eta_L > LAMB_DICKE_WARN:
        warnings.warn(
            f"Lamb-Dicke parameter {cfg.eta_L} > {LAMB_DICKE_WARN}; effective couplings "
            "are only reliable well inside the Lamb-Dicke regime",
            stacklevel=2,
        )
    if cfg.Delta == cfg.nu:
        raise ValueError("detuning equals the trap frequency; coupling prefactor diverges")

    kappa = cfg.eta_L**2 * cfg.nu / (cfg.Delta**2 - cfg.nu**2)
    d = cfg.d
    # |omega_0 omega_j| e^{i phi_j} == |omega_0| e^{i phi_0} omega_j
    scale = kappa * abs(cfg.omega0) * np.exp(1j * cfg.phi0)
    omega = np.zeros((d, d - 1), dtype=complex)
    for amplitude, (k, l) in zip(cfg.omegas, coupling_enumeration(d)):
        omega[k - 1, l - 1] = scale * amplitude
    omega_aux = 2.0 * scale * cfg.omega_a
    return omega, complex(omega_aux)

"""Control functions, reverse-engineered Rabi pulses and the driven Hamiltonian.

One loop of duration tau is driven by the control pair

    u(t) = (pi/2) sin^2(pi t / tau),     v(t) = eta * (1 - cos u(t)),

which vanish at t = 0 and t = tau so the evolution is cyclic.  The Rabi
frequencies are reverse engineered so the dark paths solve the
Schrodinger equation exactly.  The naive expression contains
vdot * cot(u), which is 0 * inf at the loop boundaries; substituting
vdot = eta * sin(u) * udot gives vdot * cot(u) = eta * udot * cos(u),
finite everywhere, and makes every pulse proportional to udot.

The loop splits into two equal-duration segments at tau/2 (where
u = pi/2).  The second segment runs with laser phases phi_k - gamma_k:
after the excited-state round trip each bright state then returns with
the relative phase e^{i gamma_k}, which is the holonomic gate content.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .darkbright import DarkAngles, DarkBrightBasis, bare_couplings

# optional replacement for the standard control shape: a pair of
# callables (u(t, tau), udot(t, tau)); v stays tied to u via eta
ShapePair = tuple[Callable[[float, float], float], Callable[[float, float], float]]

FIRST = "first"
SECOND = "second"


@dataclass(frozen=True)
class LoopParams:
    """Parameters of one multi-pulse loop.

    angles fix the dark state, pulse_phases are the static laser phases
    phi_k, gammas are the per-bright segment phase shifts, eta couples the
    auxiliary level and tau is the loop run time.
    """

    angles: DarkAngles
    pulse_phases: np.ndarray
    gammas: np.ndarray
    eta: float = 0.0
    tau: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "pulse_phases", np.atleast_1d(np.asarray(self.pulse_phases, dtype=float))
        )
        object.__setattr__(self, "gammas", np.atleast_1d(np.asarray(self.gammas, dtype=float)))
        n = self.d - 1
        if self.pulse_phases.shape != (n,):
            raise ValueError(f"expected {n} pulse phases, got shape {self.pulse_phases.shape}")
        if self.gammas.shape != (n,):
            raise ValueError(f"expected {n} segment phases, got shape {self.gammas.shape}")
        if self.tau <= 0:
            raise ValueError(f"loop run time must be positive, got {self.tau}")
        if self.eta < 0:
            raise ValueError(f"auxiliary coupling must be >= 0, got {self.eta}")

    @property
    def d(self) -> int:
        return self.angles.d


def qutrit_loop(
    chi: float,
    xi: float,
    theta: float,
    phi: float,
    gamma1: float,
    gamma2: float,
    eta: float = 4.0,
    tau: float = 1.0,
) -> LoopParams:
    """Qutrit loop in the (chi, xi, theta, phi, gamma1, gamma2) convention."""
    return LoopParams(
        angles=DarkAngles(thetas=np.array([theta, phi]), phis=np.array([chi, xi])),
        pulse_phases=np.zeros(2),
        gammas=np.array([gamma1, gamma2]),
        eta=eta,
        tau=tau,
    )


@dataclass(frozen=True)
class PulseSchedule:
    """One loop segment with an optional systematic Rabi-error multiplier.

    delta scales every Rabi frequency by (1 + delta) uniformly; the first
    segment covers [0, tau/2], the second [tau/2, tau].
    """

    loop: LoopParams
    segment: str = FIRST
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.segment not in (FIRST, SECOND):
            raise ValueError(f"segment must be '{FIRST}' or '{SECOND}', got {self.segment!r}")

    @property
    def t_span(self) -> tuple[float, float]:
        tau = self.loop.tau
        return (0.0, tau / 2) if self.segment == FIRST else (tau / 2, tau)

    def effective_phases(self) -> np.ndarray:
        """Laser phases for this segment: phi_k, or phi_k - gamma_k after tau/2."""
        if self.segment == FIRST:
            return self.loop.pulse_phases
        return self.loop.pulse_phases - self.loop.gammas


def _check_domain(t: float, tau: float) -> None:
    slack = 1e-9 * tau
    if t < -slack or t > tau + slack:
        raise ValueError(f"time {t} outside the loop domain [0, {tau}]")


def _u(t: float, tau: float) -> float:
    return (np.pi / 2) * np.sin(np.pi * t / tau) ** 2


def _udot(t: float, tau: float) -> float:
    return (np.pi**2 / (2 * tau)) * np.sin(2 * np.pi * t / tau)


def u_v(t: float, tau: float, eta: float, shape: ShapePair | None = None) -> tuple[float, float]:
    """Control angles (u, v) at time t in [0, tau]."""
    _check_domain(t, tau)
    u_func = shape[0] if shape is not None else _u
    u = u_func(t, tau)
    return u, eta * (1.0 - np.cos(u))


def rabi(
    t: float,
    loop: LoopParams,
    d: int | None = None,
    shape: ShapePair | None = None,
) -> tuple[np.ndarray, float]:
    """Rabi frequencies (Omega_1..Omega_{d-1}, Omega_a) at time t.

    The first d-2 pulses are -2*udot; the last computational pulse and the
    auxiliary pulse mix udot with the v controls.  All values are finite
    for every t including the boundaries, where they vanish.
    """
    if d is None:
        d = loop.d
    elif d != loop.d:
        raise ValueError(f"dimension mismatch: d={d} but loop has d={loop.d}")
    _check_domain(t, loop.tau)
    u_func, udot_func = shape if shape is not None else (_u, _udot)
    u = u_func(t, loop.tau)
    udot = udot_func(t, loop.tau)
    v = loop.eta * (1.0 - np.cos(u))
    # vdot * cot(u) == eta * udot * cos(u), regular at u = 0
    vdot_cot_u = loop.eta * udot * np.cos(u)

    omegas = np.full(d - 1, -2.0 * udot)
    omegas[d - 2] = 2.0 * (vdot_cot_u * np.sin(v) + udot * np.cos(v))
    omega_a = 2.0 * (vdot_cot_u * np.cos(v) - udot * np.sin(v))
    return omegas, float(omega_a)


def coupling_half(
    t: float,
    schedule: PulseSchedule,
    basis: DarkBrightBasis,
    frame: str = "dark-bright",
    shape: ShapePair | None = None,
) -> np.ndarray:
    """Lowering half B of the driven Hamiltonian, so that H = B + B^dag.

    B collects the ground<-excited couplings sum_k (Omega_k/2)
    e^{-i phi_k} |b_k><e_k| plus the auxiliary leg (Omega_a/2)
    |a><e_{d-1}|; it annihilates every state without excited components.
    """
    loop = schedule.loop
    d = basis.d
    if loop.d != d:
        raise ValueError(f"dimension mismatch: loop d={loop.d}, basis d={d}")
    omegas, omega_a = rabi(t, loop, shape=shape)
    scale = 1.0 + schedule.delta
    phases = schedule.effective_phases()
    amplitudes = scale * omegas * np.exp(-1j * phases)

    dim = 2 * d
    h = np.zeros((dim, dim), dtype=complex)

    if frame == "dark-bright":
        for k in range(d - 1):
            h[:d, d + k] += 0.5 * amplitudes[k] * basis.brights[k]
    elif frame == "bare":
        h[:d, d : 2 * d - 1] = bare_couplings(basis, amplitudes)
    else:
        raise ValueError(f"unknown frame {frame!r}")

    h[dim - 1, dim - 2] = 0.5 * scale * omega_a
    return h


def hamiltonian(
    t: float,
    schedule: PulseSchedule,
    basis: DarkBrightBasis,
    frame: str = "dark-bright",
    shape: ShapePair | None = None,
) -> np.ndarray:
    """Driven Hamiltonian on the full 2d-level space at time t.

    frame="dark-bright" assembles sum_k (Omega_k/2) e^{-i phi_k}
    |b_k><e_k| + (Omega_a/2) |a><e_{d-1}| + h.c. directly; frame="bare"
    routes the same operator through the bare couplings omega_{k,l}.  Both
    frames return identical matrices.
    """
    h = coupling_half(t, schedule, basis, frame=frame, shape=shape)
    return h + h.conj().T

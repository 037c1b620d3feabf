"""Dark-path holonomic qudit gates.

Constructs dark-bright bases and reverse-engineered pulse schedules for
d-dimensional qudits, integrates the time-dependent Schrodinger equation
to realize one- and two-qudit holonomic gates, and stress-tests the
gates against systematic Rabi-frequency errors.
"""

from .darkbright import (
    DarkAngles,
    DarkBrightBasis,
    bare_couplings,
    basis_from_angles,
    build_basis,
    dark_coefficients,
)
from .evolution import (
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    dark_path_state,
    evolve_state,
    loop_propagator,
    propagate,
    propagate_operator,
    simulate_state,
)
from .gates import (
    GateProgram,
    SearchResult,
    compose,
    diagonal_program,
    find_parameters,
    holonomy_one_loop,
    min_loops,
    named_gate,
    named_gate_table,
    program_propagator,
    simulated_gate,
)
from .levels import (
    LevelSpace,
    fidelity,
    gate_distance,
    haar_state,
    haar_unitary,
    random_state,
)
from .pulses import LoopParams, PulseSchedule, hamiltonian, qutrit_loop, rabi, u_v
from .robustness import (
    SweepResult,
    SweepRow,
    SweepSpec,
    average_fidelity,
    population_trace,
    run_sweep,
)
from .twoqudit import (
    LaserConfig,
    TwoQuditSpace,
    bar_hamiltonian,
    conditional_gate,
    conditional_target,
    effective_hamiltonian,
    laser_to_couplings,
)

__version__ = "0.1.0"

__all__ = [
    "DarkAngles",
    "DarkBrightBasis",
    "GateProgram",
    "IntegrationError",
    "IntegratorConfig",
    "LaserConfig",
    "LevelSpace",
    "LoopParams",
    "PulseSchedule",
    "SearchResult",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "Trajectory",
    "TwoQuditSpace",
    "average_fidelity",
    "bar_hamiltonian",
    "bare_couplings",
    "basis_from_angles",
    "build_basis",
    "compose",
    "conditional_gate",
    "conditional_target",
    "dark_coefficients",
    "dark_path_state",
    "diagonal_program",
    "effective_hamiltonian",
    "evolve_state",
    "fidelity",
    "find_parameters",
    "gate_distance",
    "haar_state",
    "haar_unitary",
    "hamiltonian",
    "holonomy_one_loop",
    "laser_to_couplings",
    "loop_propagator",
    "min_loops",
    "named_gate",
    "named_gate_table",
    "population_trace",
    "program_propagator",
    "propagate",
    "propagate_operator",
    "qutrit_loop",
    "rabi",
    "random_state",
    "run_sweep",
    "simulate_state",
    "simulated_gate",
    "u_v",
]

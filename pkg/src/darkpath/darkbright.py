"""Dark state and bright states on the computational subspace.

The dark state |D> = sum_k c_k |k> is parameterized by hyperspherical
angles with phase factors.  The d-1 bright states complete it to an
orthonormal basis of the ground subspace; each bright state couples to
exactly one excited level, which is what decouples the driven system
into independent two-level pairs.

Bright states follow the staircase closed forms (b_k supported on levels
1..k+1) whenever those are defined; every bright state is normalized to
unit norm.  Degenerate coefficient patterns fall back to a deterministic
Gram-Schmidt completion that preserves the staircase support, so the
coupling sparsity pattern survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .levels import LevelSpace

# Coefficients below this magnitude are treated as degenerate and the
# closed-form bright state is abandoned for that index.
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class DarkAngles:
    """Hyperspherical angles theta_1..theta_{d-1} and phases phi_1..phi_{d-1}."""

    thetas: np.ndarray
    phis: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "thetas", np.atleast_1d(np.asarray(self.thetas, dtype=float)))
        object.__setattr__(self, "phis", np.atleast_1d(np.asarray(self.phis, dtype=float)))
        if self.thetas.shape != self.phis.shape or self.thetas.ndim != 1:
            raise ValueError(
                f"angle vectors must share one dimension, got {self.thetas.shape} and {self.phis.shape}"
            )
        if len(self.thetas) < 1:
            raise ValueError("need at least one angle pair (d >= 2)")

    @property
    def d(self) -> int:
        return len(self.thetas) + 1

    @classmethod
    def zeros(cls, d: int) -> "DarkAngles":
        return cls(np.zeros(d - 1), np.zeros(d - 1))


@dataclass(frozen=True)
class DarkBrightBasis:
    """Dark-state coefficients plus the bright-state completion.

    Attributes:
        c: dark-state coefficients, shape (d,), unit norm.
        brights: bright states as rows, shape (d-1, d), ground components only.
        lambdas: closed-form Lambda_{k+1} keyed by subscript k+1 (3..d);
            missing keys mark fallback indices.
        norms: closed-form normalization N_k keyed by k (2..d-1).
        closed_form: per-bright flag, True where the closed form applies.
    """

    c: np.ndarray
    brights: np.ndarray
    lambdas: dict[int, complex] = field(default_factory=dict)
    norms: dict[int, float] = field(default_factory=dict)
    closed_form: tuple[bool, ...] = ()

    @property
    def d(self) -> int:
        return len(self.c)

    @property
    def space(self) -> LevelSpace:
        return LevelSpace(self.d)

    def dark_full(self) -> np.ndarray:
        """Dark state embedded in the full 2d-level space."""
        return self.space.embed_ground(self.c)

    def bright_full(self, k: int) -> np.ndarray:
        """Bright state |b_k> (k = 1..d-1) embedded in the full space."""
        if not 1 <= k <= self.d - 1:
            raise ValueError(f"bright index must be in 1..{self.d - 1}, got {k}")
        return self.space.embed_ground(self.brights[k - 1])


def dark_coefficients(angles: DarkAngles) -> np.ndarray:
    """Dark-state coefficients from the hypersphere parameterization.

    c_1 = cos(theta_1), c_k = e^{i phi_{k-1}} sin(theta_1)..sin(theta_{k-1})
    cos(theta_k) for 2 <= k <= d-1, and c_d carries the full sine product.
    The result always has unit norm.
    """
    thetas, phis = angles.thetas, angles.phis
    d = angles.d
    c = np.zeros(d, dtype=complex)
    sin_prod = 1.0
    c[0] = np.cos(thetas[0])
    for k in range(2, d):
        sin_prod *= np.sin(thetas[k - 2])
        c[k - 1] = np.exp(1j * phis[k - 2]) * sin_prod * np.cos(thetas[k - 1])
    sin_prod *= np.sin(thetas[d - 2])
    c[d - 1] = np.exp(1j * phis[d - 2]) * sin_prod
    return c


def _staircase_fallback(
    c: np.ndarray, brights: list[np.ndarray], k: int
) -> np.ndarray:
    """Orthonormal completion for bright index k when the closed form fails.

    Searches span{|1>..|k+1>} for a unit vector orthogonal to the dark
    state and to every bright built so far, processing canonical basis
    vectors in index order and discarding near-zero residuals.  Keeping
    the staircase support preserves orthogonality with any later
    closed-form bright states and the coupling sparsity pattern.

    Inside the staircase span the dark-state constraint is its truncation
    to the first k+1 levels (all earlier brights already live there); the
    constraint set is orthonormalized first so projections are exact.
    """
    n = k + 1  # staircase span: levels 1..k+1
    seeds = [c[:n]] + [b[:n] for b in brights]
    constraints: list[np.ndarray] = []
    for seed in seeds:
        vec = seed.astype(complex).copy()
        for w in constraints:
            vec -= np.vdot(w, vec) * w
        norm = np.linalg.norm(vec)
        if norm > DEGENERACY_TOL:
            constraints.append(vec / norm)

    for idx in range(n):
        cand = np.zeros(n, dtype=complex)
        cand[idx] = 1.0
        for w in constraints:
            cand -= np.vdot(w, cand) * w
        residual = np.linalg.norm(cand)
        if residual > DEGENERACY_TOL:
            cand /= residual
            # second pass removes numerical contamination amplified by
            # normalizing a small residual
            for w in constraints:
                cand -= np.vdot(w, cand) * w
            cand /= np.linalg.norm(cand)
            full = np.zeros(len(c), dtype=complex)
            full[:n] = cand
            return full
    raise RuntimeError(f"no orthonormal completion found for bright index {k}")


def build_basis(c: np.ndarray) -> DarkBrightBasis:
    """Construct the bright states for a normalized dark-coefficient vector.

    Raises ValueError if c is not normalized.  Bright k uses the closed
    form when the partial sum S_k = sum_{l<=k} |c_l|^2 and the coefficient
    c_{k+1} are both nonzero (b_1 only needs S_2 > 0); otherwise the
    Gram-Schmidt fallback fills that index and no Lambda/N is recorded.
    """
    c = np.asarray(c, dtype=complex)
    d = len(c)
    if d < 2:
        raise ValueError(f"need at least 2 coefficients, got {d}")
    norm = np.linalg.norm(c)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"dark coefficients must be normalized, |c| = {norm:.6g}")

    abs_sq = np.abs(c) ** 2
    partial = np.cumsum(abs_sq)  # partial[k-1] = S_k

    brights: list[np.ndarray] = []
    lambdas: dict[int, complex] = {}
    norms: dict[int, float] = {}
    closed: list[bool] = []

    # b_1 = (-c_2^*, c_1^*, 0, ...) / sqrt(S_2)
    s2 = partial[1]
    if s2 > DEGENERACY_TOL:
        b1 = np.zeros(d, dtype=complex)
        b1[0] = -np.conj(c[1])
        b1[1] = np.conj(c[0])
        brights.append(b1 / np.sqrt(s2))
        closed.append(True)
    else:
        brights.append(_staircase_fallback(c, brights, 1))
        closed.append(False)

    for k in range(2, d):
        s_k = partial[k - 1]
        c_next = c[k]
        if s_k > DEGENERACY_TOL and abs(c_next) > DEGENERACY_TOL:
            s_next = partial[k]
            bk = np.zeros(d, dtype=complex)
            bk[:k] = c[:k] * (abs(c_next) / np.sqrt(s_k * s_next))
            bk[k] = -(c_next / abs(c_next)) * np.sqrt(s_k / s_next)
            brights.append(bk)
            lambdas[k + 1] = complex(-s_k / np.conj(c_next))
            norms[k] = float(abs(c_next) / np.sqrt(s_k * s_next))
            closed.append(True)
        else:
            brights.append(_staircase_fallback(c, brights, k))
            closed.append(False)

    return DarkBrightBasis(
        c=c,
        brights=np.array(brights),
        lambdas=lambdas,
        norms=norms,
        closed_form=tuple(closed),
    )


def basis_from_angles(angles: DarkAngles) -> DarkBrightBasis:
    return build_basis(dark_coefficients(angles))


def bare_couplings(basis: DarkBrightBasis, omega_pulses: np.ndarray) -> np.ndarray:
    """Bare-level couplings omega_{k,l} from bright-basis pulse amplitudes.

    omega_pulses holds the d-1 complex amplitudes Omega_l e^{-i phi_l};
    the returned (d, d-1) matrix satisfies
    omega[k-1, l-1] = (Omega_l / 2) e^{-i phi_l} <k|b_l>, so that the
    bare-level Hamiltonian sum omega_{k,l} |k><e_l| + h.c. reproduces the
    bright-basis form.  For staircase bases omega_{k,l} = 0 when k > l+1.
    """
    omega_pulses = np.asarray(omega_pulses, dtype=complex)
    d = basis.d
    if omega_pulses.shape != (d - 1,):
        raise ValueError(
            f"expected {d - 1} pulse amplitudes for d={d}, got shape {omega_pulses.shape}"
        )
    # <k|b_l> is the k-th component of b_l
    return 0.5 * basis.brights.T * omega_pulses[np.newaxis, :]

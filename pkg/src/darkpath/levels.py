"""Level-space layout and dense linear-algebra primitives.

A qudit of dimension d lives in a 2d-level space: the d computational
ground levels |1>..|d>, the d-1 excited levels |e_1>..|e_{d-1}> used as
intermediaries, and one auxiliary lower level |a>.  All other modules
share the index layout fixed here: ground block first, excited block
second, auxiliary last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNITARY_ATOL = 1e-8


@dataclass(frozen=True)
class LevelSpace:
    """Index map for the 2d-level space of a single d-dimensional qudit.

    Ground level |k> (k = 1..d) sits at index k-1, excited level |e_l>
    (l = 1..d-1) at index d-1+l, and the auxiliary |a> at index 2d-1.
    """

    d: int

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"qudit dimension must be >= 2, got {self.d}")

    @property
    def dim(self) -> int:
        return 2 * self.d

    def ground(self, k: int) -> int:
        if not 1 <= k <= self.d:
            raise ValueError(f"ground label must be in 1..{self.d}, got {k}")
        return k - 1

    def excited(self, l: int) -> int:
        if not 1 <= l <= self.d - 1:
            raise ValueError(f"excited label must be in 1..{self.d - 1}, got {l}")
        return self.d - 1 + l

    @property
    def aux(self) -> int:
        return 2 * self.d - 1

    @property
    def ground_slice(self) -> slice:
        return slice(0, self.d)

    @property
    def excited_slice(self) -> slice:
        return slice(self.d, 2 * self.d - 1)

    def labels(self) -> list[str]:
        """Human-readable level labels in index order."""
        return (
            [f"g{k}" for k in range(1, self.d + 1)]
            + [f"e{l}" for l in range(1, self.d)]
            + ["a"]
        )

    def basis_state(self, index: int) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[index] = 1.0
        return vec

    def ground_projector(self) -> np.ndarray:
        proj = np.zeros((self.dim, self.dim), dtype=complex)
        for k in range(self.d):
            proj[k, k] = 1.0
        return proj

    def embed_ground(self, vec: np.ndarray) -> np.ndarray:
        """Lift a d-dimensional computational vector into the full space."""
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (self.d,):
            raise ValueError(f"expected a {self.d}-component vector, got shape {vec.shape}")
        full = np.zeros(self.dim, dtype=complex)
        full[: self.d] = vec
        return full


def normalize(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return vec / norm


def fidelity(psi: np.ndarray, psi_tilde: np.ndarray) -> float:
    """Overlap magnitude |<psi|psi_tilde>| between two normalized states."""
    psi = np.asarray(psi, dtype=complex)
    psi_tilde = np.asarray(psi_tilde, dtype=complex)
    if psi.shape != psi_tilde.shape:
        raise ValueError(f"state dimensions differ: {psi.shape} vs {psi_tilde.shape}")
    return float(abs(np.vdot(psi, psi_tilde)))


def gate_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Global-phase-invariant distance 1 - |tr(U^dag V)| / n between unitaries.

    Vanishes exactly when U = e^{i alpha} V; insensitive to the overall
    phase of either argument.
    """
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"incompatible gate shapes: {U.shape} vs {V.shape}")
    n = U.shape[0]
    return float(1.0 - abs(np.trace(U.conj().T @ V)) / n)


def unitarity_defect(U: np.ndarray) -> float:
    """Largest entry of |U^dag U - I|."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    return float(np.max(np.abs(U.conj().T @ U - np.eye(n))))


def assert_unitary(U: np.ndarray, atol: float = UNITARY_ATOL) -> None:
    defect = unitarity_defect(U)
    if defect > atol:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e} > {atol:.1e})")


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector: normalized complex standard normals."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_state(dim: int, seed: int) -> np.ndarray:
    """Haar-random state on the computational subspace of a dim-level qudit.

    Returns a 2*dim vector in the shared level layout whose support is the
    ground block only; deterministic for a fixed seed.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    full = np.zeros(2 * dim, dtype=complex)
    full[:dim] = haar_state(dim, rng)
    return full


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The R diagonal is rephased so the distribution is exactly the Haar
    measure (Mezzadri's recipe).
    """
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases

"""Dense pure states and reduced density matrices for one or two qubits.

Basis convention (the single source of truth for index math): for two qubits
the photon is qubit 0 and the high bit, the ancilla is qubit 1 and the low
bit, so ``index = 2 * a_photon + a_ancilla`` and the amplitude order is
(00, 01, 10, 11).
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError

TOLERANCE = 1e-12

PHOTON = 0
ANCILLA = 1


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over 1 or 2 qubits."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amplitudes)

        if amplitudes.size not in (2, 4):
            raise ConfigurationError(
                f"state must hold 2 or 4 amplitudes, got {amplitudes.size}"
            )
        if not np.all(np.isfinite(amplitudes)):
            raise ConfigurationError("state amplitudes must be finite")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > TOLERANCE:
            raise ConfigurationError(f"state is not normalized (norm^2 = {norm!r})")

    @classmethod
    def normalized(cls, amplitudes: Iterable[complex]) -> "PureState":
        """Build a state from unnormalized amplitudes."""
        vector = np.asarray(list(amplitudes), dtype=np.complex128)
        norm = np.linalg.norm(vector)
        if not np.isfinite(norm) or norm <= TOLERANCE:
            raise ConfigurationError("cannot normalize a zero or non-finite vector")
        return cls(vector / norm)

    @classmethod
    def basis(cls, bits: str) -> "PureState":
        """Computational basis ket, e.g. ``basis("01")`` is photon 0, ancilla 1."""
        if not bits or len(bits) > 2 or set(bits) - {"0", "1"}:
            raise ConfigurationError(f"invalid basis label {bits!r}")
        vector = np.zeros(2 ** len(bits), dtype=np.complex128)
        vector[int(bits, 2)] = 1.0
        return cls(vector)

    @property
    def qubit_count(self) -> int:
        return 1 if self.amplitudes.size == 2 else 2

    def tensor(self, other: "PureState") -> "PureState":
        """Product state ``self ⊗ other`` (self becomes the high bit)."""
        if self.qubit_count + other.qubit_count > 2:
            raise ConfigurationError("only 1- and 2-qubit states are supported")
        return PureState(np.kron(self.amplitudes, other.amplitudes))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as psi[a_photon, a_ancilla]."""
        if self.qubit_count != 2:
            raise ConfigurationError("matrix view needs a 2-qubit state")
        return self.amplitudes.reshape(2, 2)

    def check_qubit(self, qubit: int) -> None:
        if not 0 <= qubit < self.qubit_count:
            raise ConfigurationError(
                f"qubit index {qubit} out of range for a {self.qubit_count}-qubit state"
            )


@dataclass(frozen=True)
class DensityMatrix:
    """Single-qubit density operator."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        object.__setattr__(self, "entries", entries)

        if entries.shape != (2, 2):
            raise ConfigurationError(f"density matrix must be 2x2, got {entries.shape}")
        if not np.allclose(entries, entries.conj().T, atol=TOLERANCE, rtol=0):
            raise ConfigurationError("density matrix is not Hermitian")
        if abs(np.trace(entries) - 1.0) > TOLERANCE:
            raise ConfigurationError("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(entries)) < -TOLERANCE:
            raise ConfigurationError("density matrix has a negative eigenvalue")

    @classmethod
    def from_mixture(cls, components: Sequence[tuple[float, PureState]]) -> "DensityMatrix":
        """Σ w |s⟩⟨s| over single-qubit states."""
        entries = np.zeros((2, 2), dtype=np.complex128)
        for weight, state in components:
            if state.qubit_count != 1:
                raise ConfigurationError("mixture components must be single-qubit states")
            entries += weight * np.outer(state.amplitudes, state.amplitudes.conj())
        return cls(entries)

    @property
    def dim(self) -> int:
        return 2


def probabilities(state: PureState) -> np.ndarray:
    """Born-rule probabilities in basis order."""
    return np.abs(state.amplitudes) ** 2


def overlap(s1: PureState, s2: PureState) -> complex:
    """⟨s1|s2⟩."""
    if s1.qubit_count != s2.qubit_count:
        raise ConfigurationError(
            f"dimension mismatch: {s1.qubit_count} vs {s2.qubit_count} qubits"
        )
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def same_ray(s1: PureState, s2: PureState, tol: float = TOLERANCE) -> bool:
    """Equality up to global phase: |⟨s1|s2⟩| = 1."""
    return abs(abs(overlap(s1, s2)) - 1.0) <= tol


def reduced_density_matrix(state: PureState, keep: int) -> DensityMatrix:
    """Partial trace over the qubit that is not kept."""
    if state.qubit_count != 2:
        raise ConfigurationError("partial trace needs a 2-qubit state")
    state.check_qubit(keep)

    psi = state.as_matrix()
    if keep == PHOTON:
        entries = np.einsum("ab,cb->ac", psi, psi.conj())
    else:
        entries = np.einsum("ab,ac->bc", psi, psi.conj())
    return DensityMatrix(entries)

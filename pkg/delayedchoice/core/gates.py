from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from .errors import ConfigurationError
from .state import PureState

SQRT_HALF = 1 / np.sqrt(2)

IDENTITY = np.eye(2, dtype=np.complex128)
HADAMARD = SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=np.complex128)
PROJECT_ZERO = np.diag([1, 0]).astype(np.complex128)
PROJECT_ONE = np.diag([0, 1]).astype(np.complex128)


class GateKind(str, Enum):
    HADAMARD = "hadamard"
    PHASE_SHIFT = "phase_shift"
    ROT_Y = "rot_y"
    CONTROLLED_HADAMARD = "controlled_hadamard"


def phase_shift_matrix(phi: float) -> np.ndarray:
    return np.diag([1, np.exp(1j * phi)]).astype(np.complex128)


def rot_y_matrix(theta: float) -> np.ndarray:
    # RotY(2α)|0⟩ = cos α|0⟩ + sin α|1⟩
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@dataclass(frozen=True)
class Gate:
    """A gate of the interferometer network; `angle` is in radians."""

    kind: GateKind
    target: int
    control: int | None = None
    angle: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is GateKind.CONTROLLED_HADAMARD:
            if self.control is None:
                raise ConfigurationError("controlled Hadamard needs a control qubit")
            if self.control == self.target:
                raise ConfigurationError("control and target must differ")
        elif self.control is not None:
            raise ConfigurationError(f"{self.kind.value} takes no control qubit")
        if not np.isfinite(self.angle):
            raise ConfigurationError("gate angle must be finite")

    @classmethod
    def hadamard(cls, target: int) -> "Gate":
        return cls(GateKind.HADAMARD, target)

    @classmethod
    def phase_shift(cls, target: int, phi: float) -> "Gate":
        return cls(GateKind.PHASE_SHIFT, target, angle=phi)

    @classmethod
    def rot_y(cls, target: int, theta: float) -> "Gate":
        return cls(GateKind.ROT_Y, target, angle=theta)

    @classmethod
    def controlled_hadamard(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CONTROLLED_HADAMARD, target, control=control)

    @property
    def local_matrix(self) -> np.ndarray:
        """2x2 matrix acting on the target."""
        if self.kind is GateKind.PHASE_SHIFT:
            return phase_shift_matrix(self.angle)
        if self.kind is GateKind.ROT_Y:
            return rot_y_matrix(self.angle)
        return HADAMARD

    def adjoint(self) -> "Gate":
        if self.kind in (GateKind.PHASE_SHIFT, GateKind.ROT_Y):
            return Gate(self.kind, self.target, angle=-self.angle)
        # H and C(H) are self-inverse
        return self

    def qubits(self) -> tuple[int, ...]:
        return (self.target,) if self.control is None else (self.control, self.target)


def _kron(operators: list[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, operators)


def full_matrix(gate: Gate, qubit_count: int) -> np.ndarray:
    """Operator on the whole register; qubit 0 is the high bit."""
    for index in gate.qubits():
        if not 0 <= index < qubit_count:
            raise ConfigurationError(
                f"gate index {index} out of range for {qubit_count} qubit(s)"
            )

    if gate.kind is not GateKind.CONTROLLED_HADAMARD:
        operators = [IDENTITY] * qubit_count
        operators[gate.target] = gate.local_matrix
        return _kron(operators)

    idle = [IDENTITY] * qubit_count
    idle[gate.control] = PROJECT_ZERO
    active = [IDENTITY] * qubit_count
    active[gate.control] = PROJECT_ONE
    active[gate.target] = HADAMARD
    return _kron(idle) + _kron(active)


def is_unitary(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    identity = np.eye(matrix.shape[0])
    return bool(np.allclose(matrix.conj().T @ matrix, identity, atol=tol, rtol=0))


def apply_gate(state: PureState, gate: Gate) -> PureState:
    """Apply a gate and return the new state."""
    matrix = full_matrix(gate, state.qubit_count)
    return PureState(matrix @ state.amplitudes)


def apply_circuit(state: PureState, gates: list[Gate]) -> PureState:
    for gate in gates:
        state = apply_gate(state, gate)
    return state

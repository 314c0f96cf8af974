"""Projective single-qubit measurements with collapse."""

from enum import Enum

import numpy as np

from .errors import DegenerateConditionError
from .gates import Gate, apply_gate, full_matrix
from .random import RandomStream
from .state import TOLERANCE, PureState


class Basis(str, Enum):
    COMPUTATIONAL = "computational"
    # outcome 0 is |+⟩, outcome 1 is |−⟩
    DIAGONAL = "diagonal"


def _bit_mask(state: PureState, qubit: int, outcome: int) -> np.ndarray:
    shift = state.qubit_count - 1 - qubit
    indices = np.arange(state.amplitudes.size)
    return ((indices >> shift) & 1) == outcome


def project(state: PureState, qubit: int, basis: Basis, outcome: int) -> tuple[float, np.ndarray]:
    """Unnormalized projection onto one outcome and its Born probability.

    For the diagonal basis the returned vector is expressed back in the
    computational basis, so the measured qubit sits in |+⟩ or |−⟩.
    """
    state.check_qubit(qubit)
    working = apply_gate(state, Gate.hadamard(qubit)) if basis is Basis.DIAGONAL else state

    projected = np.where(_bit_mask(working, qubit, outcome), working.amplitudes, 0)
    if basis is Basis.DIAGONAL:
        projected = full_matrix(Gate.hadamard(qubit), state.qubit_count) @ projected

    probability = float(np.vdot(projected, projected).real)
    return probability, projected


def outcome_probabilities(state: PureState, qubit: int, basis: Basis) -> tuple[float, float]:
    p0, _ = project(state, qubit, basis, 0)
    p1, _ = project(state, qubit, basis, 1)
    return p0, p1


def collapse(state: PureState, qubit: int, basis: Basis, outcome: int) -> tuple[float, PureState]:
    """Post-measurement state for a given outcome."""
    probability, projected = project(state, qubit, basis, outcome)
    if probability <= TOLERANCE:
        raise DegenerateConditionError(
            f"outcome {outcome} on qubit {qubit} has probability {probability!r}",
            details={"qubit": qubit, "outcome": outcome, "basis": basis.value},
        )
    return probability, PureState(projected / np.sqrt(probability))


def measure(state: PureState, qubit: int, basis: Basis, rng: RandomStream) -> tuple[int, PureState]:
    """Sample an outcome with Born probabilities and collapse the state."""
    p0, p1 = outcome_probabilities(state, qubit, basis)
    if p1 <= TOLERANCE:
        outcome = 0
    elif p0 <= TOLERANCE:
        outcome = 1
    else:
        outcome = 0 if rng.uniform() < p0 else 1
    _, collapsed = collapse(state, qubit, basis, outcome)
    return outcome, collapsed

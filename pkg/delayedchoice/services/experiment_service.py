import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from ..core.errors import ConfigurationError, DegenerateConditionError
from ..core.gates import Gate, GateKind, apply_gate
from ..core.logging import get_logger
from ..core.measurement import Basis, measure, project
from ..core.random import RandomStream
from ..core.state import ANCILLA, PHOTON, TOLERANCE, PureState
from ..schemas.experiment import (
    AncillaBasis,
    CircuitStep,
    ControlMode,
    Detector,
    DiagonalPostselectResult,
    DiagonalSign,
    ExperimentConfig,
    InterferencePattern,
    JointDistribution,
    PatternRow,
    PostselectResult,
    Program,
    StepKind,
)

logger = get_logger("experiment")

TWO_PI = 2 * math.pi
# extrema of the D0 pattern, injected into every sweep grid
PATTERN_EXTREMA = (0.0, math.pi)


def _basis(value: AncillaBasis | None) -> Basis:
    return Basis.DIAGONAL if value is AncillaBasis.DIAGONAL else Basis.COMPUTATIONAL


@dataclass(frozen=True)
class MeasurementNode:
    """A measurement in the program; children follow each outcome (None at the end or for p = 0)."""

    qubit: int
    probabilities: tuple[float, float]
    children: tuple["MeasurementNode | None", "MeasurementNode | None"]

    @property
    def p0(self) -> float:
        return self.probabilities[0] / (self.probabilities[0] + self.probabilities[1])


def _step_gate(step: CircuitStep) -> Gate:
    kind = GateKind(step.gate)
    if kind is GateKind.CONTROLLED_HADAMARD:
        return Gate.controlled_hadamard(step.control, step.target)
    return Gate(kind, step.target, angle=step.angle)


class ExperimentService:
    """Delayed-choice networks, closed-form oracles and post-selection."""

    # Photon states

    def particle_state(self, phi: float) -> PureState:
        """(|0⟩ + e^{iφ}|1⟩)/√2: open interferometer."""
        return PureState(np.array([1.0, np.exp(1j * phi)]) / math.sqrt(2))

    def wave_state(self, phi: float) -> PureState:
        """e^{iφ/2}(cos(φ/2)|0⟩ − i sin(φ/2)|1⟩): closed interferometer."""
        half = phi / 2
        return PureState(np.exp(1j * half) * np.array([math.cos(half), -1j * math.sin(half)]))

    # Networks

    def build_circuit(self, config: ExperimentConfig) -> Program:
        """Gate/measurement program for the configured control mode."""
        prepare = [
            CircuitStep(kind=StepKind.GATE, gate=GateKind.ROT_Y.value, target=ANCILLA, angle=2 * config.alpha),
            CircuitStep(kind=StepKind.GATE, gate=GateKind.HADAMARD.value, target=PHOTON),
            CircuitStep(kind=StepKind.GATE, gate=GateKind.PHASE_SHIFT.value, target=PHOTON, angle=config.phi),
        ]

        if config.control_mode is ControlMode.QUANTUM:
            steps = prepare + [
                CircuitStep(
                    kind=StepKind.GATE,
                    gate=GateKind.CONTROLLED_HADAMARD.value,
                    target=PHOTON,
                    control=ANCILLA,
                ),
                CircuitStep(kind=StepKind.MEASURE, target=PHOTON, basis=AncillaBasis.COMPUTATIONAL),
                CircuitStep(kind=StepKind.MEASURE, target=ANCILLA, basis=config.ancilla_basis),
            ]
        else:
            if config.ancilla_basis is not AncillaBasis.COMPUTATIONAL:
                raise ConfigurationError("classical control reads the ancilla in the computational basis")
            steps = prepare + [
                CircuitStep(kind=StepKind.MEASURE, target=ANCILLA, basis=AncillaBasis.COMPUTATIONAL),
                CircuitStep(
                    kind=StepKind.CONDITIONAL_GATE,
                    gate=GateKind.HADAMARD.value,
                    target=PHOTON,
                    condition_qubit=ANCILLA,
                    condition_outcome=1,
                ),
                CircuitStep(kind=StepKind.MEASURE, target=PHOTON, basis=AncillaBasis.COMPUTATIONAL),
            ]

        return Program(control_mode=config.control_mode, steps=steps)

    def initial_state(self) -> PureState:
        return PureState.basis("00")

    def evolve(self, alpha: float, phi: float) -> PureState:
        """Gate-by-gate evolution of the quantum-control network up to readout."""
        program = self.build_circuit(ExperimentConfig(alpha=alpha, phi=phi))
        state = self.initial_state()
        for step in program.steps:
            if step.kind is StepKind.GATE:
                state = apply_gate(state, _step_gate(step))
        return state

    def execute_program(self, program: Program, rng: RandomStream) -> tuple[int, int]:
        """Run one shot; returns (photon_outcome, ancilla_outcome)."""
        state = self.initial_state()
        outcomes: Dict[int, int] = {}

        for step in program.steps:
            if step.kind is StepKind.GATE:
                state = apply_gate(state, _step_gate(step))
            elif step.kind is StepKind.CONDITIONAL_GATE:
                if outcomes.get(step.condition_qubit) == step.condition_outcome:
                    state = apply_gate(state, _step_gate(step))
            else:
                outcomes[step.target], state = measure(state, step.target, _basis(step.basis), rng)

        return outcomes[PHOTON], outcomes[ANCILLA]

    def measurement_tree(self, config: ExperimentConfig) -> MeasurementNode:
        """Branch the program at every measurement; each node holds the collapse probabilities."""
        program = self.build_circuit(config)

        def walk(state: PureState, index: int, outcomes: Dict[int, int]) -> MeasurementNode | None:
            while index < len(program.steps):
                step = program.steps[index]
                if step.kind is StepKind.MEASURE:
                    break
                if step.kind is StepKind.GATE or outcomes.get(step.condition_qubit) == step.condition_outcome:
                    state = apply_gate(state, _step_gate(step))
                index += 1
            else:
                return None

            step = program.steps[index]
            probabilities, children = [], []
            for outcome in (0, 1):
                probability, projected = project(state, step.target, _basis(step.basis), outcome)
                probabilities.append(probability)
                if probability <= 0.0:
                    children.append(None)
                    continue
                collapsed = PureState(projected / math.sqrt(probability))
                children.append(walk(collapsed, index + 1, {**outcomes, step.target: outcome}))
            return MeasurementNode(step.target, tuple(probabilities), tuple(children))

        return walk(self.initial_state(), 0, {})

    def exact_program_distribution(self, config: ExperimentConfig) -> JointDistribution:
        """Exact outcome distribution of the program, averaging over mid-circuit outcomes."""
        totals = np.zeros(4)

        def accumulate(node: MeasurementNode, weight: float, outcomes: Dict[int, int]) -> None:
            for outcome, probability in enumerate(node.probabilities):
                if probability <= 0.0:
                    continue
                reached = {**outcomes, node.qubit: outcome}
                child = node.children[outcome]
                if child is None:
                    totals[2 * reached[PHOTON] + reached[ANCILLA]] += weight * probability
                else:
                    accumulate(child, weight * probability, reached)

        accumulate(self.measurement_tree(config), 1.0, {})
        return JointDistribution.from_array(totals)

    def classical_control_run(self, config: ExperimentConfig, rng: RandomStream) -> tuple[int, int]:
        """Single classically controlled shot: ancilla first, then BS2, then the photon."""
        if config.control_mode is not ControlMode.CLASSICAL:
            raise ConfigurationError("classical_control_run needs control_mode=classical")
        return self.execute_program(self.build_circuit(config), rng)

    # Closed-form oracles

    def final_state(self, alpha: float, phi: float) -> PureState:
        """cos α |particle⟩|0⟩ + sin α |wave⟩|1⟩."""
        zero, one = PureState.basis("0"), PureState.basis("1")
        amplitudes = (
            math.cos(alpha) * self.particle_state(phi).tensor(zero).amplitudes
            + math.sin(alpha) * self.wave_state(phi).tensor(one).amplitudes
        )
        return PureState(amplitudes)

    def joint_distribution(self, alpha: float, phi: float) -> JointDistribution:
        c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
        wave0, wave1 = math.cos(phi / 2) ** 2, math.sin(phi / 2) ** 2
        return JointDistribution(p00=0.5 * c2, p01=s2 * wave0, p10=0.5 * c2, p11=s2 * wave1)

    def intensity(self, alpha: float, phi: float) -> float:
        """D0 pattern I_p cos²α + I_w sin²α."""
        return 0.5 * math.cos(alpha) ** 2 + math.sin(alpha) ** 2 * math.cos(phi / 2) ** 2

    def detector_intensity(self, alpha: float, phi: float, detector: Detector = Detector.D0) -> float:
        value = self.intensity(alpha, phi)
        if detector is Detector.D1:
            value = 1.0 - value
        return min(1.0, max(0.0, value))

    def analytic_visibility(self, alpha: float) -> float:
        return math.sin(alpha) ** 2

    # Sweeps

    def phase_grid(self, steps: int) -> List[float]:
        if steps < 1:
            raise ConfigurationError("phase grid needs at least one point")
        return list(np.linspace(0.0, TWO_PI, steps, endpoint=False))

    def bracketed_grid(self, phi_grid: Sequence[float]) -> List[float]:
        if len(phi_grid) == 0:
            raise ConfigurationError("phi grid is empty")
        grid = [float(phi) for phi in phi_grid]
        for extremum in PATTERN_EXTREMA:
            if not any(abs(((phi - extremum + math.pi) % TWO_PI) - math.pi) <= TOLERANCE for phi in grid):
                grid.append(extremum)
        return sorted(grid)

    def sweep(
        self,
        alpha: float,
        phi_grid: Sequence[float],
        detector: Detector = Detector.D0,
    ) -> InterferencePattern:
        """Interference pattern over φ; 0 and π are added when missing."""
        grid = self.bracketed_grid(phi_grid)
        rows = [PatternRow(phi=phi, intensity=self.detector_intensity(alpha, phi, detector)) for phi in grid]
        logger.debug("sweep alpha=%r over %d points (%s)", alpha, len(rows), detector.value)
        return InterferencePattern.from_rows(alpha, rows, detector=detector)

    def conditional_sweep(
        self,
        alpha: float,
        phi_grid: Sequence[float],
        ancilla_outcome: int,
        detector: Detector = Detector.D0,
    ) -> InterferencePattern:
        """Pattern of the photons whose ancilla gave `ancilla_outcome`."""
        grid = self.bracketed_grid(phi_grid)
        rows = []
        for phi in grid:
            p0, _ = self.postselect(alpha, phi, ancilla_outcome).photon_distribution
            value = p0 if detector is Detector.D0 else 1.0 - p0
            rows.append(PatternRow(phi=phi, intensity=min(1.0, max(0.0, value))))
        return InterferencePattern.from_rows(
            alpha, rows, detector=detector, postselected_outcome=ancilla_outcome
        )

    # Post-selection

    def postselect(self, alpha: float, phi: float, ancilla_outcome: int) -> PostselectResult:
        """Photon distribution given a computational-basis ancilla outcome."""
        if ancilla_outcome not in (0, 1):
            raise ConfigurationError(f"ancilla outcome must be 0 or 1, got {ancilla_outcome}")

        probability, projected = project(self.final_state(alpha, phi), ANCILLA, Basis.COMPUTATIONAL, ancilla_outcome)
        if probability <= TOLERANCE:
            raise DegenerateConditionError(
                f"ancilla outcome {ancilla_outcome} has probability {probability!r} at alpha={alpha!r}",
                details={"alpha": alpha, "phi": phi, "ancilla_outcome": ancilla_outcome},
            )

        photon = projected.reshape(2, 2)[:, ancilla_outcome]
        distribution = np.abs(photon) ** 2 / probability
        return PostselectResult(
            ancilla_outcome=ancilla_outcome,
            photon_distribution=(float(distribution[0]), float(distribution[1])),
            probability=probability,
        )

    def diagonal_postselect(self, alpha: float, phi: float, sign: DiagonalSign) -> tuple[PureState, float]:
        """Photon state cos α|particle⟩ ± sin α|wave⟩ after an ancilla |±⟩ outcome."""
        probability, projected = project(self.final_state(alpha, phi), ANCILLA, Basis.DIAGONAL, sign.outcome)
        if probability <= TOLERANCE:
            raise DegenerateConditionError(
                f"diagonal outcome {sign.value} has vanishing projection at alpha={alpha!r}, phi={phi!r}",
                details={"alpha": alpha, "phi": phi, "sign": sign.value},
            )

        ancilla_ket = np.array([1.0, 1.0 if sign is DiagonalSign.PLUS else -1.0]) / math.sqrt(2)
        photon = projected.reshape(2, 2) @ ancilla_ket.conj()
        return PureState(photon / math.sqrt(probability)), probability

    def diagonal_intensity(self, alpha: float, phi: float, sign: DiagonalSign) -> float:
        photon, _ = self.diagonal_postselect(alpha, phi, sign)
        return float(abs(photon.amplitudes[0]) ** 2)

    def describe_diagonal(self, alpha: float, phi: float, sign: DiagonalSign) -> DiagonalPostselectResult:
        photon, probability = self.diagonal_postselect(alpha, phi, sign)
        amplitudes = photon.amplitudes
        return DiagonalPostselectResult(
            sign=sign,
            amplitudes_re=(float(amplitudes[0].real), float(amplitudes[1].real)),
            amplitudes_im=(float(amplitudes[0].imag), float(amplitudes[1].imag)),
            probability=probability,
            intensity_d0=float(abs(amplitudes[0]) ** 2),
        )


# Global service instance
experiment_service = ExperimentService()

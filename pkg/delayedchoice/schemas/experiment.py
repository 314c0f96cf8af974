import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

PROBABILITY_TOLERANCE = 1e-12
VISIBILITY_TOLERANCE = 1e-9
ALPHA_SLACK = 1e-4


class ControlMode(str, Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


class AncillaBasis(str, Enum):
    COMPUTATIONAL = "computational"
    DIAGONAL = "diagonal"


class Detector(str, Enum):
    D0 = "d0"
    D1 = "d1"


class DiagonalSign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def outcome(self) -> int:
        return 0 if self is DiagonalSign.PLUS else 1


class ExperimentConfig(BaseModel):
    """One run of the delayed-choice network."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., description="Ancilla preparation angle (radians) in [0, π/2]")
    phi: float = Field(..., description="Interferometer phase (radians), stored in [0, 2π)")
    control_mode: ControlMode = Field(ControlMode.QUANTUM, description="Quantum or classical control of BS2")
    ancilla_basis: AncillaBasis = Field(AncillaBasis.COMPUTATIONAL, description="Ancilla readout basis")
    shots: int = Field(1, ge=1, description="Number of shots")
    seed: int = Field(0, ge=-(2 ** 63), lt=2 ** 64, description="64-bit seed")

    @field_validator("alpha", "phi")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("angle must be finite")
        return value

    @field_validator("alpha")
    @classmethod
    def _alpha_range(cls, value: float) -> float:
        # slack admits four-decimal inputs such as 1.5708
        if not -ALPHA_SLACK <= value <= math.pi / 2 + ALPHA_SLACK:
            raise ValueError(f"alpha must lie in [0, pi/2], got {value}")
        return value

    @field_validator("phi")
    @classmethod
    def _wrap_phase(cls, value: float) -> float:
        return value % (2 * math.pi)


class JointDistribution(BaseModel):
    """p(a, b) in basis order a⊗b = (00, 01, 10, 11); a is the photon, b the ancilla."""
    model_config = ConfigDict(frozen=True)

    p00: float
    p01: float
    p10: float
    p11: float

    @model_validator(mode="after")
    def _check_probabilities(self) -> "JointDistribution":
        values = self.as_tuple()
        if any(not math.isfinite(p) or p < -PROBABILITY_TOLERANCE for p in values):
            raise ValueError(f"invalid probabilities {values}")
        if abs(math.fsum(values) - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"probabilities sum to {math.fsum(values)!r}, not 1")
        return self

    @classmethod
    def from_array(cls, values) -> "JointDistribution":
        p00, p01, p10, p11 = (float(v) for v in values)
        return cls(p00=p00, p01=p01, p10=p10, p11=p11)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p00, self.p01, self.p10, self.p11)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    def photon_marginal(self) -> tuple[float, float]:
        """(P(a=0), P(a=1)); P(a=0) is the D0 intensity."""
        return (self.p00 + self.p01, self.p10 + self.p11)

    def ancilla_marginal(self) -> tuple[float, float]:
        return (self.p00 + self.p10, self.p01 + self.p11)

    def max_distance(self, other: "JointDistribution") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


class PatternRow(BaseModel):
    phi: float = Field(..., description="Phase (radians)")
    intensity: float = Field(..., ge=0.0, le=1.0, description="Detector click probability")


def grid_visibility(intensities) -> float:
    """(Imax − Imin)/(Imax + Imin) over sampled intensities."""
    values = np.asarray(intensities, dtype=float)
    i_max, i_min = float(values.max()), float(values.min())
    if i_max + i_min <= 0.0:
        return 0.0
    return (i_max - i_min) / (i_max + i_min)


class InterferencePattern(BaseModel):
    """Detector intensity over a φ grid with its visibility."""
    alpha: float = Field(..., description="Ancilla preparation angle (radians)")
    detector: Detector = Field(Detector.D0, description="Detector the pattern belongs to")
    postselected_outcome: Optional[int] = Field(None, description="Ancilla outcome conditioned on, if any")
    shots_per_point: Optional[int] = Field(None, description="Shots per φ point for sampled patterns")
    rows: List[PatternRow] = Field(..., min_length=1, description="(phi, intensity) rows")
    visibility: float = Field(..., ge=0.0, le=1.0, description="Visibility from the rows' extrema")

    @model_validator(mode="after")
    def _check_visibility(self) -> "InterferencePattern":
        computed = grid_visibility([row.intensity for row in self.rows])
        if abs(computed - self.visibility) > VISIBILITY_TOLERANCE:
            raise ValueError(f"stored visibility {self.visibility!r} differs from rows ({computed!r})")
        return self

    @classmethod
    def from_rows(cls, alpha: float, rows: List[PatternRow], **extra) -> "InterferencePattern":
        return cls(
            alpha=alpha,
            rows=rows,
            visibility=grid_visibility([row.intensity for row in rows]),
            **extra,
        )


class StepKind(str, Enum):
    GATE = "gate"
    MEASURE = "measure"
    CONDITIONAL_GATE = "conditional_gate"


class CircuitStep(BaseModel):
    """One instruction of a gate/measurement program."""
    model_config = ConfigDict(frozen=True)

    kind: StepKind
    gate: Optional[str] = Field(None, description="Gate kind for gate steps")
    target: int = Field(..., description="Target (or measured) qubit")
    control: Optional[int] = Field(None, description="Quantum control qubit")
    angle: float = Field(0.0, description="Gate angle (radians)")
    basis: Optional[AncillaBasis] = Field(None, description="Basis for measure steps")
    condition_qubit: Optional[int] = Field(None, description="Classical condition: measured qubit")
    condition_outcome: Optional[int] = Field(None, description="Classical condition: required outcome")


class Program(BaseModel):
    """Ordered gate/measurement program for one control mode."""
    control_mode: ControlMode
    steps: List[CircuitStep]


class PostselectResult(BaseModel):
    """Photon statistics conditioned on a computational-basis ancilla outcome."""
    ancilla_outcome: int
    photon_distribution: tuple[float, float]
    probability: float


class DiagonalPostselectResult(BaseModel):
    """Photon state left after a diagonal-basis ancilla outcome."""
    sign: DiagonalSign
    amplitudes_re: tuple[float, float]
    amplitudes_im: tuple[float, float]
    probability: float
    intensity_d0: float = Field(..., description="P(a=0) of the conditional photon state")

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .experiment import ControlMode, ExperimentConfig, JointDistribution


class ClickCounts(BaseModel):
    """Detector clicks per joint outcome (photon a, ancilla b)."""
    n00: int = Field(..., ge=0)
    n01: int = Field(..., ge=0)
    n10: int = Field(..., ge=0)
    n11: int = Field(..., ge=0)
    shots: int = Field(..., ge=1)
    seed: int
    mode: ControlMode
    rng_algorithm: str = Field(..., description="Random stream algorithm identifier")

    @model_validator(mode="after")
    def _check_total(self) -> "ClickCounts":
        if sum(self.as_tuple()) != self.shots:
            raise ValueError(f"counts sum to {sum(self.as_tuple())}, expected {self.shots}")
        return self

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n00, self.n01, self.n10, self.n11)


class GoodnessOfFit(BaseModel):
    """Pearson chi-square of clicks against an exact distribution."""
    model_config = ConfigDict(populate_by_name=True)

    chi_square: float = Field(..., ge=0.0)
    degrees_of_freedom: int = Field(..., ge=0)
    threshold: float = Field(..., description="Critical value at the significance level")
    significance: float
    p_value: float
    pooled_cells: list[str] = Field(default_factory=list, description="Cells merged for low expectation")
    zero_cell_violations: int = Field(0, ge=0, description="Clicks in zero-probability cells")
    passed: bool = Field(..., alias="pass", description="Fit accepted at the stated threshold")


class SampleReport(BaseModel):
    """Everything `sample` emits for one configuration."""
    config: ExperimentConfig
    counts: ClickCounts
    empirical: JointDistribution
    expected: JointDistribution
    fit: GoodnessOfFit

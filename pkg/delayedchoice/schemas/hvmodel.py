from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

PARAM_NAMES = ("x", "y", "z", "v", "f")


class HVBranch(str, Enum):
    WAVE_ACTS_AS_PARTICLE = "WaveActsAsParticle"
    PARTICLE_ACTS_AS_WAVE = "ParticleActsAsWave"
    SUPERDETERMINISTIC = "Superdeterministic"
    DEGENERATE_ALPHA = "DegenerateAlpha"
    # feasible at tolerance but farther than 2x grid spacing from every family
    UNCLASSIFIED = "Unclassified"
    INFEASIBLE = "Infeasible"


INCONSISTENT_BRANCHES = frozenset(
    {HVBranch.WAVE_ACTS_AS_PARTICLE, HVBranch.PARTICLE_ACTS_AS_WAVE}
)


class HVParams(BaseModel):
    """Free parameters of the binary hidden-variable model.

    x = p(a=0 | b=0, λ=wave), y = p(a=0 | b=1, λ=particle),
    z = p(b=0 | λ=particle), v = p(b=0 | λ=wave), f = p(λ=particle).
    Range checks live in the service so they surface as DomainError.
    """
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    z: float
    v: float
    f: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.x, self.y, self.z, self.v, self.f)


class Setting(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., allow_inf_nan=False)
    phi: float = Field(..., allow_inf_nan=False)


class HVSolution(BaseModel):
    params: HVParams
    residual: float = Field(..., ge=0.0)
    branch: HVBranch
    branches: List[HVBranch] = Field(default_factory=list, description="All matching tags (multi-branch ties)")


class HVFamily(BaseModel):
    """One solution family of the factored constraint system."""
    name: str
    branches: List[HVBranch]
    pinned: Dict[str, float] = Field(..., description="Coordinates fixed by the family")
    free: List[str] = Field(..., description="Coordinates left undetermined")
    relation: Optional[str] = Field(None, description="Remaining equation on the other coordinates")
    representative: HVSolution

    @property
    def inconsistent(self) -> bool:
        return any(branch in INCONSISTENT_BRANCHES for branch in self.branches)


class SettingFinding(BaseModel):
    setting: Setting
    ancilla_p0: float = Field(..., description="cos²α, the required ancilla marginal")
    superdeterministic_f: float
    families: List[HVFamily]
    grid_points: int
    unclassified_points: int


class VerdictReport(BaseModel):
    verdict: str
    settings: List[SettingFinding]
    cross_setting_feasible_points: int = Field(..., description="Grid points feasible at every setting")
    marginal_lower_bound: float = Field(..., description="Lower bound on any single model's residual")
    best_cross_setting_residual: float
    particle_as_wave_spread: float = Field(..., description="max−min of cos²(φ_j/2): what a fixed y must match")
    superdeterministic_tracks_alpha: bool
    perfect_correlation: List[List[float]] = Field(..., description="p(b|λ) rows for λ = particle, wave")
    readings: Dict[str, str]


class GridSearchReport(BaseModel):
    setting: Setting
    resolution: float
    tolerance: float
    anchored: bool
    points: int = Field(..., description="Feasible grid points")
    unclassified: int = Field(..., description="Feasible points outside every enumerated family")
    solutions: List[HVSolution]

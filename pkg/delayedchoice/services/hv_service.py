"""Binary hidden-variable model of the delayed-choice statistics.

The model writes p(a, b) = Σ_λ p(a|b, λ) p(b|λ) p(λ) with λ ∈ {particle, wave}.
A particle in an open interferometer (b=0) gives (½, ½) and a wave in a closed
one (b=1) gives (cos²(φ/2), sin²(φ/2)); the remaining freedom is the five
numbers of ``HVParams``. Matching the quantum statistics reduces to three
factored equations

    e1 = v(1−f)(x − ½)
    e2 = f(1−z)(y − cos²(φ/2))
    e3 = zf + v(1−f) − cos²α

whose solution families are enumerated analytically and checked against a
brute-force grid.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Sequence

import numpy as np

from ..core.config import settings
from ..core.errors import ConfigurationError, DomainError
from ..core.logging import get_logger
from ..schemas.experiment import JointDistribution
from ..schemas.hvmodel import (
    PARAM_NAMES,
    GridSearchReport,
    HVBranch,
    HVFamily,
    HVParams,
    HVSolution,
    Setting,
    SettingFinding,
    VerdictReport,
)
from .experiment_service import experiment_service

logger = get_logger("hvmodel")

NO_CONSISTENT_HV_MODEL = "NO_CONSISTENT_HV_MODEL"
INCONCLUSIVE = "INCONCLUSIVE"

GRID_RESOLUTIONS = (0.05, 0.02, 0.01)
# classification radius in grid spacings
MATCH_SPACINGS = 2.0
# phases at which the constraint system trivializes
DEGENERATE_PHASES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
GENERIC_TOLERANCE = 1e-6

BRANCH_ORDER = (
    HVBranch.WAVE_ACTS_AS_PARTICLE,
    HVBranch.PARTICLE_ACTS_AS_WAVE,
    HVBranch.SUPERDETERMINISTIC,
)
# tags of families that break across settings or need superdeterminism
UNACCEPTABLE_BRANCHES = frozenset(BRANCH_ORDER)


def wave_fringe(phi: float) -> float:
    """cos²(φ/2), the closed-interferometer D0 probability."""
    return math.cos(phi / 2) ** 2


def _mismatch_block(x, y, z, v, f, k: float, c: float):
    """hv_predict − quantum statistics, entrywise; broadcasts over arrays."""
    d00 = 0.5 * z * f + x * v * (1 - f) - 0.5 * k
    d01 = y * (1 - z) * f + c * (1 - v) * (1 - f) - (1 - k) * c
    d10 = 0.5 * z * f + (1 - x) * v * (1 - f) - 0.5 * k
    d11 = (1 - y) * (1 - z) * f + (1 - c) * (1 - v) * (1 - f) - (1 - k) * (1 - c)
    return d00, d01, d10, d11


def _scan_partition(task: tuple) -> np.ndarray:
    """Feasible (x, y, z, v, f, residual) rows for a slice of (z, v, f) triples.

    The residual separates: entries a=·,b=0 depend on x only, entries b=1 on
    y only, so the feasible set for each triple is a product of two 1-D sets.
    """
    triples, x_axis, y_axis, k, c, tol = task
    rows = []
    for z, v, f in triples:
        d00, _, d10, _ = _mismatch_block(x_axis, 0.0, z, v, f, k, c)
        x_err = np.maximum(np.abs(d00), np.abs(d10))
        _, d01, _, d11 = _mismatch_block(0.0, y_axis, z, v, f, k, c)
        y_err = np.maximum(np.abs(d01), np.abs(d11))

        xs = np.nonzero(x_err < tol)[0]
        ys = np.nonzero(y_err < tol)[0]
        for i in xs:
            for j in ys:
                rows.append((x_axis[i], y_axis[j], z, v, f, max(x_err[i], y_err[j])))
    return np.array(rows, dtype=float).reshape(-1, 6)


class HVService:
    """Hidden-variable predictions, constraint reduction and the no-go search."""

    def __init__(self, workers: int | None = None):
        self.workers = workers or settings.WORKERS

    # Model

    def validate(self, params: HVParams) -> HVParams:
        for name, value in zip(PARAM_NAMES, params.as_tuple()):
            if not (0.0 <= value <= 1.0):
                raise DomainError(f"{name}={value!r} lies outside [0, 1]", details={name: value})
        return params

    def hv_predict(self, params: HVParams, phi: float) -> JointDistribution:
        """Σ_λ p(a|b,λ) p(b|λ) p(λ) with the particle/wave conditionals fixed."""
        self.validate(params)
        x, y, z, v, f = params.as_tuple()
        c = wave_fringe(phi)

        particle, wave = f, 1 - f
        return JointDistribution(
            p00=0.5 * z * particle + x * v * wave,
            p01=y * (1 - z) * particle + c * (1 - v) * wave,
            p10=0.5 * z * particle + (1 - x) * v * wave,
            p11=(1 - y) * (1 - z) * particle + (1 - c) * (1 - v) * wave,
        )

    def ancilla_marginal(self, params: HVParams) -> tuple[float, float]:
        """p(b) = Σ_λ p(b|λ) p(λ); independent of the setting."""
        _, _, z, v, f = self.validate(params).as_tuple()
        p0 = z * f + v * (1 - f)
        return (p0, 1 - p0)

    def correlation_table(self, params: HVParams) -> List[List[float]]:
        """Rows p(b|λ=particle), p(b|λ=wave)."""
        _, _, z, v, _ = self.validate(params).as_tuple()
        return [[z, 1 - z], [v, 1 - v]]

    def residual(self, params: HVParams, setting_list: Sequence[Setting]) -> float:
        """Largest entrywise deviation from the quantum statistics over all settings."""
        if not setting_list:
            raise ConfigurationError("residual needs at least one setting")
        worst = 0.0
        for setting in setting_list:
            predicted = self.hv_predict(params, setting.phi)
            exact = experiment_service.joint_distribution(setting.alpha, setting.phi)
            worst = max(worst, predicted.max_distance(exact))
        return worst

    # Constraint reduction

    def constraint_equations(self, params: HVParams, setting: Setting) -> tuple[float, float, float]:
        x, y, z, v, f = params.as_tuple()
        c = wave_fringe(setting.phi)
        k = math.cos(setting.alpha) ** 2
        e1 = v * (1 - f) * (x - 0.5)
        e2 = f * (1 - z) * (y - c)
        e3 = z * f + v * (1 - f) - k
        return e1, e2, e3

    def mismatch_from_constraints(self, params: HVParams, setting: Setting) -> tuple[float, float, float, float]:
        """hv_predict − quantum statistics rebuilt from (e1, e2, e3) alone."""
        e1, e2, e3 = self.constraint_equations(params, setting)
        c = wave_fringe(setting.phi)
        return (e1 + 0.5 * e3, e2 - c * e3, -e1 + 0.5 * e3, -e2 - (1 - c) * e3)

    def equivalence_check(self, params: HVParams, setting: Setting, tol: float | None = None) -> bool:
        """Statistics match ⟺ constraints vanish, up to the factor c in each direction.

        The mismatch d is a linear image of e = (e1, e2, e3) and back:
        max|d| ≤ 2 max|e| (d01 = e2 − c·e3) and max|e| ≤ 2 max|d| (e3 = d00 + d10).
        So residual < tol ⇒ max|e| < c·tol, and max|e| < tol/c ⇒ residual < tol,
        with c = EQUIVALENCE_FACTOR = 2 for both. Between tol/c and c·tol either
        side may hold alone.
        """
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE
        factor = settings.EQUIVALENCE_FACTOR
        matches = self.residual(params, [setting]) < tol
        largest = max(abs(e) for e in self.constraint_equations(params, setting))
        return (not matches or largest < factor * tol) and (largest >= tol / factor or matches)

    # Settings

    def is_degenerate_alpha(self, alpha: float, tol: float | None = None) -> bool:
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE
        k = math.cos(alpha) ** 2
        return k <= tol or k >= 1 - tol

    def is_generic(self, setting: Setting, tol: float = GENERIC_TOLERANCE) -> bool:
        if self.is_degenerate_alpha(setting.alpha, tol):
            return False
        phase = setting.phi % (2 * math.pi)
        return all(
            abs(((phase - special + math.pi) % (2 * math.pi)) - math.pi) > tol
            for special in DEGENERATE_PHASES
        )

    # Solution families

    def _solution(self, values: Iterable[float], setting: Setting, branches: List[HVBranch]) -> HVSolution:
        params = HVParams(**dict(zip(PARAM_NAMES, (float(v) for v in values))))
        return HVSolution(
            params=params,
            residual=self.residual(params, [setting]),
            branch=branches[0],
            branches=branches,
        )

    def enumerate_branches(self, setting: Setting, tol: float | None = None) -> List[HVFamily]:
        """Every family solving e1 = e2 = e3 = 0, one factor of e1 and of e2 at a time."""
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE
        k = math.cos(setting.alpha) ** 2
        c = wave_fringe(setting.phi)

        if self.is_degenerate_alpha(setting.alpha, tol):
            if k >= 0.5:
                pinned, values = {"f": 1.0, "z": 1.0}, (0.5, c, 1.0, 0.0, 1.0)
                relation = "cos²α = 1: all photons are particles in an open interferometer"
            else:
                pinned, values = {"v": 0.0, "f": 0.0}, (0.5, c, 0.0, 0.0, 0.0)
                relation = "cos²α = 0: all photons are waves in a closed interferometer"
            branches = [HVBranch.DEGENERATE_ALPHA]
            return [
                HVFamily(
                    name="degenerate-alpha",
                    branches=branches,
                    pinned=pinned,
                    free=[name for name in PARAM_NAMES if name not in pinned],
                    relation=relation,
                    representative=self._solution(values, setting, branches),
                )
            ]

        # x, y representatives far from ½ and c where they are free
        free_x = 0.0
        free_y = 0.0 if c > 0.5 else 1.0
        wave_as_particle = [HVBranch.WAVE_ACTS_AS_PARTICLE]
        particle_as_wave = [HVBranch.PARTICLE_ACTS_AS_WAVE]

        f_mix = (1 + k) / 2
        f_half = k / 2
        candidates = [
            ("superdeterministic", [HVBranch.SUPERDETERMINISTIC], {"v": 0.0, "z": 1.0, "f": k},
             ["x", "y"], None, (free_x, free_y, 1.0, 0.0, k)),
            ("no-wave-in-open/particle-as-wave", particle_as_wave, {"v": 0.0, "y": c},
             ["x"], "z·f = cos²α", (free_x, c, k / f_mix, 0.0, f_mix)),
            ("all-particles/particle-as-wave", particle_as_wave, {"f": 1.0, "y": c},
             ["x", "v"], "z = cos²α", (free_x, c, k, 0.5, 1.0)),
            ("all-waves/wave-as-particle", wave_as_particle, {"x": 0.5, "f": 0.0},
             ["y", "z"], "v = cos²α", (0.5, free_y, 0.5, k, 0.0)),
            ("particles-open/wave-as-particle", wave_as_particle, {"x": 0.5, "z": 1.0},
             ["y"], "f + v(1−f) = cos²α", (0.5, free_y, 1.0, (k - f_half) / (1 - f_half), f_half)),
            ("both-inconsistent", wave_as_particle + particle_as_wave, {"x": 0.5, "y": c},
             [], "z·f + v(1−f) = cos²α", (0.5, c, k, k, 0.5)),
        ]

        families = [
            HVFamily(
                name=name,
                branches=branches,
                pinned=pinned,
                free=free,
                relation=relation,
                representative=self._solution(values, setting, branches),
            )
            for name, branches, pinned, free, relation, values in candidates
        ]
        logger.debug("enumerated %d families at alpha=%r phi=%r", len(families), setting.alpha, setting.phi)
        return families

    def family_distance(self, params: HVParams, family: HVFamily) -> float:
        """Max-norm distance on the family's pinned coordinates."""
        values = params.model_dump()
        return max(abs(values[name] - target) for name, target in family.pinned.items())

    def classify(
        self,
        params: HVParams,
        setting: Setting,
        tol: float | None = None,
        spacing: float | None = None,
        families: List[HVFamily] | None = None,
        residual: float | None = None,
    ) -> HVSolution:
        """Tag a candidate with every family it lies near; ties stay multi-branch."""
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE
        value = self.residual(params, [setting]) if residual is None else residual
        if value > tol:
            return HVSolution(params=params, residual=value, branch=HVBranch.INFEASIBLE, branches=[HVBranch.INFEASIBLE])

        families = families if families is not None else self.enumerate_branches(setting, tol)
        radius = MATCH_SPACINGS * spacing if spacing else math.sqrt(tol)
        matched = {
            branch
            for family in families
            if self.family_distance(params, family) <= radius
            for branch in family.branches
        }
        if HVBranch.DEGENERATE_ALPHA in matched:
            branches = [HVBranch.DEGENERATE_ALPHA]
        else:
            branches = [branch for branch in BRANCH_ORDER if branch in matched] or [HVBranch.UNCLASSIFIED]
        return HVSolution(params=params, residual=value, branch=branches[0], branches=branches)

    # Brute force

    def grid_axes(self, setting: Setting, resolution: float, anchored: bool = True) -> List[np.ndarray]:
        """x, y, z, v, f axes; anchored axes also carry ½, cos²(φ/2) and cos²α."""
        base = np.round(np.linspace(0.0, 1.0, int(round(1 / resolution)) + 1), 12)
        if not anchored:
            return [base] * 5
        k = math.cos(setting.alpha) ** 2
        c = wave_fringe(setting.phi)
        anchors = {"x": [0.5], "y": [c], "z": [k], "v": [k], "f": [k]}
        return [np.unique(np.concatenate([base, anchors[name]])) for name in PARAM_NAMES]

    def grid_search(
        self,
        setting: Setting,
        resolution: float,
        tol: float | None = None,
        anchored: bool = True,
        workers: int | None = None,
    ) -> List[HVSolution]:
        """All grid points of [0,1]^5 with residual < tol, each classified."""
        if not any(math.isclose(resolution, allowed) for allowed in GRID_RESOLUTIONS):
            raise ConfigurationError(f"resolution must be one of {GRID_RESOLUTIONS}, got {resolution}")
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE if anchored else resolution / 4
        workers = workers or self.workers

        k = math.cos(setting.alpha) ** 2
        c = wave_fringe(setting.phi)
        x_axis, y_axis, z_axis, v_axis, f_axis = self.grid_axes(setting, resolution, anchored)

        # |e3| = |d00 + d10| ≤ 2·residual prunes (z, v, f) before x and y are scanned
        z, v, f = np.meshgrid(z_axis, v_axis, f_axis, indexing="ij")
        e3 = z * f + v * (1 - f) - k
        keep = np.abs(e3) < 2 * tol
        triples = np.stack([z[keep], v[keep], f[keep]], axis=1)

        chunks = [chunk for chunk in np.array_split(triples, max(workers, 1)) if len(chunk)]
        tasks = [(chunk, x_axis, y_axis, k, c, tol) for chunk in chunks]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                parts = list(executor.map(_scan_partition, tasks))
        else:
            parts = [_scan_partition(task) for task in tasks]

        rows = np.concatenate(parts) if parts else np.empty((0, 6))
        logger.info(
            "grid search alpha=%r phi=%r res=%s: %d triples kept, %d feasible points",
            setting.alpha, setting.phi, resolution, len(triples), len(rows),
        )

        families = self.enumerate_branches(setting, tol)
        solutions = [
            self.classify(
                HVParams(x=row[0], y=row[1], z=row[2], v=row[3], f=row[4]),
                setting,
                tol=tol,
                spacing=resolution,
                families=families,
                residual=float(row[5]),
            )
            for row in rows
        ]
        solutions.sort(key=lambda s: (s.residual, s.params.as_tuple()))
        return solutions

    def search_report(
        self,
        setting: Setting,
        resolution: float,
        tol: float | None = None,
        anchored: bool = True,
        workers: int | None = None,
    ) -> GridSearchReport:
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE if anchored else resolution / 4
        solutions = self.grid_search(setting, resolution, tol=tol, anchored=anchored, workers=workers)
        return GridSearchReport(
            setting=setting,
            resolution=resolution,
            tolerance=tol,
            anchored=anchored,
            points=len(solutions),
            unclassified=sum(1 for s in solutions if s.branch is HVBranch.UNCLASSIFIED),
            solutions=solutions,
        )

    # Multi-setting verdict

    def best_residual(self, points: np.ndarray, setting_list: Sequence[Setting]) -> float:
        """Smallest multi-setting residual among candidate rows (x, y, z, v, f)."""
        if len(points) == 0:
            return math.inf
        x, y, z, v, f = points.T
        worst = np.zeros(len(points))
        for setting in setting_list:
            k = math.cos(setting.alpha) ** 2
            mismatch = _mismatch_block(x, y, z, v, f, k, wave_fringe(setting.phi))
            worst = np.maximum(worst, np.max(np.abs(np.stack(mismatch)), axis=0))
        return float(worst.min())

    def _check_settings(self, setting_list: Sequence[Setting]) -> None:
        alphas = {round(s.alpha, 9) for s in setting_list}
        phis = {round(s.phi % (2 * math.pi), 9) for s in setting_list}
        if len(alphas) < 2 or len(phis) < 2:
            raise ConfigurationError(
                "verdict needs at least two distinct alpha values and two distinct phi values",
                details={"alphas": sorted(alphas), "phis": sorted(phis)},
            )
        degenerate = [s for s in setting_list if not self.is_generic(s)]
        if degenerate:
            raise ConfigurationError(
                "verdict settings must be generic",
                details={"degenerate": [s.model_dump() for s in degenerate]},
            )

    def verdict(
        self,
        setting_list: Sequence[Setting],
        tol: float | None = None,
        resolution: float = 0.05,
    ) -> VerdictReport:
        """Cross-setting feasibility of a realistic particle/wave hidden variable."""
        if tol is None:
            tol = settings.ANALYTIC_TOLERANCE
        self._check_settings(setting_list)

        findings: List[SettingFinding] = []
        feasible_sets = []
        solution_sets = []
        candidates: set[tuple] = set()
        for setting in setting_list:
            families = self.enumerate_branches(setting, tol)
            solutions = self.grid_search(setting, resolution, tol=tol)
            feasible_sets.append({tuple(np.round(s.params.as_tuple(), 12)) for s in solutions})
            solution_sets.append(solutions)
            candidates.update(s.params.as_tuple() for s in solutions)

            superdeterministic = next(f for f in families if HVBranch.SUPERDETERMINISTIC in f.branches)
            findings.append(
                SettingFinding(
                    setting=setting,
                    ancilla_p0=math.cos(setting.alpha) ** 2,
                    superdeterministic_f=superdeterministic.pinned["f"],
                    families=families,
                    grid_points=len(solutions),
                    unclassified_points=sum(1 for s in solutions if s.branch is HVBranch.UNCLASSIFIED),
                )
            )

        common = set.intersection(*feasible_sets)
        ancilla = [finding.ancilla_p0 for finding in findings]
        marginal_bound = 0.25 * (max(ancilla) - min(ancilla))
        best = self.best_residual(np.array(sorted(candidates)).reshape(-1, 5), setting_list)

        fringes = sorted({wave_fringe(s.phi) for s in setting_list})
        spread = fringes[-1] - fringes[0]

        tracks = all(abs(f.superdeterministic_f - f.ancilla_p0) <= tol for f in findings) and len(
            {round(f.superdeterministic_f, 9) for f in findings}
        ) > 1
        only_unacceptable = all(
            solution.branches and set(solution.branches) <= UNACCEPTABLE_BRANCHES
            for solutions in solution_sets
            for solution in solutions
        )
        no_strays = all(finding.unclassified_points == 0 for finding in findings)

        correlation = self.correlation_table(findings[0].families[0].representative.params)
        outcome = (
            NO_CONSISTENT_HV_MODEL
            if not common and best > tol and only_unacceptable and no_strays and tracks
            else INCONCLUSIVE
        )
        logger.info("verdict over %d settings: %s", len(setting_list), outcome)

        return VerdictReport(
            verdict=outcome,
            settings=findings,
            cross_setting_feasible_points=len(common),
            marginal_lower_bound=marginal_bound,
            best_cross_setting_residual=best,
            particle_as_wave_spread=spread,
            superdeterministic_tracks_alpha=tracks,
            perfect_correlation=correlation,
            readings={
                "phi_dependent_xy": (
                    "per setting, every solution makes waves show particle statistics (x=1/2), "
                    "particles interfere (y=cos^2(phi/2)), or draws lambda with f=cos^2(alpha) "
                    "perfectly correlated with the ancilla"
                ),
                "phi_independent_xy": (
                    f"a fixed y must equal cos^2(phi_j/2) at every phase; those values spread by {spread:.6f}"
                ),
            },
        )


# Global service instance
hv_service = HVService()

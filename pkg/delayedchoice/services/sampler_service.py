from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence

import numpy as np
from scipy.stats import chi2

from ..core.config import settings
from ..core.errors import ConfigurationError
from ..core.logging import get_logger
from ..core.random import ALGORITHM, RandomStream
from ..core.state import ANCILLA, PHOTON
from ..schemas.experiment import (
    AncillaBasis,
    ControlMode,
    ExperimentConfig,
    InterferencePattern,
    JointDistribution,
    PatternRow,
)
from ..schemas.sampler import ClickCounts, GoodnessOfFit
from .experiment_service import MeasurementNode, experiment_service

logger = get_logger("sampler")

CELL_NAMES = ("00", "01", "10", "11")
MIN_EXPECTED = 5.0
MIN_SWEEP_SHOTS = 100


class SamplerService:
    """Seeded click generation and statistical checks."""

    def __init__(self, shots_per_batch: int | None = None, workers: int | None = None):
        self.shots_per_batch = shots_per_batch or settings.SHOTS_PER_BATCH
        self.workers = workers or settings.WORKERS

    def _batches(self, shots: int) -> List[int]:
        full, rest = divmod(shots, self.shots_per_batch)
        return [self.shots_per_batch] * full + ([rest] if rest else [])

    def _multinomial_batch(self, probabilities: np.ndarray, stream: RandomStream, shots: int) -> np.ndarray:
        return stream.multinomial(shots, probabilities)

    def _sequential_batch(self, tree: MeasurementNode, stream: RandomStream, shots: int) -> np.ndarray:
        """Shot-by-shot collapse: the first measurement picks a branch, the second samples within it."""
        first = (stream.uniform(shots) >= tree.p0).astype(np.int64)

        second_p0 = np.array([child.p0 if child is not None else 1.0 for child in tree.children])
        second = (stream.uniform(shots) >= second_p0[first]).astype(np.int64)

        second_qubit = next(child.qubit for child in tree.children if child is not None)
        outcomes = {tree.qubit: first, second_qubit: second}
        return np.bincount(2 * outcomes[PHOTON] + outcomes[ANCILLA], minlength=4)

    def sample_clicks(self, config: ExperimentConfig, group: int = 0) -> ClickCounts:
        """Click counts for `config.shots` shots; identical for identical (config, seed, group)."""
        if config.control_mode is ControlMode.QUANTUM:
            if config.ancilla_basis is AncillaBasis.COMPUTATIONAL:
                exact = experiment_service.joint_distribution(config.alpha, config.phi)
            else:
                exact = experiment_service.exact_program_distribution(config)
            probabilities = np.clip(exact.as_array(), 0.0, None)
            probabilities /= probabilities.sum()

            def run(index: int, shots: int) -> np.ndarray:
                return self._multinomial_batch(probabilities, RandomStream(config.seed, index, group), shots)
        else:
            tree = experiment_service.measurement_tree(config)

            def run(index: int, shots: int) -> np.ndarray:
                return self._sequential_batch(tree, RandomStream(config.seed, index, group), shots)

        batches = self._batches(config.shots)
        if self.workers > 1 and len(batches) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                parts = list(executor.map(run, range(len(batches)), batches))
        else:
            parts = [run(index, shots) for index, shots in enumerate(batches)]

        totals = np.sum(parts, axis=0)
        logger.debug(
            "sampled %d shots in %d batch(es), mode=%s, seed=%d",
            config.shots, len(batches), config.control_mode.value, config.seed,
        )
        return ClickCounts(
            n00=int(totals[0]),
            n01=int(totals[1]),
            n10=int(totals[2]),
            n11=int(totals[3]),
            shots=config.shots,
            seed=config.seed,
            mode=config.control_mode,
            rng_algorithm=ALGORITHM,
        )

    def empirical_distribution(self, counts: ClickCounts) -> JointDistribution:
        return JointDistribution.from_array(np.array(counts.as_tuple(), dtype=float) / counts.shots)

    def goodness_of_fit(
        self,
        counts: ClickCounts,
        expected: JointDistribution,
        significance: float | None = None,
    ) -> GoodnessOfFit:
        """Pearson chi-square; cells expecting fewer than 5 clicks are pooled."""
        significance = significance or settings.CHI_SQUARE_SIGNIFICANCE
        observed = np.array(counts.as_tuple(), dtype=float)
        expected_counts = expected.as_array() * counts.shots

        zero_cells = expected.as_array() <= 0.0
        violations = int(np.sum(observed[zero_cells] > 0))

        regular = [i for i in range(4) if not zero_cells[i] and expected_counts[i] >= MIN_EXPECTED]
        pooled = [i for i in range(4) if not zero_cells[i] and expected_counts[i] < MIN_EXPECTED]

        cells = [(observed[i], expected_counts[i]) for i in regular]
        if pooled:
            pooled_cell = (observed[pooled].sum(), expected_counts[pooled].sum())
            if pooled_cell[1] < MIN_EXPECTED and cells:
                # still too small: fold into the smallest regular cell
                smallest = min(range(len(cells)), key=lambda k: cells[k][1])
                o, e = cells[smallest]
                cells[smallest] = (o + pooled_cell[0], e + pooled_cell[1])
            else:
                cells.append(pooled_cell)

        statistic = float(sum((o - e) ** 2 / e for o, e in cells if e > 0))
        dof = max(len(cells) - 1, 0)
        if dof > 0:
            threshold = float(chi2.isf(significance, dof))
            p_value = float(chi2.sf(statistic, dof))
            within = statistic < threshold
        else:
            within = statistic == 0.0
            threshold, p_value = 0.0, (1.0 if within else 0.0)

        return GoodnessOfFit(
            chi_square=statistic,
            degrees_of_freedom=dof,
            threshold=threshold,
            significance=significance,
            p_value=p_value,
            pooled_cells=[CELL_NAMES[i] for i in pooled],
            zero_cell_violations=violations,
            passed=within and violations == 0,
        )

    def sampled_sweep(
        self,
        alpha: float,
        phi_grid: Sequence[float],
        shots_per_point: int,
        seed: int,
    ) -> InterferencePattern:
        """D0 pattern estimated from clicks; each φ point has its own stream group."""
        if shots_per_point < MIN_SWEEP_SHOTS:
            raise ConfigurationError(f"sampled sweeps need at least {MIN_SWEEP_SHOTS} shots per point")

        rows = []
        for point, phi in enumerate(experiment_service.bracketed_grid(phi_grid)):
            config = ExperimentConfig(alpha=alpha, phi=phi, shots=shots_per_point, seed=seed)
            counts = self.sample_clicks(config, group=point + 1)
            rows.append(PatternRow(phi=phi, intensity=(counts.n00 + counts.n01) / counts.shots))

        logger.info("sampled sweep alpha=%r: %d points x %d shots", alpha, len(rows), shots_per_point)
        return InterferencePattern.from_rows(alpha, rows, shots_per_point=shots_per_point)


# Global service instance
sampler_service = SamplerService()

import math

import pytest

from delayedchoice.core.errors import ConfigurationError
from delayedchoice.schemas.experiment import AncillaBasis, ControlMode, ExperimentConfig, JointDistribution
from delayedchoice.schemas.sampler import ClickCounts
from delayedchoice.services.sampler_service import SamplerService

# seeds used by the deferred-measurement acceptance runs
QUANTUM_SEED = 20100607
CLASSICAL_SEED = 20100608


def counts(n00, n01, n10, n11, mode=ControlMode.QUANTUM):
    return ClickCounts(
        n00=n00,
        n01=n01,
        n10=n10,
        n11=n11,
        shots=n00 + n01 + n10 + n11,
        seed=0,
        mode=mode,
        rng_algorithm="test",
    )


class TestSampleClicks:
    def test_counts_sum_to_shots(self, sampler):
        result = sampler.sample_clicks(ExperimentConfig(alpha=0.4, phi=1.0, shots=12_345, seed=1))
        assert sum(result.as_tuple()) == 12_345

    @pytest.mark.parametrize("mode", list(ControlMode))
    def test_same_seed_same_counts(self, sampler, mode):
        config = ExperimentConfig(alpha=0.7, phi=0.3, shots=5000, seed=99, control_mode=mode)
        assert sampler.sample_clicks(config) == sampler.sample_clicks(config)

    def test_different_seeds_differ(self, sampler):
        first = sampler.sample_clicks(ExperimentConfig(alpha=0.7, phi=0.3, shots=5000, seed=1))
        second = sampler.sample_clicks(ExperimentConfig(alpha=0.7, phi=0.3, shots=5000, seed=2))
        assert first.as_tuple() != second.as_tuple()

    @pytest.mark.parametrize("mode", list(ControlMode))
    def test_worker_count_does_not_change_counts(self, mode):
        config = ExperimentConfig(alpha=0.9, phi=2.2, shots=10_500, seed=5, control_mode=mode)
        single = SamplerService(shots_per_batch=1000, workers=1).sample_clicks(config)
        pooled = SamplerService(shots_per_batch=1000, workers=4).sample_clicks(config)
        assert single == pooled

    def test_particle_only_never_clicks_ancilla_one(self, sampler):
        result = sampler.sample_clicks(ExperimentConfig(alpha=0.0, phi=0.8, shots=2000, seed=3))
        assert result.n01 == 0 and result.n11 == 0

    @pytest.mark.parametrize("mode", list(ControlMode))
    def test_zero_probability_cell_stays_empty(self, sampler, mode):
        config = ExperimentConfig(alpha=math.pi / 4, phi=0.0, shots=1_000_000, seed=7, control_mode=mode)
        result = sampler.sample_clicks(config)
        assert result.n11 == 0
        assert sampler.empirical_distribution(result).p11 == 0.0

    def test_diagonal_readout_sampled(self, sampler):
        config = ExperimentConfig(alpha=0.5, phi=0.4, shots=20_000, seed=8, ancilla_basis=AncillaBasis.DIAGONAL)
        result = sampler.sample_clicks(config)
        assert sum(result.as_tuple()) == 20_000


class TestDeferredMeasurement:
    @pytest.mark.slow
    @pytest.mark.parametrize(
        "mode, seed",
        [(ControlMode.QUANTUM, QUANTUM_SEED), (ControlMode.CLASSICAL, CLASSICAL_SEED)],
    )
    def test_both_modes_fit_closed_form(self, experiment, mode, seed):
        alpha, phi = 0.6, 1.1
        sampler = SamplerService(workers=2)
        config = ExperimentConfig(alpha=alpha, phi=phi, shots=1_000_000, seed=seed, control_mode=mode)
        fit = sampler.goodness_of_fit(sampler.sample_clicks(config), experiment.joint_distribution(alpha, phi))
        assert fit.passed
        assert fit.degrees_of_freedom == 3

    def test_empirical_close_to_exact(self, sampler, experiment):
        config = ExperimentConfig(alpha=1.0, phi=2.5, shots=200_000, seed=21, control_mode=ControlMode.CLASSICAL)
        empirical = sampler.empirical_distribution(sampler.sample_clicks(config))
        assert empirical.max_distance(experiment.joint_distribution(1.0, 2.5)) < 0.01


class TestGoodnessOfFit:
    def test_perfect_counts(self, sampler):
        fit = sampler.goodness_of_fit(
            counts(250, 250, 250, 250),
            JointDistribution(p00=0.25, p01=0.25, p10=0.25, p11=0.25),
        )
        assert fit.chi_square == 0.0
        assert fit.degrees_of_freedom == 3
        assert fit.threshold == pytest.approx(16.266, abs=1e-3)
        assert fit.passed

    def test_wrong_distribution_fails(self, sampler):
        fit = sampler.goodness_of_fit(
            counts(500, 0, 500, 0),
            JointDistribution(p00=0.25, p01=0.25, p10=0.25, p11=0.25),
        )
        assert not fit.passed
        assert fit.p_value < 1e-6

    def test_zero_cell_violation(self, sampler, experiment):
        expected = experiment.joint_distribution(math.pi / 4, 0.0)
        fit = sampler.goodness_of_fit(counts(250, 500, 249, 1), expected)
        assert fit.zero_cell_violations == 1
        assert fit.degrees_of_freedom == 2
        assert fit.threshold == pytest.approx(13.816, abs=1e-3)
        assert not fit.passed

    def test_low_expectation_cells_pooled(self, sampler):
        expected = JointDistribution(p00=0.497, p01=0.001, p10=0.5, p11=0.002)
        fit = sampler.goodness_of_fit(counts(497, 1, 500, 2), expected)
        assert fit.pooled_cells == ["01", "11"]
        assert fit.degrees_of_freedom == 1
        assert fit.passed

    def test_pass_serialized_under_its_name(self, sampler):
        fit = sampler.goodness_of_fit(
            counts(500, 0, 500, 0),
            JointDistribution(p00=0.5, p01=0.0, p10=0.5, p11=0.0),
        )
        dumped = fit.model_dump(by_alias=True)
        assert dumped["pass"] is True
        assert fit.degrees_of_freedom == 1


class TestSampledSweep:
    def test_sampled_pattern_tracks_exact_one(self, experiment):
        sampler = SamplerService()
        grid = experiment.phase_grid(8)
        pattern = sampler.sampled_sweep(math.pi / 4, grid, 20_000, seed=4)
        for row in pattern.rows:
            assert row.intensity == pytest.approx(experiment.intensity(math.pi / 4, row.phi), abs=0.02)
        assert pattern.shots_per_point == 20_000
        assert pattern.visibility == pytest.approx(0.5, abs=0.05)

    def test_too_few_shots(self, sampler):
        with pytest.raises(ConfigurationError):
            sampler.sampled_sweep(0.3, [0.0, 1.0], 10, seed=1)

    @pytest.mark.parametrize("alpha, visibility", [(math.pi / 2, 1.0), (0.0, 0.0)])
    def test_sampled_visibility_at_pure_settings(self, experiment, alpha, visibility):
        sampler = SamplerService()
        pattern = sampler.sampled_sweep(alpha, experiment.phase_grid(8), 100_000, seed=12)
        assert pattern.visibility == pytest.approx(visibility, abs=0.02)


class TestConvergence:
    def test_error_halves_when_shots_quadruple(self, sampler, experiment):
        alpha, phi = 0.8, 1.9
        exact = experiment.joint_distribution(alpha, phi)

        def mean_error(shots: int) -> float:
            errors = [
                sampler.empirical_distribution(
                    sampler.sample_clicks(ExperimentConfig(alpha=alpha, phi=phi, shots=shots, seed=seed))
                ).max_distance(exact)
                for seed in range(16)
            ]
            return math.fsum(errors) / len(errors)

        ratio = mean_error(10_000) / mean_error(40_000)
        assert 1.0 <= ratio <= 4.0

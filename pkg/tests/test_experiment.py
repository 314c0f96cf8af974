import math

import numpy as np
import pytest
from pydantic import ValidationError

from delayedchoice.core.errors import ConfigurationError, DegenerateConditionError
from delayedchoice.core.random import RandomStream
from delayedchoice.core.state import ANCILLA, PHOTON, DensityMatrix, overlap, reduced_density_matrix, same_ray
from delayedchoice.schemas.experiment import (
    AncillaBasis,
    ControlMode,
    Detector,
    DiagonalSign,
    ExperimentConfig,
    StepKind,
)

from .conftest import MORPHING_ALPHAS


def angle_grid(count: int = 21):
    alphas = np.linspace(0.0, math.pi / 2, count)
    phis = np.linspace(0.0, 2 * math.pi, count)
    return [(float(a), float(p)) for a in alphas for p in phis]


class TestStates:
    @pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 256, endpoint=False))
    def test_overlap_law(self, experiment, phi):
        value = abs(overlap(experiment.particle_state(phi), experiment.wave_state(phi)))
        assert value == pytest.approx(abs(math.cos(phi)) / math.sqrt(2), abs=1e-12)

    @pytest.mark.parametrize("phi", [math.pi / 2, -math.pi / 2, 3 * math.pi / 2])
    def test_particle_and_wave_orthogonal_at_quarter_turn(self, experiment, phi):
        assert abs(overlap(experiment.particle_state(phi), experiment.wave_state(phi))) < 1e-12

    def test_gate_evolution_reaches_final_state(self, experiment):
        for alpha, phi in angle_grid():
            evolved = experiment.evolve(alpha, phi)
            assert same_ray(evolved, experiment.final_state(alpha, phi), tol=1e-12)

    def test_photon_is_a_particle_wave_mixture(self, experiment):
        alpha, phi = 0.5, 1.1
        rho = reduced_density_matrix(experiment.final_state(alpha, phi), PHOTON)
        mixture = DensityMatrix.from_mixture(
            [
                (math.cos(alpha) ** 2, experiment.particle_state(phi)),
                (math.sin(alpha) ** 2, experiment.wave_state(phi)),
            ]
        )
        np.testing.assert_allclose(rho.entries, mixture.entries, atol=1e-12)

    def test_ancilla_populations(self, experiment):
        alpha = 0.8
        rho = reduced_density_matrix(experiment.final_state(alpha, 0.3), ANCILLA)
        np.testing.assert_allclose(np.diag(rho.entries).real, [math.cos(alpha) ** 2, math.sin(alpha) ** 2], atol=1e-12)


class TestCircuits:
    def test_quantum_program_shape(self, experiment):
        program = experiment.build_circuit(ExperimentConfig(alpha=0.3, phi=0.2))
        kinds = [step.kind for step in program.steps]
        assert kinds == [StepKind.GATE] * 4 + [StepKind.MEASURE] * 2
        assert program.steps[3].control == ANCILLA

    def test_classical_program_measures_ancilla_first(self, experiment):
        config = ExperimentConfig(alpha=0.3, phi=0.2, control_mode=ControlMode.CLASSICAL)
        steps = experiment.build_circuit(config).steps
        assert steps[3].kind is StepKind.MEASURE and steps[3].target == ANCILLA
        assert steps[4].kind is StepKind.CONDITIONAL_GATE and steps[4].condition_outcome == 1
        assert steps[5].target == PHOTON

    def test_classical_program_rejects_diagonal_readout(self, experiment):
        config = ExperimentConfig(
            alpha=0.3, phi=0.2, control_mode=ControlMode.CLASSICAL, ancilla_basis=AncillaBasis.DIAGONAL
        )
        with pytest.raises(ConfigurationError):
            experiment.build_circuit(config)

    def test_classical_exact_statistics_match_quantum(self, experiment):
        """Measuring the ancilla first and controlling BS2 classically changes nothing."""
        for alpha, phi in angle_grid():
            config = ExperimentConfig(alpha=alpha, phi=phi, control_mode=ControlMode.CLASSICAL)
            classical = experiment.exact_program_distribution(config)
            quantum = experiment.joint_distribution(alpha, phi)
            assert classical.max_distance(quantum) < 1e-12

    def test_quantum_program_matches_closed_form(self, experiment):
        for alpha, phi in angle_grid(7):
            program = experiment.exact_program_distribution(ExperimentConfig(alpha=alpha, phi=phi))
            assert program.max_distance(experiment.joint_distribution(alpha, phi)) < 1e-12

    def test_diagonal_readout_keeps_photon_marginal(self, experiment):
        alpha, phi = 0.6, 2.0
        config = ExperimentConfig(alpha=alpha, phi=phi, ancilla_basis=AncillaBasis.DIAGONAL)
        distribution = experiment.exact_program_distribution(config)
        assert distribution.photon_marginal()[0] == pytest.approx(experiment.intensity(alpha, phi), abs=1e-12)

    def test_classical_control_run(self, experiment):
        config = ExperimentConfig(alpha=0.0, phi=0.4, control_mode=ControlMode.CLASSICAL)
        photon, ancilla = experiment.classical_control_run(config, RandomStream(3))
        assert ancilla == 0
        assert photon in (0, 1)

    def test_classical_control_run_needs_classical_mode(self, experiment):
        with pytest.raises(ConfigurationError):
            experiment.classical_control_run(ExperimentConfig(alpha=0.1, phi=0.0), RandomStream(3))

    def test_wave_only_run_is_deterministic_at_zero_phase(self, experiment):
        config = ExperimentConfig(alpha=math.pi / 2, phi=0.0, control_mode=ControlMode.CLASSICAL)
        rng = RandomStream(11)
        assert {experiment.classical_control_run(config, rng) for _ in range(50)} == {(0, 1)}


class TestJointDistribution:
    def test_particle_limit(self, experiment):
        assert experiment.joint_distribution(0.0, 1.3).as_tuple() == pytest.approx((0.5, 0.0, 0.5, 0.0))

    def test_wave_limit_at_zero_phase(self, experiment):
        assert experiment.joint_distribution(math.pi / 2, 0.0).as_tuple() == pytest.approx(
            (0.0, 1.0, 0.0, 0.0), abs=1e-15
        )

    def test_equal_mixture(self, experiment):
        distribution = experiment.joint_distribution(math.pi / 4, math.pi / 2)
        assert distribution.as_tuple() == pytest.approx((0.25, 0.25, 0.25, 0.25))

    def test_marginals(self, experiment):
        alpha, phi = 0.7, 0.9
        distribution = experiment.joint_distribution(alpha, phi)
        assert distribution.photon_marginal()[0] == pytest.approx(experiment.intensity(alpha, phi), abs=1e-15)
        assert distribution.ancilla_marginal()[0] == pytest.approx(math.cos(alpha) ** 2, abs=1e-15)

    def test_intensity_at_pi_over_four(self, experiment):
        assert experiment.intensity(math.pi / 4, 0.0) == pytest.approx(0.75, abs=1e-12)

    def test_detector_one_complements(self, experiment):
        alpha, phi = 0.4, 1.9
        d0 = experiment.detector_intensity(alpha, phi, Detector.D0)
        d1 = experiment.detector_intensity(alpha, phi, Detector.D1)
        assert d0 + d1 == pytest.approx(1.0, abs=1e-15)

    def test_alpha_out_of_range(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(alpha=2.0, phi=0.0)

    def test_phase_is_wrapped(self):
        assert ExperimentConfig(alpha=0.1, phi=-math.pi / 2).phi == pytest.approx(3 * math.pi / 2)


class TestSweeps:
    def test_morphing_curves(self, experiment):
        grid = experiment.phase_grid(256)
        for alpha in MORPHING_ALPHAS:
            pattern = experiment.sweep(alpha, grid)
            assert len(pattern.rows) == 256
            for row in pattern.rows:
                expected = 0.5 * math.cos(alpha) ** 2 + math.sin(alpha) ** 2 * math.cos(row.phi / 2) ** 2
                assert row.intensity == pytest.approx(expected, abs=1e-12)
            assert pattern.visibility == pytest.approx(math.sin(alpha) ** 2, abs=1e-6)
            assert pattern.visibility == pytest.approx(experiment.analytic_visibility(alpha), abs=1e-6)

    def test_half_visibility(self, experiment):
        pattern = experiment.sweep(math.pi / 4, experiment.phase_grid(256))
        assert pattern.visibility == pytest.approx(0.5, abs=1e-6)

    def test_extrema_injected(self, experiment):
        pattern = experiment.sweep(1.0, [0.3, 2.0])
        phis = [row.phi for row in pattern.rows]
        assert phis == sorted(phis)
        assert 0.0 in phis and math.pi in phis
        assert pattern.visibility == pytest.approx(math.sin(1.0) ** 2, abs=1e-12)

    def test_empty_grid(self, experiment):
        with pytest.raises(ConfigurationError):
            experiment.sweep(0.3, [])

    def test_visibility_invariant_under_detector(self, experiment):
        grid = experiment.phase_grid(64)
        d0 = experiment.sweep(0.9, grid, Detector.D0)
        d1 = experiment.sweep(0.9, grid, Detector.D1)
        for a, b in zip(d0.rows, d1.rows):
            assert a.intensity + b.intensity == pytest.approx(1.0, abs=1e-15)
        assert d1.detector is Detector.D1

    def test_conditional_sweeps_separate_behaviours(self, experiment):
        grid = experiment.phase_grid(32)
        particle = experiment.conditional_sweep(math.pi / 4, grid, 0)
        wave = experiment.conditional_sweep(math.pi / 4, grid, 1)
        assert particle.visibility == pytest.approx(0.0, abs=1e-12)
        assert wave.visibility == pytest.approx(1.0, abs=1e-12)
        assert wave.postselected_outcome == 1

    def test_conditional_sweep_on_empty_branch(self, experiment):
        with pytest.raises(DegenerateConditionError):
            experiment.conditional_sweep(0.0, [0.5], 1)


class TestPostselection:
    @pytest.mark.parametrize("alpha", [0.2, math.pi / 4, 1.3])
    def test_ancilla_zero_gives_particle(self, experiment, alpha):
        for phi in np.linspace(0, 2 * math.pi, 9):
            result = experiment.postselect(alpha, phi, 0)
            assert result.photon_distribution == pytest.approx((0.5, 0.5), abs=1e-12)
            assert result.probability == pytest.approx(math.cos(alpha) ** 2, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.2, math.pi / 4, 1.3])
    def test_ancilla_one_gives_wave(self, experiment, alpha):
        for phi in np.linspace(0, 2 * math.pi, 9):
            result = experiment.postselect(alpha, phi, 1)
            expected = (math.cos(phi / 2) ** 2, math.sin(phi / 2) ** 2)
            assert result.photon_distribution == pytest.approx(expected, abs=1e-12)

    def test_wave_fringe_at_pi_over_three(self, experiment):
        result = experiment.postselect(math.pi / 4, math.pi / 3, 1)
        assert result.photon_distribution == pytest.approx((0.75, 0.25), abs=1e-12)

    @pytest.mark.parametrize("alpha, outcome", [(0.0, 1), (math.pi / 2, 0)])
    def test_empty_branch(self, experiment, alpha, outcome):
        with pytest.raises(DegenerateConditionError):
            experiment.postselect(alpha, 0.3, outcome)

    def test_invalid_outcome(self, experiment):
        with pytest.raises(ConfigurationError):
            experiment.postselect(0.3, 0.3, 2)

    @pytest.mark.parametrize("sign", list(DiagonalSign))
    def test_diagonal_outcomes_equiprobable_when_orthogonal(self, experiment, sign):
        _, probability = experiment.diagonal_postselect(math.pi / 4, math.pi / 2, sign)
        assert probability == pytest.approx(0.5, abs=1e-12)

    def test_diagonal_probability_closed_form(self, experiment):
        alpha, phi = 0.6, 0.8
        plus = experiment.describe_diagonal(alpha, phi, DiagonalSign.PLUS).probability
        minus = experiment.describe_diagonal(alpha, phi, DiagonalSign.MINUS).probability
        shift = math.sin(2 * alpha) * math.cos(phi) / math.sqrt(2)
        assert plus == pytest.approx(0.5 * (1 + shift), abs=1e-12)
        assert minus == pytest.approx(0.5 * (1 - shift), abs=1e-12)

    def test_diagonal_limits(self, experiment):
        phi = 1.2
        assert experiment.diagonal_intensity(0.0, phi, DiagonalSign.PLUS) == pytest.approx(0.5, abs=1e-12)
        assert experiment.diagonal_intensity(math.pi / 2, phi, DiagonalSign.MINUS) == pytest.approx(
            math.cos(phi / 2) ** 2, abs=1e-12
        )

import json
import logging
import math

import pytest

from delayedchoice.core.logging import LOGGER_NAME
from delayedchoice.main import main
from delayedchoice.schemas.hvmodel import Setting
from delayedchoice.services.experiment_service import ExperimentService
from delayedchoice.services.hv_service import HVService
from delayedchoice.services.sampler_service import SamplerService

# alpha values of the morphing figure: particle, three mixtures, wave
MORPHING_ALPHAS = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)

VERDICT_SETTINGS = (
    (0.3, 0.7),
    (0.6, 2.1),
    (0.9, 1.2),
    (1.2, 2.6),
)


@pytest.fixture(autouse=True)
def fixed_epoch(monkeypatch):
    """Pin manifest timestamps so emitted files are byte-identical."""
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers bound to a previous test's captured stderr."""
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)


@pytest.fixture
def experiment():
    return ExperimentService()


@pytest.fixture
def sampler():
    return SamplerService(shots_per_batch=10_000, workers=1)


@pytest.fixture
def hv():
    return HVService(workers=1)


@pytest.fixture
def verdict_settings():
    return [Setting(alpha=alpha, phi=phi) for alpha, phi in VERDICT_SETTINGS]


@pytest.fixture
def settings_file(tmp_path):
    path = tmp_path / "settings.txt"
    lines = ["# alpha,phi"] + [f"{alpha},{phi}" for alpha, phi in VERDICT_SETTINGS]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns (exit_code, stdout, stderr)."""

    def run(*argv: str):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


@pytest.fixture
def run_json(run_cli):
    """Run a structured-output command and parse its record."""

    def run(*argv: str):
        code, out, _ = run_cli(*argv)
        assert code == 0
        return json.loads(out)

    return run

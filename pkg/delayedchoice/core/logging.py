import logging
import sys

from .config import settings

LOGGER_NAME = "delayedchoice"


def configure_logging(level: str | None = None) -> logging.Logger:
    """Configure the package logger once; output goes to stderr."""
    logger = logging.getLogger(LOGGER_NAME)
    resolved = (level or settings.LOG_LEVEL).upper()
    logger.setLevel(resolved)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
        logger.propagate = False

    return logger


def get_logger(name: str) -> logging.Logger:
    """Child logger under the package namespace."""
    return logging.getLogger(f"{LOGGER_NAME}.{name}")

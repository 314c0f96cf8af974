import argparse
import math
from pathlib import Path

from ..core.config import settings

CSV = "csv"
STRUCTURED = "structured"


def add_angle_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--degrees",
        action="store_true",
        help="read every angle flag in degrees instead of radians",
    )


def add_seed_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"64-bit seed (default: QDC_DEFAULT_SEED, currently {settings.DEFAULT_SEED})",
    )


def add_output_options(parser: argparse.ArgumentParser, formats: tuple[str, ...] = (STRUCTURED,)) -> None:
    parser.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    parser.add_argument("--format", choices=formats, default=formats[0], help="output format")


def to_radians(value: float, degrees: bool) -> float:
    return math.radians(value) if degrees else value


def resolve_seed(seed: int | None) -> int:
    return settings.DEFAULT_SEED if seed is None else seed

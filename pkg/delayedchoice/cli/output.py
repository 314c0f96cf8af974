"""Writers for CSV tables and structured run records."""

import csv
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from pydantic import BaseModel

from .. import __version__
from ..core.errors import ConfigurationError
from ..core.logging import get_logger
from ..schemas.responses import RunManifest, RunRecord

logger = get_logger("cli")

MANIFEST_SUFFIX = ".manifest.json"


def run_timestamp() -> datetime:
    """UTC now, or the instant pinned by SOURCE_DATE_EPOCH."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return datetime.now(timezone.utc)
    try:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    except ValueError as exc:
        raise ConfigurationError(f"SOURCE_DATE_EPOCH must be an integer, got {epoch!r}") from exc


def build_manifest(
    command: str,
    config: dict[str, Any],
    seed: Optional[int] = None,
    rng_algorithm: Optional[str] = None,
) -> RunManifest:
    return RunManifest(
        command=command,
        config=config,
        seed=seed,
        rng_algorithm=rng_algorithm,
        tool_version=__version__,
        timestamp=run_timestamp(),
    )


def format_cell(value: Any) -> str:
    # repr is the shortest string that parses back to the same double
    if isinstance(value, float) or hasattr(value, "dtype"):
        return repr(float(value))
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], out: Optional[Path], manifest: RunManifest) -> None:
    """CSV with a header row; a file target also gets a sidecar manifest."""
    formatted = [[format_cell(value) for value in row] for row in rows]

    if out is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(formatted)
        return

    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(formatted)

    sidecar = out.with_name(out.name + MANIFEST_SUFFIX)
    sidecar.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %d rows to %s", len(formatted), out)


def read_csv(path: Path) -> list[dict[str, str]]:
    """Rows of an emitted CSV file keyed by header."""
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def write_record(data: Any, manifest: RunManifest, out: Optional[Path], message: Optional[str] = None) -> None:
    """One JSON document per run, manifest embedded."""
    record = RunRecord[Any](success=True, data=_dump(data), message=message, manifest=manifest)
    document = record.model_dump_json(indent=2, by_alias=True) + "\n"

    if out is None:
        sys.stdout.write(document)
        return

    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(document, encoding="utf-8")
    logger.info("wrote structured record to %s", out)


def _dump(data: Any) -> Any:
    if isinstance(data, BaseModel):
        return data.model_dump(mode="json", by_alias=True)
    if isinstance(data, list):
        return [_dump(item) for item in data]
    return data

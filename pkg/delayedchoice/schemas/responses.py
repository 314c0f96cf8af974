from pydantic import BaseModel, Field
from typing import Optional, Any, Generic, TypeVar
from datetime import datetime

DataType = TypeVar('DataType')


class RunManifest(BaseModel):
    """Provenance written next to (or inside) every output file."""
    command: str = Field(..., description="Command name, e.g. 'sweep' or 'hv verdict'")
    config: dict[str, Any] = Field(..., description="Fully resolved configuration")
    seed: Optional[int] = Field(None, description="Seed used, if the command samples")
    rng_algorithm: Optional[str] = Field(None, description="Random stream algorithm identifier")
    tool_version: str = Field(..., description="Package version")
    timestamp: datetime = Field(..., description="Run timestamp (UTC)")


class RunRecord(BaseModel, Generic[DataType]):
    """Standard structured output document."""
    success: bool = Field(..., description="Whether the command succeeded")
    data: Optional[DataType] = Field(None, description="Command result")
    error: Optional[str] = Field(None, description="Error message if success is false")
    message: Optional[str] = Field(None, description="Optional message")
    manifest: RunManifest = Field(..., description="Run provenance")


class ErrorRecord(BaseModel):
    """Structured error written to stderr."""
    success: bool = Field(False, description="Always false for errors")
    error: str = Field(..., description="Error message")
    code: str = Field(..., description="Error code")
    exit_code: int = Field(..., description="Process exit code")
    details: Optional[Any] = Field(None, description="Additional error details")

"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class CageError(Exception):
    """Base class for all pipeline errors."""


class ManifestError(CageError):
    """Benchmark manifest is missing, malformed, or violates invariants."""

    def __init__(self, message: str, line: int | None = None,
                 duplicate_ids: list[str] | None = None):
        super().__init__(message)
        self.line = line
        self.duplicate_ids = duplicate_ids or []


class ReferenceSetError(CageError):
    """Reference image directory is unusable (empty, unreadable, corrupt)."""


class ExtractionError(CageError):
    """Lexical label extraction failed (unbalanced literal or group)."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class RenderError(CageError):
    """Generated code failed to execute or produced unusable output."""

    def __init__(self, message: str, stdout: str = "", stderr: str = ""):
        super().__init__(message)
        self.stdout = stdout
        self.stderr = stderr


class RenderTimeout(RenderError):
    """Sandboxed execution exceeded its wall-clock limit."""


class RepairExhausted(CageError):
    """The regeneration loop ran out of attempts without passing checks."""

    def __init__(self, message: str, verification, attempts: int):
        super().__init__(message)
        self.verification = verification
        self.attempts = attempts


class DimensionMismatch(CageError):
    """Raster operands do not share dimensions."""


class BackendError(CageError):
    """A pluggable backend (LLM, diffusion, OCR, embedder) failed."""


class ConfigError(CageError):
    """Harness configuration is invalid; fail fast before any generation."""


class LeaseError(CageError):
    """Review queue item is not leased by the acting reviewer."""


class StoreError(CageError):
    """Review store operation failed (unknown item, invalid decision)."""

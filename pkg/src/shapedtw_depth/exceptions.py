from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

PathLike = Union[str, Path]


class DepthMatchError(RuntimeError):
    exit_code: int = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UsageError(DepthMatchError):
    """Bad flags or configuration (exit 2)."""

    exit_code = 2


class ConfigError(UsageError, ValueError):
    """Configuration failed validation."""


class DataError(DepthMatchError):
    """Input data cannot be processed (exit 3)."""

    exit_code = 3


class IngestError(DataError):
    def __init__(
        self,
        message: str,
        *,
        path: Optional[PathLike] = None,
        line: Optional[int] = None,
    ):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line
        self.reason = message


class NullRowError(DataError):
    def __init__(self, row: int):
        super().__init__(f"row {row} contains only null values")
        self.row = row


class WarpRangeError(DataError):
    """Synthetic warp leaves the generated base series."""


class OutputError(DataError):
    def __init__(self, path: PathLike, message: str):
        super().__init__(f"cannot write {path}: {message}")
        self.path = path


class InvariantViolation(DepthMatchError):
    """A path, matrix or curve failed an internal consistency check (exit 4)."""

    exit_code = 4

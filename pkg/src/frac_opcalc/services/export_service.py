"""CSV and JSON rendering of grid fields."""

import sys
from enum import Enum
from pathlib import Path

from frac_opcalc.config import Settings, get_settings
from frac_opcalc.models import GridField


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class ExportService:
    """Service for writing grid fields to files or stdout."""

    def __init__(self, settings: Settings | None = None) -> None:
        """Initialize export service."""
        self.settings = settings or get_settings()

    def to_csv(self, field: GridField) -> str:
        """Header row plus one row per lattice point, x outer and t inner."""
        first, second = field.axis_names
        digits = self.settings.csv_digits
        lines = [f"{first},{second},value,converged"]
        points = field.spec.points()
        for (x, t), value, flag in zip(
            points, field.values, field.convergence_flags, strict=True
        ):
            numbers = ",".join(f"{v:.{digits}g}" for v in (x, t, value))
            lines.append(f"{numbers},{str(flag).lower()}")
        return "\n".join(lines) + "\n"

    def to_json(self, field: GridField) -> str:
        """The field with its lattice, values, flags and metadata."""
        return field.model_dump_json(indent=2) + "\n"

    def render(self, field: GridField, fmt: OutputFormat) -> str:
        if fmt == OutputFormat.JSON:
            return self.to_json(field)
        return self.to_csv(field)

    def write(
        self, field: GridField, fmt: OutputFormat, out: Path | None = None
    ) -> None:
        """Write to ``out`` (UTF-8, newline line endings) or to stdout."""
        text = self.render(field, fmt)
        if out is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        with out.open("w", encoding="utf-8", newline="\n") as f:
            f.write(text)

"""Argument helpers and grid evaluation shared by the sub-commands."""

import argparse
import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from frac_opcalc.models import GridField, GridSpec, SeriesResult
from frac_opcalc.services.export_service import OutputFormat

logger = logging.getLogger(__name__)

PointFunction = Callable[[float, float], SeriesResult]
Axis = tuple[float, float, int]


def parse_axis(text: str) -> Axis:
    """A single value ``v`` or a range ``a:b:n`` with n points."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            value = float(parts[0])
            return value, value, 1
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise argparse.ArgumentTypeError(f"point count must be >= 1: {text}")
            return float(parts[0]), float(parts[1]), count
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"not a number or a:b:n range: {text}"
        ) from exc
    raise argparse.ArgumentTypeError(f"not a number or a:b:n range: {text}")


def common_options() -> argparse.ArgumentParser:
    """Output and execution flags accepted by every sub-command."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.CSV.value,
        help="Output format (default: csv)",
    )
    parser.add_argument("--out", type=Path, help="Output file (default: stdout)")
    parser.add_argument(
        "--workers", type=int, help="Threads for grid evaluation (default: settings)"
    )
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Enable debug logging"
    )
    return parser


def add_x_axis(parser: argparse.ArgumentParser, default: str = "0") -> None:
    parser.add_argument(
        "--x",
        "--grid",
        dest="x",
        type=parse_axis,
        default=parse_axis(default),
        help="x value or range a:b:n",
    )


def add_t_axis(parser: argparse.ArgumentParser, default: str = "0") -> None:
    parser.add_argument(
        "--t",
        type=parse_axis,
        default=parse_axis(default),
        help="t value or range a:b:n",
    )


def grid_spec(x: Axis, t: Axis) -> GridSpec:
    return GridSpec(
        x_min=x[0], x_max=x[1], x_count=x[2], t_min=t[0], t_max=t[1], t_count=t[2]
    )


def evaluate_grid(
    spec: GridSpec,
    fn: PointFunction,
    *,
    workers: int = 1,
    metadata: dict[str, Any] | None = None,
    axis_names: tuple[str, str] = ("x", "t"),
) -> GridField:
    """Evaluate ``fn`` on every lattice point; results keep row-major order."""
    points = spec.points()

    def one(point: tuple[float, float]) -> SeriesResult:
        return fn(*point)

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(p) for p in points]

    unconverged = sum(not r.converged for r in results)
    if unconverged:
        logger.warning(f"{unconverged} of {len(results)} points did not converge")
    return GridField(
        spec=spec,
        values=[r.value for r in results],
        convergence_flags=[r.converged for r in results],
        metadata=metadata or {},
        axis_names=axis_names,
    )

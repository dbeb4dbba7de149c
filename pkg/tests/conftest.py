"""Shared test fixtures."""

import shutil
import tempfile
from collections.abc import Generator
from pathlib import Path

import pytest

from frac_opcalc.config import Settings
from frac_opcalc.models import SeriesPolicy


@pytest.fixture
def temp_output_dir() -> Generator[Path, None, None]:
    """Create a temporary output directory for tests."""
    temp_dir = Path(tempfile.mkdtemp())
    try:
        yield temp_dir
    finally:
        shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture
def test_settings() -> Settings:
    """Create test settings with the documented defaults."""
    return Settings(
        series_rel_tol=1e-14,
        series_max_terms=10_000,
        negative_argument_limit=50.0,
        workers=1,
    )


@pytest.fixture
def policy(test_settings: Settings) -> SeriesPolicy:
    """Default series policy."""
    return test_settings.series_policy()


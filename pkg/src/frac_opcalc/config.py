"""Application configuration using pydantic-settings."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from frac_opcalc.models import SeriesPolicy


class Settings(BaseSettings):
    """Numerical defaults loaded from environment variables or a .env file."""

    model_config = SettingsConfigDict(
        env_prefix="FRAC_OPCALC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    series_rel_tol: float = Field(default=1e-14, gt=0)
    series_abs_tol: float = Field(default=1e-300, ge=0)
    series_consecutive_small: int = Field(default=3, ge=1)
    series_max_terms: int = Field(default=10_000, ge=1)

    # Accuracy domain of alternating series
    negative_argument_limit: float = Field(default=50.0, gt=0)
    cancellation_tol: float = Field(default=1e-13, gt=0)
    max_extended_digits: int = Field(default=400, ge=30)

    taylor_terms: int = Field(default=160, ge=8, le=170)
    max_operator_power: int = Field(default=400, ge=1)

    subordination_tail_tol: float = Field(default=1e-10, gt=0)
    subordination_panel_nodes: int = Field(default=16, ge=2)
    subordination_panels: int = Field(default=16, ge=1)
    subordination_initial_upper: float = Field(default=8.0, gt=0)

    workers: int = Field(default=1, ge=1)
    csv_digits: int = Field(default=17, ge=1, le=17)
    log_level: str = "WARNING"

    def series_policy(self) -> SeriesPolicy:
        """Default truncation policy for every series evaluation."""
        return SeriesPolicy(
            rel_tol=self.series_rel_tol,
            abs_tol=self.series_abs_tol,
            consecutive_small=self.series_consecutive_small,
            max_terms=self.series_max_terms,
        )


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def resolve_policy(policy: SeriesPolicy | None) -> SeriesPolicy:
    """Return the given policy, or the configured default."""
    return policy if policy is not None else get_settings().series_policy()

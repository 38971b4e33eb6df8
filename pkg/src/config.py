"""Configuration management using Pydantic BaseSettings.

Loads settings from environment variables and/or a .env file.
Provides type-hinted access to iteration caps, retry limits, output paths
and the invariant-checking switch.
"""

from __future__ import annotations

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment or .env file."""

    # Project root directory
    BASE_DIR: Path = Path(__file__).resolve().parent.parent
    # Default location for certificates and traces
    OUTPUT_DIR: Path = BASE_DIR / "output"
    LOG_LEVEL: str = "INFO"

    # Live elimination invariants and full good-labeling re-verification
    CHECK_INVARIANTS: bool = False

    REFINE_ITERATION_CAP: int = 1_000_000
    ELIMINATION_ITERATION_CAP: int = 1_000_000
    HYPERGRAPH_EDGE_CAP: int = 20
    HYPOTHESIS_FAMILY_CAP: int = 12
    EPS_RETRY_CAP: int = 6
    COVER_SAMPLES: int = 64
    # Default d-interval eps is the minimum endpoint gap divided by this
    EPS_GAP_DIVISOR: int = 64

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


settings = Settings()

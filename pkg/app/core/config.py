"""
Application configuration management using Pydantic Settings.
This module handles all environment-based configuration for the solver,
the results store and the experiment harness.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Solver and harness settings loaded from environment variables or .env file.

    Every variable is read with the ``FPI_`` prefix, e.g. ``FPI_DUAL_TOL=1e-12``.

    Usage:
        from app.core.config import settings

        # Access settings
        tol = settings.DUAL_TOL
    """

    # Application Settings
    APP_NAME: str = "Fronthaul-Aware Beamforming FPI Solver"
    APP_VERSION: str = "1.0.0"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

    # Artifacts and results store
    OUTPUT_DIR: str = "./results"
    RESULTS_DB_URL: str = "sqlite+aiosqlite:///./results/runs.db"
    RESULTS_DB_ECHO: bool = False  # Set to True to log all SQL queries
    RECORD_RUNS: bool = True
    WORKERS: int = 1

    # Iteration defaults
    DUAL_TOL: float = 1e-10
    PRIMAL_TOL: float = 1e-10
    MAX_ITER: int = 100_000
    POWER_CAP: float = 1e8  # normalized power units
    LOG_EVERY: int = 1000  # iterations between DEBUG progress lines

    # Numerical guards
    CERTIFY_TOL: float = 1e-7
    PIVOT_EPS: float = 1e-14
    RESIDUAL_FLOOR: float = 1e-12
    PINV_RTOL: float = 1e-12

    model_config = SettingsConfigDict(
        env_prefix="FPI_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"  # Ignore extra fields in .env
    )


# Global settings instance
settings = Settings()

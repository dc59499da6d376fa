"""Configuration settings for fraccusum."""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Master seed used when no --seed / master_seed is given (FRACCUSUM_SEED)
    seed: int = 0

    # Default size of the Monte Carlo worker pool
    workers: int = 1

    # Where the CLI writes report files unless --output is given
    report_dir: Path = Path("./reports")

    # Root logger level applied by the CLI
    log_level: str = "WARNING"

    # Largest grid the Cholesky sampler accepts (O(n^3) guard)
    exact_sampler_limit: int = 4096

    model_config = SettingsConfigDict(
        env_prefix="FRACCUSUM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )


settings = Settings()

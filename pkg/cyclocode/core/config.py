from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings read from CYCLOCODE_* environment variables"""

    # Parallelism (None means one worker per CPU)
    THREADS: int | None = None

    # Numerical Configuration
    FFT_DEVIATION_THRESHOLD: float = 1e-5
    DLOG_TABLE_CAP: int = 2**26
    DIRECT_ORACLE_MAX_LENGTH: int = 2**14
    MAX_PRIME: int = 2**40
    PAIR_BLOCK_ELEMENTS: int = 2**24  # complex entries per batched transform

    LOGFIRE_TOKEN: str | None = None
    LOGFIRE_CONSOLE: bool = False

    SERVICE_NAME: str = "cyclocode"
    ENV: str = "dev"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CYCLOCODE_",
        case_sensitive=True,
    )


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


settings = get_settings()

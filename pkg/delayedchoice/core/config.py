from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="QDC_",
        case_sensitive=True,
        extra="ignore",
    )

    # Environment
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"

    # Sampling
    DEFAULT_SEED: int = 20100607
    DEFAULT_SHOTS: int = 100_000
    SHOTS_PER_BATCH: int = 100_000
    PHI_STEPS: int = 256

    # Parallelism
    WORKERS: int = 1

    # Tolerances
    ANALYTIC_TOLERANCE: float = 1e-9
    EQUIVALENCE_FACTOR: float = 2.0
    CHI_SQUARE_SIGNIFICANCE: float = 0.001


def get_settings() -> Settings:
    """Get application settings."""
    return Settings()


# Global settings instance
settings = get_settings()

"""Application configuration management."""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_prefix="DDE_COMPOUND_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Configuration
    app_name: str = Field("Compound DDE")
    app_version: str = Field("1.0.0")

    # Logging Configuration
    log_level: str = Field("INFO")
    log_format: str = Field("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    # Run Configuration
    output_dir: Path = Field(Path("runs"))
    threads: int = Field(1, ge=1)
    default_seed: int = Field(7)

    # Numeric tolerances
    cone_tolerance: float = Field(1e-10, gt=0)
    eigen_cluster_tolerance: float = Field(1e-6, gt=0)
    eigen_residual_tolerance: float = Field(1e-8, gt=0)
    eigen_verify_max_dim: int = Field(256, ge=0)
    modulus_tie_tolerance: float = Field(1e-12, ge=0)
    spectral_gap_warning: float = Field(1e-6, ge=0)
    determinant_tolerance: float = Field(1e-8, gt=0)

    # Capacity ceilings
    max_matrix_dim: int = Field(2048, ge=1)
    max_tensor_dim: int = Field(4096, ge=1)
    max_cube_entries: int = Field(4_000_000, ge=1)
    max_simplex_order: int = Field(6, ge=1)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()

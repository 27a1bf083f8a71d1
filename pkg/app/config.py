"""
Runtime settings, read from RGG_* environment variables or a .env file
"""
from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="RGG_", env_file=".env", extra="ignore")

    # eigensolver
    eigen_backend: Literal["householder_ql", "lapack"] = "householder_ql"
    eigen_tol: float = Field(1e-12, gt=0)
    eigen_max_sweeps: int = Field(30, ge=1)

    # size limits
    max_points: int = Field(1 << 20, ge=1)
    dense_check_max_n: int = Field(1024, ge=0)

    # experiments
    workers: int = Field(1, ge=1)

    # HTTP result cache
    cache_ttl: int = Field(600, ge=1)
    cache_max_entries: int = Field(32, ge=1)

    log_level: str = "INFO"


@lru_cache
def get_settings() -> Settings:
    """Process-wide settings instance"""
    return Settings()

"""
Настройки приложения с использованием переменных окружения
"""
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    """Настройки приложения"""

    model_config = SettingsConfigDict(
        env_prefix="GLOBOPT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Oracle
    default_precision_k: int = Field(default=12, ge=1, le=15)

    # Grid / optimizer
    grid_budget: int = Field(default=1_000_000, ge=1)
    max_iters_low_dim: int = Field(default=30_000, ge=0)
    max_iters_high_dim: int = Field(default=50_000, ge=0)
    high_dim_threshold: int = Field(default=3, ge=2)
    high_dim_samples: int = Field(default=256, ge=0)
    stall_window: int = Field(default=200, ge=0)
    stall_tolerance: float = Field(default=1e-12, ge=0.0)
    default_seed: int = 0

    # Harness
    output_dir: str = "./results"
    workers: int = Field(default=4, ge=1)

    # Adversary / certificates
    witness_lattice_max: int = Field(default=100_000, ge=1)
    witness_random_pool: int = Field(default=10_000, ge=0)
    basin_grad_floor: float = Field(default=1e-12, gt=0.0)

    # Logging
    log_level: str = "INFO"
    log_format: str = "console"  # console, json


# Глобальный экземпляр настроек
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Получить настройки приложения (Singleton)"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings

# src/config/settings.py - Centralized configuration
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseSettings, validator


class Environment(str, Enum):
    """Environment types"""
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class LogLevel(str, Enum):
    """Logging levels"""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LabSettings(BaseSettings):
    """Laboratory settings"""

    # Environment
    ENVIRONMENT: Environment = Environment.DEVELOPMENT
    DEBUG: bool = False

    PROJECT_NAME: str = "Heisenberg LW Lab"
    PROJECT_VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: LogLevel = LogLevel.INFO
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    LOG_FILE: Optional[str] = None

    # Reproducibility and numerics
    DEFAULT_SEED: int = 0
    DEFAULT_TOLERANCE: float = 1e-9
    COMPENSATED_SUM_THRESHOLD: int = 10**6
    SUM_BLOCK_SIZE: int = 65536

    # Capacity guards
    MAX_FIELD_ORDER: int = 2**16
    MAX_SUBGROUP_GROUP_ORDER: int = 1000
    MAX_EXHAUSTIVE_Q: int = 3
    MAX_SUBSPACE_COUNT: int = 200_000

    # Worker pool
    N_JOBS: int = 1

    # Reports
    OUTPUT_DIR: str = "./reports"

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True

    @validator("DEFAULT_TOLERANCE")
    def tolerance_positive(cls, v: float) -> float:
        """Tolerances must be strictly positive"""
        if v <= 0:
            raise ValueError("DEFAULT_TOLERANCE must be positive")
        return v

    @validator("N_JOBS")
    def jobs_nonzero(cls, v: int) -> int:
        """joblib accepts positive counts or -1 for all cores"""
        if v == 0 or v < -1:
            raise ValueError("N_JOBS must be positive or -1")
        return v

    @validator("SUM_BLOCK_SIZE", "COMPENSATED_SUM_THRESHOLD", "MAX_FIELD_ORDER")
    def limits_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("limits must be positive")
        return v

    @property
    def output_path(self) -> Path:
        """Directory receiving report files"""
        return Path(self.OUTPUT_DIR)

    @property
    def is_production(self) -> bool:
        """Check if running in production mode"""
        return self.ENVIRONMENT == Environment.PRODUCTION


# Create global settings instance
settings = LabSettings()


from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    JOBS: int = Field(1, ge=1)
    TOLERANCE: float = Field(1e-5, gt=0)
    ABS_FLOOR: float = Field(1e-12, ge=0)
    STATEMENT_EXPONENT: Literal["proof", "statement"] = "proof"
    OUT_DIR: str = "results"
    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="ORLICZ_LAB_", extra="ignore")

config = Config()

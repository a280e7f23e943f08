"""
Environment configuration for the command line
"""
import logging
from typing import Optional

from dotenv import load_dotenv, find_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from entailment.schemas import SimMeasure

load_dotenv(find_dotenv(usecwd=True))


class EntailSettings(BaseSettings):
    """Defaults read from ENTAIL_* variables; command-line flags take precedence"""
    model_config = SettingsConfigDict(env_prefix="ENTAIL_", extra="ignore")

    kb: Optional[str] = Field(default=None, description="Knowledge base file used when --kb is absent")
    measure: SimMeasure = Field(default=SimMeasure.PATH, description="Similarity measure used when --measure is absent")
    log_level: str = Field(default="WARNING", description="Root logging level")
    workers: int = Field(default=4, ge=1, description="Worker threads for corpus evaluation")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, level: str) -> str:
        level = level.strip().upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown logging level '{level}'")
        return level


def get_settings() -> EntailSettings:
    return EntailSettings()

from pydantic import PositiveFloat, PositiveInt
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults read from ``LORQ_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="LORQ_")

    DEBUG: bool = False
    WORKERS: PositiveInt = 1
    PHYSICAL_TOL: PositiveFloat = 1e-9
    OUTPUT_DIR: str = "."

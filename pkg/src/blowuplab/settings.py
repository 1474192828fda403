import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

_env_file = os.environ.get("BLOWUPLAB_ENV_FILE", ".env")


class BlowuplabSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="BLOWUPLAB_",
        env_file=_env_file,
        env_file_encoding="utf-8",
        extra="ignore",
    )

    threads: int = Field(
        default=4,
        gt=0,
        description="Maximum number of worker threads for grid evaluations",
    )

    log_level: str = Field(
        default="INFO",
        description="Minimum level of log records written to stderr",
    )


settings = BlowuplabSettings()

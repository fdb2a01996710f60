import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

from sparsity_roofline.utils.constants import DEFAULT_PROFILE, Defaults

load_dotenv()  # picks up a local .env if present


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    log_level: str = "INFO"
    value_bytes: int = Field(default=Defaults.VALUE_BYTES, ge=1)
    index_bytes: int = Field(default=Defaults.INDEX_BYTES, ge=1)
    pointer_bytes: int = Field(default=Defaults.POINTER_BYTES, ge=1)
    hw_profile: Path = DEFAULT_PROFILE
    svg_width: int = Field(default=Defaults.SVG_WIDTH, ge=100)
    svg_height: int = Field(default=Defaults.SVG_HEIGHT, ge=100)


@lru_cache
def get_settings() -> Settings:
    """
    Reads SPARSITY_ROOFLINE_* environment variables, falling back to the defaults.
    """
    env = {
        "log_level": os.getenv("SPARSITY_ROOFLINE_LOG_LEVEL"),
        "value_bytes": os.getenv("SPARSITY_ROOFLINE_VALUE_BYTES"),
        "index_bytes": os.getenv("SPARSITY_ROOFLINE_INDEX_BYTES"),
        "pointer_bytes": os.getenv("SPARSITY_ROOFLINE_POINTER_BYTES"),
        "hw_profile": os.getenv("SPARSITY_ROOFLINE_HW_PROFILE"),
        "svg_width": os.getenv("SPARSITY_ROOFLINE_SVG_WIDTH"),
        "svg_height": os.getenv("SPARSITY_ROOFLINE_SVG_HEIGHT"),
    }
    settings = Settings(**{key: value for key, value in env.items() if value is not None})
    return settings.model_copy(update={"log_level": settings.log_level.upper()})

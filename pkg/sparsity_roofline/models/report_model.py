from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field

from sparsity_roofline.models.roofline_model import SpeedupRecord
from sparsity_roofline.utils.formatting import level_key


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


class AccuracyRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: str = Field(min_length=1)
    pattern: str = Field(min_length=1)
    level: float = Field(ge=0, lt=1)
    top1: float = Field(ge=0, le=1)

    @property
    def key(self) -> tuple[str, str, str]:
        return self.model, self.pattern, level_key(self.level)


class SeriesPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: float
    speedup: float = Field(gt=0)
    top1: float = Field(ge=0, le=1)
    label: str


class Series(BaseModel):
    """Accuracy vs speedup at SoL for one (model, pattern), ordered by level."""
    model_config = ConfigDict(frozen=True)

    model: str
    pattern: str
    points: List[SeriesPoint]
    dense_top1: float | None = None


class SeriesSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    series: List[Series]
    unjoined: List[SpeedupRecord] = []

    @property
    def joined_count(self) -> int:
        return sum(len(series.points) for series in self.series)

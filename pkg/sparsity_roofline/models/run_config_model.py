from pathlib import Path
from typing import Dict, List, Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from sparsity_roofline.models.hardware_model import EngineClass
from sparsity_roofline.models.report_model import OutputFormat
from sparsity_roofline.models.sparsity_model import DTypeWidths, PatternKind, SparsityConfig


class RunConfig(BaseModel):
    """Everything one CLI run evaluates: hardware, models, configs, batches, widths, outputs."""
    model_config = ConfigDict(frozen=True)

    hw: Path
    models: List[Path] = Field(min_length=1)
    configs: List[SparsityConfig] = Field(min_length=1)
    batches: List[PositiveInt] = Field(min_length=1)
    widths: DTypeWidths = DTypeWidths()
    engine_map: Dict[PatternKind, EngineClass] = {}
    out: Path = Path("out")
    formats: List[OutputFormat] = Field(default=[OutputFormat.CSV], min_length=1)
    on_incompatible: Literal["error", "dense"] = "error"
    svg_width: int = Field(default=640, ge=100)
    svg_height: int = Field(default=480, ge=100)

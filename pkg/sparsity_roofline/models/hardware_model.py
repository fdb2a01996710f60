from enum import Enum
from typing import Dict

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class EngineClass(str, Enum):
    SCALAR_CORE = "scalar"
    MATRIX_UNIT = "matrix"
    SPARSE_MATRIX_UNIT = "sparse_matrix"


class HardwareProfile(BaseModel):
    """
    Peak compute throughput per engine class (FLOP/s) and DRAM bandwidth (bytes/s)
    of one device.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    peak_flops: Dict[EngineClass, float] = Field(min_length=1)
    peak_mem_bw: float

    @field_validator("peak_flops")
    @classmethod
    def _peaks_positive(cls, value: Dict[EngineClass, float]):
        for engine, peak in value.items():
            if peak <= 0:
                raise ValueError(f"peak for engine '{engine.value}' must be > 0, got {peak}")
        return value

    @field_validator("peak_mem_bw")
    @classmethod
    def _bandwidth_positive(cls, value: float):
        if value <= 0:
            raise ValueError(f"must be > 0, got {value}")
        return value

    @model_validator(mode="after")
    def _matrix_not_slower(self):
        scalar = self.peak_flops.get(EngineClass.SCALAR_CORE)
        matrix = self.peak_flops.get(EngineClass.MATRIX_UNIT)
        if scalar is not None and matrix is not None and matrix < scalar:
            raise ValueError("matrix unit peak must be >= scalar core peak")
        return self

    @model_validator(mode="before")
    @classmethod
    def _sparse_defaults_to_matrix(cls, data):
        # Hypothetical sparse units run at the dense matrix-unit rate unless stated.
        if not isinstance(data, dict) or not isinstance(data.get("peak_flops"), dict):
            return data
        peaks = {
            (key.value if isinstance(key, EngineClass) else key): peak
            for key, peak in data["peak_flops"].items()
        }
        if EngineClass.SPARSE_MATRIX_UNIT.value not in peaks and EngineClass.MATRIX_UNIT.value in peaks:
            peaks[EngineClass.SPARSE_MATRIX_UNIT.value] = peaks[EngineClass.MATRIX_UNIT.value]
        return {**data, "peak_flops": peaks}

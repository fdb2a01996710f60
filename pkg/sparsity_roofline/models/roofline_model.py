import math
from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sparsity_roofline.models.hardware_model import EngineClass
from sparsity_roofline.models.sparsity_model import CostBreakdown, SparsityConfig

MODEL_SCOPE = "model"


class Bound(str, Enum):
    MEMORY_BOUND = "memory"
    COMPUTE_BOUND = "compute"


class SolResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    latency_s: float = Field(ge=0)
    ai: float = Field(ge=0)
    bound: Bound
    engine: EngineClass
    flops: int = Field(ge=0)
    total_bytes: int = Field(gt=0)


class LayerSol(BaseModel):
    model_config = ConfigDict(frozen=True)

    layer_id: str
    config: SparsityConfig
    sol: SolResult
    cost: CostBreakdown


class ModelSol(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: str
    batch: int = Field(ge=1)
    config: SparsityConfig
    per_layer: List[LayerSol]
    total_latency_s: float = Field(ge=0)

    @model_validator(mode="after")
    def _total_is_sum(self):
        expected = math.fsum(layer.sol.latency_s for layer in self.per_layer)
        if not math.isclose(self.total_latency_s, expected, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(f"total_latency_s {self.total_latency_s} != sum of layers {expected}")
        return self

    @property
    def total_flops(self) -> int:
        return sum(layer.sol.flops for layer in self.per_layer)

    @property
    def total_bytes(self) -> int:
        return sum(layer.sol.total_bytes for layer in self.per_layer)

    def total_cost(self) -> CostBreakdown:
        costs = [layer.cost for layer in self.per_layer]
        return CostBreakdown(
            flops=sum(cost.flops for cost in costs),
            weight_value_bytes=sum(cost.weight_value_bytes for cost in costs),
            index_bytes=sum(cost.index_bytes for cost in costs),
            input_feature_bytes=sum(cost.input_feature_bytes for cost in costs),
            output_feature_bytes=sum(cost.output_feature_bytes for cost in costs),
            total_bytes=sum(cost.total_bytes for cost in costs),
        )

    def layer(self, layer_id: str) -> LayerSol | None:
        return next((layer for layer in self.per_layer if layer.layer_id == layer_id), None)


class SpeedupRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: str
    batch: int = Field(default=1, ge=1)
    config: SparsityConfig
    dense_sol_s: float = Field(gt=0)
    sparse_sol_s: float = Field(gt=0)
    speedup: float = Field(gt=0)
    flop_speedup: float | None = None

    @model_validator(mode="after")
    def _speedup_is_ratio(self):
        if not math.isclose(self.speedup, self.dense_sol_s / self.sparse_sol_s, rel_tol=1e-12):
            raise ValueError("speedup must equal dense_sol_s / sparse_sol_s")
        return self


class Measurement(BaseModel):
    """Externally measured latency of one layer, or of the whole model when scope is 'model'."""
    model_config = ConfigDict(frozen=True)

    scope: str = Field(min_length=1)
    config: SparsityConfig
    measured_latency_s: float = Field(gt=0)

    @property
    def is_model_scope(self) -> bool:
        return self.scope == MODEL_SCOPE


class RooflinePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    ai: float = Field(ge=0)
    achieved_flops_s: float = Field(ge=0)
    label: str = ""


class ValidationRow(BaseModel):
    """One measurement checked against its speed-of-light prediction."""
    model_config = ConfigDict(frozen=True)

    scope: str
    config: SparsityConfig
    sol_latency_s: float
    measured_latency_s: float
    percent_of_sol: float
    ai: float
    achieved_flops_s: float
    under_roof: bool
    dense_percent_of_sol: float | None = None
    percent_gap: float | None = None
    predicted_speedup: float | None = None
    measured_speedup: float | None = None
    verdict: str = ""


class GridCell(BaseModel):
    """Dense baseline, sparse evaluation and their speedup for one (model, config, batch)."""
    model_config = ConfigDict(frozen=True)

    dense: ModelSol
    sparse: ModelSol
    record: SpeedupRecord

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sparsity_roofline.models.sparsity_model import SparsityConfig


class SparsePattern(BaseModel):
    """Zero-based positions of the nonzeros of an nrows x ncols weight matrix."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nrows: int = Field(ge=1)
    ncols: int = Field(ge=1)
    rows: np.ndarray
    cols: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _as_index_arrays(cls, data):
        if isinstance(data, dict):
            data = dict(data)
            if "coords" in data:
                coords = np.asarray(list(data.pop("coords")), dtype=np.int64).reshape(-1, 2)
                data["rows"], data["cols"] = coords[:, 0], coords[:, 1]
            for key in ("rows", "cols"):
                data[key] = np.asarray(data.get(key, []), dtype=np.int64).reshape(-1)
        return data

    @model_validator(mode="after")
    def _coords_valid(self):
        if self.rows.shape != self.cols.shape:
            raise ValueError("rows and cols must have the same length")
        if self.rows.size:
            if self.rows.min() < 0 or self.rows.max() >= self.nrows:
                raise ValueError(f"row index out of range for {self.nrows} rows")
            if self.cols.min() < 0 or self.cols.max() >= self.ncols:
                raise ValueError(f"column index out of range for {self.ncols} columns")
            if np.unique(self.linear_index()).size != self.rows.size:
                raise ValueError("coordinates must be unique")
        return self

    @property
    def nnz(self) -> int:
        return int(self.rows.size)

    @property
    def coords(self) -> List[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    @property
    def level(self) -> float:
        return 1.0 - self.nnz / (self.nrows * self.ncols)

    def linear_index(self) -> np.ndarray:
        return self.rows * self.ncols + self.cols

    def sorted_coords(self) -> List[tuple[int, int]]:
        order = np.argsort(self.linear_index(), kind="stable")
        return list(zip(self.rows[order].tolist(), self.cols[order].tolist()))


class BlockOccupancy(BaseModel):
    model_config = ConfigDict(frozen=True)

    b_h: int = Field(ge=1)
    b_w: int = Field(ge=1)
    nonzero_blocks: int = Field(ge=0)
    fill_ratio: float = Field(gt=0, le=1)


class MatrixStats(BaseModel):
    """One statistics row of a profiled matrix at one block size."""
    model_config = ConfigDict(frozen=True)

    name: str
    nrows: int
    ncols: int
    nnz: int
    level: float
    b_h: int
    b_w: int
    nonzero_blocks: int
    fill_ratio: float


class TrafficRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    layer_id: str
    weight_bytes: int
    feature_bytes: int

    @property
    def total_bytes(self) -> int:
        return self.weight_bytes + self.feature_bytes

    @property
    def feature_share(self) -> float:
        return self.feature_bytes / self.total_bytes


class TrafficBreakdown(BaseModel):
    """Weight (values + index) versus feature bytes per layer and summed for the model."""
    model_config = ConfigDict(frozen=True)

    model: str
    batch: int
    config: SparsityConfig
    layers: List[TrafficRow]

    @property
    def weight_bytes(self) -> int:
        return sum(row.weight_bytes for row in self.layers)

    @property
    def feature_bytes(self) -> int:
        return sum(row.feature_bytes for row in self.layers)

    @property
    def total_bytes(self) -> int:
        return self.weight_bytes + self.feature_bytes

    @property
    def feature_share(self) -> float:
        return self.feature_bytes / self.total_bytes

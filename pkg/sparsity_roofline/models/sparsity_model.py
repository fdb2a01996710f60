from enum import Enum
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sparsity_roofline.models.network_model import MatmulShape
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.formatting import fmt

NonNegative = Annotated[int, Field(ge=0)]


class PatternKind(str, Enum):
    DENSE = "dense"
    UNSTRUCTURED = "unstructured"
    BLOCK = "block"
    NOFM = "nm"


class DensePattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["dense"] = "dense"

    @property
    def label(self) -> str:
        return "dense"


class UnstructuredPattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["unstructured"] = "unstructured"

    @property
    def label(self) -> str:
        return "unstructured"


class BlockPattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["block"] = "block"
    b_h: int = Field(ge=1)
    b_w: int = Field(ge=1)

    @property
    def label(self) -> str:
        return f"block:{self.b_h}x{self.b_w}"

    @property
    def size(self) -> int:
        return self.b_h * self.b_w


class NofMPattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["nm"] = "nm"
    n_keep: int = Field(ge=1)
    m_group: int = Field(ge=2)

    @model_validator(mode="after")
    def _keep_less_than_group(self):
        if self.n_keep >= self.m_group:
            raise ValueError(f"n_keep ({self.n_keep}) must be < m_group ({self.m_group})")
        return self

    @property
    def label(self) -> str:
        return f"nm:{self.n_keep}:{self.m_group}"

    @property
    def level(self) -> float:
        return 1.0 - self.n_keep / self.m_group


SparsityPattern = Annotated[
    Union[DensePattern, UnstructuredPattern, BlockPattern, NofMPattern],
    Field(discriminator="kind"),
]


class SparsityConfig(BaseModel):
    """A sparsity pattern plus the fraction of zero weights it is pruned to."""
    model_config = ConfigDict(frozen=True)

    pattern: SparsityPattern
    level: float = Field(default=0.0, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _level_matches_pattern(self):
        if isinstance(self.pattern, DensePattern) and self.level != 0.0:
            raise ValueError(Errors.DENSE_LEVEL.format(level=self.level))
        if isinstance(self.pattern, NofMPattern) and abs(self.level - self.pattern.level) > 1e-9:
            raise ValueError(Errors.NM_LEVEL.format(
                n=self.pattern.n_keep, m=self.pattern.m_group, expected=self.pattern.level, level=self.level,
            ))
        return self

    @classmethod
    def dense(cls) -> "SparsityConfig":
        return cls(pattern=DensePattern())

    @classmethod
    def unstructured(cls, level: float) -> "SparsityConfig":
        return cls(pattern=UnstructuredPattern(), level=level)

    @classmethod
    def block(cls, b_h: int, b_w: int, level: float) -> "SparsityConfig":
        return cls(pattern=BlockPattern(b_h=b_h, b_w=b_w), level=level)

    @classmethod
    def nofm(cls, n_keep: int, m_group: int) -> "SparsityConfig":
        pattern = NofMPattern(n_keep=n_keep, m_group=m_group)
        return cls(pattern=pattern, level=pattern.level)

    @property
    def kind(self) -> PatternKind:
        return PatternKind(self.pattern.kind)

    @property
    def pattern_label(self) -> str:
        return self.pattern.label

    def encode(self) -> str:
        """Inverse of the CLI encoding: dense, unstructured:0.875, block:4x4:0.875, nm:2:4."""
        if self.kind in (PatternKind.DENSE, PatternKind.NOFM):
            return self.pattern_label
        return f"{self.pattern_label}:{fmt(self.level)}"


class DTypeWidths(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    value_bytes: int = Field(default=2, ge=1)
    index_bytes: int = Field(default=4, ge=1)
    pointer_bytes: int = Field(default=4, ge=1)


class FormatInstance(BaseModel):
    """Concrete stored-element counts a sparsity config implies for one weight matrix."""
    model_config = ConfigDict(frozen=True)

    config: SparsityConfig
    shape: MatmulShape
    stored_nnz: NonNegative
    index_elements: NonNegative = 0
    pointer_elements: NonNegative = 0
    index_bits_per_nnz: NonNegative = 0

    @model_validator(mode="after")
    def _counts_consistent(self):
        total = self.shape.m * self.shape.k
        if self.stored_nnz > total:
            raise ValueError(f"stored_nnz {self.stored_nnz} exceeds m*k = {total}")
        pattern = self.config.pattern
        if isinstance(pattern, BlockPattern) and self.stored_nnz % pattern.size:
            raise ValueError(f"stored_nnz {self.stored_nnz} is not a multiple of block size {pattern.size}")
        if isinstance(pattern, DensePattern):
            if self.stored_nnz != total or self.index_elements or self.pointer_elements:
                raise ValueError("dense instance must store m*k values and no index data")
        return self


class CostBreakdown(BaseModel):
    """FLOPs and bytes moved by one (Sp)MM, itemized by operand."""
    model_config = ConfigDict(frozen=True)

    flops: NonNegative
    weight_value_bytes: NonNegative
    index_bytes: NonNegative
    input_feature_bytes: NonNegative
    output_feature_bytes: NonNegative
    total_bytes: NonNegative

    @model_validator(mode="after")
    def _total_is_sum(self):
        expected = (self.weight_value_bytes + self.index_bytes
                    + self.input_feature_bytes + self.output_feature_bytes)
        if self.total_bytes != expected:
            raise ValueError(f"total_bytes {self.total_bytes} != sum of parts {expected}")
        return self

    @property
    def weight_bytes(self) -> int:
        return self.weight_value_bytes + self.index_bytes

    @property
    def feature_bytes(self) -> int:
        return self.input_feature_bytes + self.output_feature_bytes

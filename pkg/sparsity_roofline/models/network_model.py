from typing import Annotated, List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sparsity_roofline.utils.constants import Errors

Count = Annotated[int, Field(ge=1)]


class MatmulShape(BaseModel):
    """Sparse (weight) operand is m x k, dense (feature) operand is k x n."""
    model_config = ConfigDict(frozen=True)

    m: Count
    k: Count
    n: Count


class BaseLayer(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(min_length=1)
    prunable: bool = True


class ConvLayer(BaseLayer):
    kind: Literal["conv"] = "conv"
    c_in: Count
    c_out: Count
    kernel_h: Count
    kernel_w: Count
    stride: Count = 1
    padding: Annotated[int, Field(ge=0)] = 0
    in_h: Count
    in_w: Count
    groups: Count = 1


class LinearLayer(BaseLayer):
    kind: Literal["linear"] = "linear"
    in_features: Count
    out_features: Count
    tokens_per_sample: Count = 1


class RawMatmulLayer(BaseLayer):
    kind: Literal["raw_matmul"] = "raw_matmul"
    m: Count
    k: Count
    n_per_sample: Count = 1


LayerSpec = Annotated[Union[ConvLayer, LinearLayer, RawMatmulLayer], Field(discriminator="kind")]


class LayerBlock(BaseModel):
    """A run of layers repeated `repeat` times, expanded when the spec is loaded."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["block"] = "block"
    id: str = Field(min_length=1)
    repeat: Count = 1
    layers: List[LayerSpec] = Field(min_length=1)


SpecEntry = Annotated[Union[ConvLayer, LinearLayer, RawMatmulLayer, LayerBlock], Field(discriminator="kind")]


class ModelSpecFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    batch: Count = 1
    layers: List[SpecEntry] = Field(min_length=1)


class ModelGraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    layers: List[LayerSpec]
    batch: Count = 1

    @model_validator(mode="after")
    def _check_layers(self):
        seen = set()
        for layer in self.layers:
            if layer.id in seen:
                raise ValueError(Errors.DUPLICATE_LAYER_ID.format(layer_id=layer.id))
            seen.add(layer.id)

        if not any(layer.prunable for layer in self.layers):
            raise ValueError(Errors.NO_PRUNABLE_LAYERS.format(model=self.name))
        return self

    def layer(self, layer_id: str) -> LayerSpec | None:
        return next((layer for layer in self.layers if layer.id == layer_id), None)

from typing import List, Tuple

from sparsity_roofline.models.network_model import (
    ConvLayer, LayerSpec, LinearLayer, MatmulShape, ModelGraph, RawMatmulLayer,
)
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.exceptions import InvalidGeometryError, ModelSpecError


def conv_output_hw(layer: ConvLayer) -> Tuple[int, int]:
    out_h = (layer.in_h + 2 * layer.padding - layer.kernel_h) // layer.stride + 1
    out_w = (layer.in_w + 2 * layer.padding - layer.kernel_w) // layer.stride + 1
    return out_h, out_w


def lower_layer(layer: LayerSpec, batch: int) -> MatmulShape:
    """
    Lowers a layer to the (m, k, n) matmul it executes. Convolutions use the implicit-GEMM
    (im2col) shape with no cost charged for the im2col buffer.
    """
    if isinstance(layer, ConvLayer):
        if layer.groups != 1:
            raise ModelSpecError(Errors.GROUPED_CONV.format(layer_id=layer.id, groups=layer.groups))
        out_h, out_w = conv_output_hw(layer)
        if out_h < 1 or out_w < 1:
            raise InvalidGeometryError(Errors.INVALID_GEOMETRY.format(layer_id=layer.id, out_h=out_h, out_w=out_w))
        return MatmulShape(
            m=layer.c_out,
            k=layer.c_in * layer.kernel_h * layer.kernel_w,
            n=batch * out_h * out_w,
        )

    if isinstance(layer, LinearLayer):
        return MatmulShape(m=layer.out_features, k=layer.in_features, n=batch * layer.tokens_per_sample)

    if isinstance(layer, RawMatmulLayer):
        return MatmulShape(m=layer.m, k=layer.k, n=batch * layer.n_per_sample)

    raise ModelSpecError(f"Layer '{layer.id}': unsupported layer kind")


def direct_conv_flops(layer: ConvLayer, batch: int) -> int:
    """FLOPs of a direct convolution (2 per multiply-accumulate)."""
    out_h, out_w = conv_output_hw(layer)
    return 2 * layer.c_out * layer.c_in * layer.kernel_h * layer.kernel_w * batch * out_h * out_w


def with_batch(graph: ModelGraph, batch: int) -> ModelGraph:
    return ModelGraph(name=graph.name, layers=graph.layers, batch=batch)


def lowered_layers(graph: ModelGraph) -> List[Tuple[LayerSpec, MatmulShape]]:
    return [(layer, lower_layer(layer, graph.batch)) for layer in graph.layers]

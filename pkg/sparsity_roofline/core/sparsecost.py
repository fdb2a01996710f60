"""
Stored-element, FLOP and byte accounting for dense, CSR (unstructured), BSR (block) and
N:M weight formats.
"""
import math
from typing import List, Tuple

from pydantic import ValidationError

from sparsity_roofline.models.network_model import MatmulShape
from sparsity_roofline.models.sparsity_model import (
    BlockPattern, CostBreakdown, DensePattern, DTypeWidths, FormatInstance, NofMPattern,
    SparsityConfig, SparsityPattern, UnstructuredPattern,
)
from sparsity_roofline.utils.constants import Defaults, Errors
from sparsity_roofline.utils.exceptions import ConfigError, CostOverflowError, SparsityConfigError
from sparsity_roofline.utils.validation import first_error


def _round_half_up(value: float, upper: int) -> int:
    return min(max(math.floor(value + 0.5), 0), upper)


def nm_index_bits(m_group: int) -> int:
    """Bits needed to address one position inside an M-wide group (log2 M)."""
    return (m_group - 1).bit_length()


def check_compatible(config: SparsityConfig, shape: MatmulShape) -> None:
    pattern = config.pattern
    if isinstance(pattern, BlockPattern) and (shape.m % pattern.b_h or shape.k % pattern.b_w):
        raise SparsityConfigError(Errors.BLOCK_DIVISIBILITY.format(b_h=pattern.b_h, b_w=pattern.b_w, m=shape.m, k=shape.k))
    if isinstance(pattern, NofMPattern) and shape.k % pattern.m_group:
        raise SparsityConfigError(Errors.NM_DIVISIBILITY.format(m_group=pattern.m_group, k=shape.k))


def is_compatible(config: SparsityConfig, shape: MatmulShape) -> bool:
    try:
        check_compatible(config, shape)
    except SparsityConfigError:
        return False
    return True


def instantiate(config: SparsityConfig, shape: MatmulShape) -> FormatInstance:
    check_compatible(config, shape)
    pattern = config.pattern
    total = shape.m * shape.k

    if isinstance(pattern, DensePattern):
        return FormatInstance(config=config, shape=shape, stored_nnz=total)

    if isinstance(pattern, UnstructuredPattern):
        stored = _round_half_up((1.0 - config.level) * total, total)
        return FormatInstance(
            config=config, shape=shape, stored_nnz=stored,
            index_elements=stored, pointer_elements=shape.m + 1,
        )

    if isinstance(pattern, BlockPattern):
        block_rows = shape.m // pattern.b_h
        all_blocks = block_rows * (shape.k // pattern.b_w)
        blocks = _round_half_up((1.0 - config.level) * all_blocks, all_blocks)
        # Zero fill inside a kept block is stored and multiplied.
        return FormatInstance(
            config=config, shape=shape, stored_nnz=blocks * pattern.size,
            index_elements=blocks, pointer_elements=block_rows + 1,
        )

    # N:M keeps exactly n of every m along k and needs no row pointers.
    return FormatInstance(
        config=config, shape=shape,
        stored_nnz=total // pattern.m_group * pattern.n_keep,
        index_bits_per_nnz=nm_index_bits(pattern.m_group),
    )


def flops(inst: FormatInstance) -> int:
    """2 FLOPs per multiply-accumulate over the stored values."""
    return 2 * inst.stored_nnz * inst.shape.n


def _checked(what: str, value: int) -> int:
    if value > Defaults.MAX_COUNT:
        raise CostOverflowError(Errors.COST_OVERFLOW.format(what=what, value=value))
    return value


def bytes_moved(inst: FormatInstance, widths: DTypeWidths) -> CostBreakdown:
    shape = inst.shape
    weight_value_bytes = _checked("weight values", inst.stored_nnz * widths.value_bytes)
    index_bytes = _checked("index data", (
        inst.index_elements * widths.index_bytes
        + inst.pointer_elements * widths.pointer_bytes
        + (inst.stored_nnz * inst.index_bits_per_nnz + 7) // 8
    ))
    input_feature_bytes = _checked("input features", shape.n * shape.k * widths.value_bytes)
    output_feature_bytes = _checked("output features", shape.m * shape.n * widths.value_bytes)
    total = _checked("total bytes", weight_value_bytes + index_bytes + input_feature_bytes + output_feature_bytes)

    return CostBreakdown(
        flops=_checked("FLOPs", flops(inst)),
        weight_value_bytes=weight_value_bytes,
        index_bytes=index_bytes,
        input_feature_bytes=input_feature_bytes,
        output_feature_bytes=output_feature_bytes,
        total_bytes=total,
    )


def layer_cost(config: SparsityConfig, shape: MatmulShape, widths: DTypeWidths) -> Tuple[FormatInstance, CostBreakdown]:
    inst = instantiate(config, shape)
    return inst, bytes_moved(inst, widths)


def sparsity_sweep(start_level: float, steps: int) -> List[float]:
    """Levels that halve the remaining nonzeros at every step: s' = s + (1 - s) / 2."""
    if not 0.0 < start_level < 1.0 or steps < 1:
        raise ConfigError(f"Sweep needs 0 < start < 1 and steps >= 1, got start={start_level}, steps={steps}")

    levels = [start_level]
    for _ in range(steps - 1):
        levels.append(levels[-1] + (1.0 - levels[-1]) / 2.0)
    return levels


def _parse_int(text: str, encoding: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SparsityConfigError(Errors.SPARSITY_ENCODING.format(text=encoding, detail=f"'{text}' is not an integer"))


def _parse_level(text: str, encoding: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SparsityConfigError(Errors.SPARSITY_ENCODING.format(text=encoding, detail=f"'{text}' is not a level"))


def parse_pattern(label: str) -> SparsityPattern:
    """Parses a pattern label without level: dense, unstructured, block:4x4, nm:2:4."""
    parts = label.strip().lower().split(":")
    try:
        if parts == ["dense"]:
            return DensePattern()
        if parts == ["unstructured"]:
            return UnstructuredPattern()
        if parts[0] == "block" and len(parts) == 2 and "x" in parts[1]:
            b_h, b_w = parts[1].split("x", 1)
            return BlockPattern(b_h=_parse_int(b_h, label), b_w=_parse_int(b_w, label))
        if parts[0] == "nm" and len(parts) == 3:
            return NofMPattern(n_keep=_parse_int(parts[1], label), m_group=_parse_int(parts[2], label))
    except ValidationError as exc:
        raise SparsityConfigError(Errors.SPARSITY_ENCODING.format(text=label, detail=first_error(exc)[1]))

    raise SparsityConfigError(Errors.SPARSITY_ENCODING.format(
        text=label, detail="expected dense, unstructured, block:<h>x<w> or nm:<n>:<m>",
    ))


def config_from_pattern(pattern: SparsityPattern, level: float | None, encoding: str = "") -> SparsityConfig:
    if isinstance(pattern, NofMPattern) and level is None:
        level = pattern.level
    try:
        return SparsityConfig(pattern=pattern, level=level if level is not None else 0.0)
    except ValidationError as exc:
        raise SparsityConfigError(Errors.SPARSITY_ENCODING.format(text=encoding or pattern.label, detail=first_error(exc)[1]))


def parse_sparsity(text: str) -> SparsityConfig:
    """
    Parses the CLI encoding: dense, unstructured:0.875, block:4x4:0.875, nm:2:4.
    """
    parts = text.strip().lower().split(":")
    if parts[0] in ("unstructured", "block"):
        if len(parts) < 2:
            raise SparsityConfigError(Errors.SPARSITY_ENCODING.format(text=text, detail="missing sparsity level"))
        pattern = parse_pattern(":".join(parts[:-1]))
        return config_from_pattern(pattern, _parse_level(parts[-1], text), text)
    return config_from_pattern(parse_pattern(text), None, text)

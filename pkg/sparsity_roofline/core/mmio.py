"""
Exact format accounting derived from real pruned-weight patterns.
"""
from typing import Iterable, List, Tuple

import numpy as np

from sparsity_roofline.core.sparsecost import nm_index_bits
from sparsity_roofline.models.matrix_model import BlockOccupancy, MatrixStats, SparsePattern
from sparsity_roofline.models.network_model import MatmulShape
from sparsity_roofline.models.sparsity_model import (
    BlockPattern, DensePattern, FormatInstance, NofMPattern, SparsityConfig, UnstructuredPattern,
)
from sparsity_roofline.utils.constants import Errors, Messages
from sparsity_roofline.utils.exceptions import PatternConstraintError
from sparsity_roofline.utils.logger import logger


def block_occupancy(p: SparsePattern, b_h: int, b_w: int) -> BlockOccupancy:
    if p.nrows % b_h or p.ncols % b_w:
        raise PatternConstraintError(Errors.BLOCK_PATTERN_DIVISIBILITY.format(
            b_h=b_h, b_w=b_w, nrows=p.nrows, ncols=p.ncols,
        ))

    block_ids = (p.rows // b_h) * (p.ncols // b_w) + p.cols // b_w
    nonzero_blocks = int(np.unique(block_ids).size)
    # An empty pattern has no blocks to fill; report full by convention.
    fill_ratio = p.nnz / (nonzero_blocks * b_h * b_w) if nonzero_blocks else 1.0
    return BlockOccupancy(b_h=b_h, b_w=b_w, nonzero_blocks=nonzero_blocks, fill_ratio=fill_ratio)


def check_nofm(p: SparsePattern, n_keep: int, m_group: int) -> None:
    """Every group of m_group consecutive columns in a row may hold at most n_keep nonzeros."""
    if p.ncols % m_group:
        raise PatternConstraintError(Errors.NM_DIVISIBILITY.format(m_group=m_group, k=p.ncols))

    groups_per_row = p.ncols // m_group
    counts = np.bincount(p.rows * groups_per_row + p.cols // m_group, minlength=p.nrows * groups_per_row)
    offending = np.flatnonzero(counts > n_keep)
    if offending.size:
        group = int(offending[0])
        raise PatternConstraintError(Errors.NM_CONSTRAINT.format(
            n=n_keep, m=m_group, row=group // groups_per_row, group=group % groups_per_row, count=int(counts[group]),
        ))


def instance_from_pattern(p: SparsePattern, config: SparsityConfig, n: int = 1) -> FormatInstance:
    """
    Builds the exact FormatInstance of a real pattern. The level is recomputed from the
    pattern; the config only selects the format.
    """
    shape = MatmulShape(m=p.nrows, k=p.ncols, n=n)
    pattern = config.pattern

    if isinstance(pattern, DensePattern):
        return FormatInstance(config=config, shape=shape, stored_nnz=p.nrows * p.ncols)

    if isinstance(pattern, NofMPattern):
        check_nofm(p, pattern.n_keep, pattern.m_group)
        return FormatInstance(
            config=SparsityConfig.nofm(pattern.n_keep, pattern.m_group), shape=shape,
            stored_nnz=p.nrows * p.ncols // pattern.m_group * pattern.n_keep,
            index_bits_per_nnz=nm_index_bits(pattern.m_group),
        )

    if p.nnz == 0:
        raise PatternConstraintError(f"Pattern has no nonzeros; a {pattern.label} level of 1.0 is undefined")

    if isinstance(pattern, UnstructuredPattern):
        return FormatInstance(
            config=SparsityConfig.unstructured(p.level), shape=shape, stored_nnz=p.nnz,
            index_elements=p.nnz, pointer_elements=p.nrows + 1,
        )

    occupancy = block_occupancy(p, pattern.b_h, pattern.b_w)
    return FormatInstance(
        config=SparsityConfig.block(pattern.b_h, pattern.b_w, p.level), shape=shape,
        stored_nnz=occupancy.nonzero_blocks * pattern.size,
        index_elements=occupancy.nonzero_blocks,
        pointer_elements=p.nrows // pattern.b_h + 1,
    )


def profile_matrix(name: str, p: SparsePattern, block_sizes: Iterable[Tuple[int, int]]) -> List[MatrixStats]:
    rows = []
    for b_h, b_w in block_sizes:
        try:
            occupancy = block_occupancy(p, b_h, b_w)
        except PatternConstraintError as exc:
            logger.warning(Messages.SKIPPED_BLOCK.format(b_h=b_h, b_w=b_w, name=name, detail=exc))
            continue
        rows.append(MatrixStats(
            name=name, nrows=p.nrows, ncols=p.ncols, nnz=p.nnz, level=p.level,
            b_h=b_h, b_w=b_w, nonzero_blocks=occupancy.nonzero_blocks, fill_ratio=occupancy.fill_ratio,
        ))
    return rows

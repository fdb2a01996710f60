import numpy as np
import pytest

from sparsity_roofline.core.sparsecost import (
    bytes_moved, check_compatible, flops, instantiate, is_compatible, layer_cost, nm_index_bits,
    parse_pattern, parse_sparsity, sparsity_sweep,
)
from sparsity_roofline.models.network_model import MatmulShape
from sparsity_roofline.models.sparsity_model import (
    BlockPattern, DTypeWidths, FormatInstance, PatternKind, SparsityConfig,
)
from sparsity_roofline.utils.exceptions import ConfigError, CostOverflowError, SparsityConfigError

widths = DTypeWidths()
vit_mlp_shape = MatmulShape(m=3072, k=768, n=6272)


def test_dense_instance_stores_everything():
    shape = MatmulShape(m=8, k=16, n=4)
    inst = instantiate(SparsityConfig.dense(), shape)
    cost = bytes_moved(inst, widths)

    assert inst.stored_nnz == 128
    assert cost.index_bytes == 0
    assert cost.flops == 2 * 8 * 16 * 4
    assert cost.total_bytes == 2 * (8 * 16 + 16 * 4 + 8 * 4)


def test_csr_index_data_is_nnz_plus_rows_plus_one():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        shape = MatmulShape(m=int(rng.integers(1, 512)), k=int(rng.integers(1, 512)), n=int(rng.integers(1, 64)))
        inst = instantiate(SparsityConfig.unstructured(float(rng.uniform(0.0, 0.999))), shape)

        assert inst.index_elements + inst.pointer_elements == inst.stored_nnz + shape.m + 1
        assert bytes_moved(inst, widths).index_bytes == 4 * (inst.stored_nnz + shape.m + 1)


def test_dense_and_unstructured_at_zero_do_the_same_work():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        shape = MatmulShape(m=int(rng.integers(1, 512)), k=int(rng.integers(1, 512)), n=int(rng.integers(1, 64)))
        dense = instantiate(SparsityConfig.dense(), shape)
        csr = instantiate(SparsityConfig.unstructured(0.0), shape)

        assert flops(dense) == flops(csr) == 2 * shape.m * shape.k * shape.n
        assert csr.stored_nnz == dense.stored_nnz


def test_unstructured_rounds_half_up():
    inst = instantiate(SparsityConfig.unstructured(0.5), MatmulShape(m=1, k=3, n=1))

    assert inst.stored_nnz == 2


def test_block_index_times_block_size_is_stored():
    rng = np.random.default_rng(1)
    for _ in range(500):
        b_h, b_w = (int(b) for b in rng.choice([1, 2, 4, 8, 16, 32], size=2))
        shape = MatmulShape(m=b_h * int(rng.integers(1, 40)), k=b_w * int(rng.integers(1, 40)), n=1)
        inst = instantiate(SparsityConfig.block(b_h, b_w, float(rng.uniform(0.0, 0.99))), shape)

        assert inst.index_elements * b_h * b_w == inst.stored_nnz
        assert inst.pointer_elements == shape.m // b_h + 1


def test_nofm_index_bits():
    assert nm_index_bits(4) == 2
    assert nm_index_bits(8) == 3
    assert nm_index_bits(16) == 4


def test_nofm_instance():
    inst = instantiate(SparsityConfig.nofm(2, 4), MatmulShape(m=4, k=4, n=1))
    cost = bytes_moved(inst, widths)

    assert inst.stored_nnz == 8
    assert inst.index_elements == inst.pointer_elements == 0
    assert cost.index_bytes == 2


def test_nofm_keeps_n_of_every_m():
    inst = instantiate(SparsityConfig.nofm(2, 16), vit_mlp_shape)

    assert inst.stored_nnz == 3072 * 768 // 8
    assert inst.index_bits_per_nnz == 4


def test_block_must_divide_the_weight_matrix():
    config = SparsityConfig.block(4, 4, 0.5)

    with pytest.raises(SparsityConfigError, match="does not divide"):
        check_compatible(config, MatmulShape(m=6, k=8, n=1))
    assert not is_compatible(config, MatmulShape(m=8, k=6, n=1))
    assert is_compatible(config, MatmulShape(m=8, k=8, n=1))


def test_nofm_group_must_divide_k():
    with pytest.raises(SparsityConfigError, match="k=6"):
        instantiate(SparsityConfig.nofm(2, 4), MatmulShape(m=4, k=6, n=1))


def test_vit_mlp_flop_counts():
    dense_blocks = FormatInstance(
        config=SparsityConfig.block(32, 32, 0.1736), shape=vit_mlp_shape, stored_nnz=1_949_696,
        index_elements=1904, pointer_elements=97,
    )
    unstructured = FormatInstance(
        config=SparsityConfig.unstructured(0.4787), shape=vit_mlp_shape, stored_nnz=1_230_000,
        index_elements=1_230_000, pointer_elements=3073,
    )

    assert flops(dense_blocks) == pytest.approx(24.4e9, rel=0.01)
    assert flops(unstructured) == pytest.approx(15.5e9, rel=0.01)


def test_vit_mlp_block_level_reproduces_stored_count():
    inst = instantiate(SparsityConfig.block(32, 32, 0.1736), vit_mlp_shape)

    assert inst.stored_nnz == 1_949_696


def test_bytes_are_itemized():
    inst, cost = layer_cost(SparsityConfig.unstructured(0.875), MatmulShape(m=64, k=64, n=8), widths)

    assert cost.weight_value_bytes == inst.stored_nnz * 2
    assert cost.input_feature_bytes == 8 * 64 * 2
    assert cost.output_feature_bytes == 64 * 8 * 2
    assert cost.weight_bytes + cost.feature_bytes == cost.total_bytes


def test_custom_widths_change_bytes():
    shape = MatmulShape(m=16, k=16, n=16)
    narrow = bytes_moved(instantiate(SparsityConfig.unstructured(0.5), shape), DTypeWidths(index_bytes=2, pointer_bytes=2))
    wide = bytes_moved(instantiate(SparsityConfig.unstructured(0.5), shape), widths)

    assert narrow.index_bytes * 2 == wide.index_bytes


def test_overflowing_counts_raise():
    huge = MatmulShape(m=2**40, k=2**40, n=1)

    with pytest.raises(CostOverflowError, match="weight values"):
        bytes_moved(instantiate(SparsityConfig.dense(), huge), widths)


def test_sparsity_sweep_halves_the_remaining_nonzeros():
    assert sparsity_sweep(0.5, 5) == [0.5, 0.75, 0.875, 0.9375, 0.96875]
    assert sparsity_sweep(0.3, 1) == [0.3]


@pytest.mark.parametrize("start, steps", [(0.0, 3), (1.0, 3), (0.5, 0)])
def test_sparsity_sweep_rejects_bad_arguments(start, steps):
    with pytest.raises(ConfigError):
        sparsity_sweep(start, steps)


@pytest.mark.parametrize("text", ["dense", "unstructured:0.875", "block:4x4:0.875", "nm:2:4", "block:2x8:0.5"])
def test_parse_sparsity_inverts_encode(text):
    assert parse_sparsity(text).encode() == text


def test_parse_sparsity_fields():
    block = parse_sparsity("BLOCK:4x8:0.75")
    nofm = parse_sparsity("nm:1:4")

    assert block.kind == PatternKind.BLOCK
    assert block.pattern == BlockPattern(b_h=4, b_w=8)
    assert block.level == 0.75
    assert nofm.level == 0.75


@pytest.mark.parametrize("text", [
    "unstructured", "unstructured:1.0", "unstructured:abc", "block:4x4", "block:0x4:0.5",
    "nm:4:4", "nm:2", "dense:0.5", "diagonal:0.5",
])
def test_parse_sparsity_rejects(text):
    with pytest.raises(SparsityConfigError):
        parse_sparsity(text)


def test_parse_pattern_labels():
    assert parse_pattern("block:16x16").label == "block:16x16"
    assert parse_pattern(" NM:2:8 ").label == "nm:2:8"

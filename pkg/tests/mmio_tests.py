import numpy as np
import pytest
import scipy.sparse as sp

from sparsity_roofline.core.mmio import block_occupancy, check_nofm, instance_from_pattern, profile_matrix
from sparsity_roofline.core.sparsecost import instantiate
from sparsity_roofline.crud.matrix_crud import find_matrix_files, read_matrix_market, write_matrix_market
from sparsity_roofline.models.matrix_model import SparsePattern
from sparsity_roofline.models.network_model import MatmulShape
from sparsity_roofline.models.sparsity_model import SparsityConfig
from sparsity_roofline.utils.exceptions import EmitError, MatrixMarketError, PatternConstraintError

identity_4 = SparsePattern(nrows=4, ncols=4, coords=[(i, i) for i in range(4)])


def write_mtx(tmp_path, text, name="m.mtx"):
    path = tmp_path / name
    path.write_text(text)
    return path


def pattern_from_mask(mask):
    rows, cols = np.nonzero(mask)
    return SparsePattern(nrows=mask.shape[0], ncols=mask.shape[1], rows=rows, cols=cols)


def test_read_coordinate_file(tmp_path):
    path = write_mtx(tmp_path, "\n".join([
        "%%MatrixMarket matrix coordinate real general",
        "% a comment",
        "3 4 3",
        "1 1 0.5",
        "3 4 -2",
        "2 2 0",
    ]) + "\n")
    pattern = read_matrix_market(path)

    assert (pattern.nrows, pattern.ncols, pattern.nnz) == (3, 4, 3)
    assert pattern.sorted_coords() == [(0, 0), (1, 1), (2, 3)]


def test_pattern_field_has_no_values(tmp_path):
    path = write_mtx(tmp_path, "%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n2 2\n")

    assert read_matrix_market(path).nnz == 2


@pytest.mark.parametrize("text, match", [
    ("2 2 1\n1 1\n", ":1: missing %%MatrixMarket banner"),
    ("%%MatrixMarket matrix array real general\n2 2\n", ":1: expected"),
    ("%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1 0\n", "unsupported field 'complex'"),
    ("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n", "unsupported symmetry"),
    ("%%MatrixMarket matrix coordinate real general\n2 2\n", ":2: expected 'nrows ncols nnz'"),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n", ":3: entry \\(3, 1\\) is outside a 2x2 matrix"),
    ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n", ":4: duplicate entry \\(1, 1\\)"),
    ("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n", "declared 3 entries, found 1"),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\nx 1 1\n", ":3: malformed entry"),
    ("", "missing %%MatrixMarket banner"),
])
def test_malformed_files_report_the_line(tmp_path, text, match):
    with pytest.raises(MatrixMarketError, match=match):
        read_matrix_market(write_mtx(tmp_path, text))


def test_write_then_read_keeps_the_pattern(tmp_path):
    rng = np.random.default_rng(5)
    pattern = pattern_from_mask(rng.random((9, 7)) < 0.3)

    path = write_matrix_market(pattern, tmp_path / "nested" / "out.mtx")

    assert read_matrix_market(path).sorted_coords() == pattern.sorted_coords()


def test_write_to_unwritable_location(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")

    with pytest.raises(EmitError):
        write_matrix_market(identity_4, blocker / "out.mtx")


def test_find_matrix_files_is_sorted_and_recursive(tmp_path):
    for name in ("b.mtx", "a.mtx", "sub/c.mtx", "notes.txt"):
        (tmp_path / name).parent.mkdir(parents=True, exist_ok=True)
        (tmp_path / name).write_text("")

    assert [path.relative_to(tmp_path).as_posix() for path in find_matrix_files(tmp_path)] == [
        "a.mtx", "b.mtx", "sub/c.mtx",
    ]


def test_identity_block_occupancy():
    occupancy = block_occupancy(identity_4, 2, 2)

    assert occupancy.nonzero_blocks == 2
    assert occupancy.fill_ratio == 0.5


def test_dense_block_occupancy_is_full():
    dense = pattern_from_mask(np.ones((4, 8), dtype=bool))
    occupancy = block_occupancy(dense, 2, 4)

    assert occupancy.nonzero_blocks == 4
    assert occupancy.fill_ratio == 1.0


def test_empty_pattern_has_no_blocks():
    occupancy = block_occupancy(SparsePattern(nrows=4, ncols=4, coords=[]), 2, 2)

    assert occupancy.nonzero_blocks == 0
    assert occupancy.fill_ratio == 1.0


def test_block_must_divide_the_pattern():
    with pytest.raises(PatternConstraintError, match="3x3"):
        block_occupancy(identity_4, 3, 3)


def test_profile_matrix_skips_block_sizes_that_do_not_divide():
    stats = profile_matrix("identity", identity_4, [(2, 2), (3, 3), (4, 4)])

    assert [(row.b_h, row.nonzero_blocks, row.fill_ratio) for row in stats] == [(2, 2, 0.5), (4, 1, 0.25)]
    assert stats[0].level == 0.75


def test_instance_from_identity():
    csr = instance_from_pattern(identity_4, SparsityConfig.unstructured(0.5))
    bsr = instance_from_pattern(identity_4, SparsityConfig.block(2, 2, 0.5))

    assert (csr.stored_nnz, csr.index_elements, csr.pointer_elements) == (4, 4, 5)
    assert csr.config.level == 0.75
    assert (bsr.stored_nnz, bsr.index_elements, bsr.pointer_elements) == (8, 2, 3)


def test_empty_pattern_has_no_sparse_instance():
    with pytest.raises(PatternConstraintError):
        instance_from_pattern(SparsePattern(nrows=2, ncols=2, coords=[]), SparsityConfig.unstructured(0.5))


def test_nofm_pattern_check():
    valid = SparsePattern(nrows=2, ncols=8, coords=[(0, 0), (0, 3), (0, 4), (0, 5), (1, 1), (1, 7)])
    invalid = SparsePattern(nrows=2, ncols=8, coords=[(0, 0), (1, 4), (1, 5), (1, 6)])

    check_nofm(valid, 2, 4)
    inst = instance_from_pattern(valid, SparsityConfig.nofm(2, 4))
    assert inst.stored_nnz == 8
    assert inst.index_bits_per_nnz == 2
    with pytest.raises(PatternConstraintError, match="row 1, group 1 \\(3 nonzeros\\)"):
        check_nofm(invalid, 2, 4)


def test_analytic_unstructured_counts_match_a_real_pattern():
    rng = np.random.default_rng(6)
    for _ in range(100):
        mask = rng.random((int(rng.integers(1, 40)), int(rng.integers(1, 40)))) < rng.uniform(0.05, 0.95)
        mask[0, 0] = True
        pattern = pattern_from_mask(mask)
        exact = instance_from_pattern(pattern, SparsityConfig.unstructured(0.5))
        analytic = instantiate(SparsityConfig.unstructured(pattern.level), MatmulShape(m=pattern.nrows, k=pattern.ncols, n=1))

        assert analytic.stored_nnz == exact.stored_nnz
        assert analytic.pointer_elements == exact.pointer_elements


def test_counts_agree_with_scipy_storage():
    rng = np.random.default_rng(8)
    for _ in range(500):
        b_h, b_w = (int(b) for b in rng.choice([1, 2, 4], size=2))
        nrows, ncols = b_h * int(rng.integers(1, 5)), b_w * int(rng.integers(1, 5))
        mask = rng.random((nrows, ncols)) < rng.uniform(0.05, 0.9)
        mask[rng.integers(nrows), rng.integers(ncols)] = True
        pattern = pattern_from_mask(mask)
        values = mask.astype(np.float64)

        csr = sp.csr_matrix(values)
        csr_inst = instance_from_pattern(pattern, SparsityConfig.unstructured(0.5))
        assert csr_inst.index_elements == csr.indices.size
        assert csr_inst.pointer_elements == csr.indptr.size

        bsr = sp.bsr_matrix(values, blocksize=(b_h, b_w))
        bsr_inst = instance_from_pattern(pattern, SparsityConfig.block(b_h, b_w, 0.5))
        assert bsr_inst.index_elements == bsr.indices.size
        assert bsr_inst.pointer_elements == bsr.indptr.size
        assert bsr_inst.stored_nnz == bsr.data.size

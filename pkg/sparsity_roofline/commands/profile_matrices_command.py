from pathlib import Path
from typing import Annotated, Iterable, List, Optional, Tuple

import typer

from sparsity_roofline.commands.common import OutOption, exit_on_error
from sparsity_roofline.core.mmio import profile_matrix
from sparsity_roofline.crud import report_crud
from sparsity_roofline.crud.matrix_crud import find_matrix_files, read_matrix_market
from sparsity_roofline.models.matrix_model import MatrixStats
from sparsity_roofline.utils.constants import Defaults, Errors
from sparsity_roofline.utils.exceptions import ConfigError, DataError, RooflineError
from sparsity_roofline.utils.logger import logger


def parse_block_size(text: str) -> Tuple[int, int]:
    b_h, sep, b_w = text.lower().partition("x")
    if not sep or not b_h.isdigit() or not b_w.isdigit() or int(b_h) < 1 or int(b_w) < 1:
        raise ConfigError(f"Invalid block size '{text}': expected <h>x<w>, e.g. 4x4")
    return int(b_h), int(b_w)


def cmd_profile_matrices(directory: Path, block_sizes: Iterable[Tuple[int, int]], out: Path) -> List[MatrixStats]:
    """
    One statistics row per MatrixMarket file per block size. Unreadable files are listed in
    the raised DataError after the rows of the readable ones are written.
    """
    files = find_matrix_files(directory)
    if not files:
        raise DataError(Errors.NO_MATRICES.format(directory=directory))

    block_sizes = list(block_sizes)
    stats, failures = [], []
    for path in files:
        name = path.relative_to(directory).as_posix()
        try:
            stats += profile_matrix(name, read_matrix_market(path), block_sizes)
        except RooflineError as exc:
            logger.error(f"Skipping {path}: {exc}")
            failures.append(str(path))
        logger.debug(f"profiled {name}")

    report_crud.write_csv(out / "matrix_stats.csv", report_crud.MATRIX_STATS_COLUMNS, report_crud.matrix_stats_rows(stats))
    if failures:
        raise DataError(f"{len(failures)} of {len(files)} matrices could not be read: {', '.join(failures)}")
    return stats


def profile_matrices(
    directory: Annotated[Path, typer.Argument(help="Directory searched recursively for *.mtx files.")],
    block: Annotated[Optional[List[str]], typer.Option("--block", help="Block size <h>x<w> (repeatable).")] = None,
    out: OutOption = None,
):
    """Nonzeros, level and block occupancy statistics of pruned MatrixMarket matrices."""
    logger.debug("call to profile-matrices")
    with exit_on_error():
        block_sizes = [parse_block_size(text) for text in block] if block else Defaults.BLOCK_SIZES
        cmd_profile_matrices(directory, block_sizes, out or Path("out"))

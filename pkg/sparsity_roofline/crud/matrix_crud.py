from pathlib import Path
from typing import List

from sparsity_roofline.models.matrix_model import SparsePattern
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.exceptions import EmitError, MatrixMarketError

BANNER = "%%matrixmarket"
SUPPORTED_FIELDS = ("real", "integer", "pattern")


def _header_error(path: Path, line: int, detail: str) -> MatrixMarketError:
    return MatrixMarketError(Errors.MM_HEADER.format(path=path, line=line, detail=detail))


def _parse_banner(path: Path, line_no: int, line: str) -> None:
    tokens = line.lower().split()
    if not tokens or tokens[0] != BANNER:
        raise _header_error(path, line_no, "missing %%MatrixMarket banner")
    if len(tokens) != 5 or tokens[1:3] != ["matrix", "coordinate"]:
        raise _header_error(path, line_no, "expected '%%MatrixMarket matrix coordinate <field> general'")
    if tokens[3] not in SUPPORTED_FIELDS:
        raise _header_error(path, line_no, f"unsupported field '{tokens[3]}'")
    if tokens[4] != "general":
        raise _header_error(path, line_no, f"unsupported symmetry '{tokens[4]}'")


def _ints(path: Path, line_no: int, tokens: List[str], count: int, what: str) -> List[int]:
    try:
        return [int(token) for token in tokens[:count]]
    except ValueError:
        raise _header_error(path, line_no, f"malformed {what} line")


def read_matrix_market(path: Path) -> SparsePattern:
    """
    Reads the nonzero positions of a coordinate MatrixMarket file; values are ignored and
    explicit zeros count as nonzeros. File indices are 1-based, the pattern's 0-based.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise MatrixMarketError(Errors.MM_HEADER.format(path=path, line=0, detail=exc))

    if not lines:
        raise _header_error(path, 1, "missing %%MatrixMarket banner")
    _parse_banner(path, 1, lines[0])

    size = None
    rows, cols, seen = [], [], set()
    for line_no, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens or tokens[0].startswith("%"):
            continue

        if size is None:
            if len(tokens) != 3:
                raise _header_error(path, line_no, "expected 'nrows ncols nnz' size line")
            size = _ints(path, line_no, tokens, 3, "size")
            if size[0] < 1 or size[1] < 1 or size[2] < 0:
                raise _header_error(path, line_no, f"invalid size {size[0]}x{size[1]} with {size[2]} entries")
            continue

        if len(tokens) < 2:
            raise _header_error(path, line_no, "malformed entry line")
        row, col = _ints(path, line_no, tokens, 2, "entry")
        nrows, ncols, _ = size
        if not (1 <= row <= nrows and 1 <= col <= ncols):
            raise MatrixMarketError(Errors.MM_BOUNDS.format(
                path=path, line=line_no, row=row, col=col, nrows=nrows, ncols=ncols,
            ))
        if (row, col) in seen:
            raise MatrixMarketError(Errors.MM_DUPLICATE.format(path=path, line=line_no, row=row, col=col))
        seen.add((row, col))
        rows.append(row - 1)
        cols.append(col - 1)

    if size is None:
        raise _header_error(path, len(lines), "missing size line")
    if len(rows) != size[2]:
        raise _header_error(path, len(lines), f"declared {size[2]} entries, found {len(rows)}")

    return SparsePattern(nrows=size[0], ncols=size[1], rows=rows, cols=cols)


def write_matrix_market(pattern: SparsePattern, path: Path) -> Path:
    """Writes a pattern-field coordinate file with entries in row-major order."""
    lines = [
        "%%MatrixMarket matrix coordinate pattern general",
        f"{pattern.nrows} {pattern.ncols} {pattern.nnz}",
    ]
    lines += [f"{row + 1} {col + 1}" for row, col in pattern.sorted_coords()]
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise EmitError(Errors.UNWRITABLE.format(path=path, detail=exc))
    return Path(path)


def find_matrix_files(directory: Path) -> List[Path]:
    return sorted(Path(directory).rglob("*.mtx"))

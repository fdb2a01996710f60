import csv
from pathlib import Path
from typing import List

from pydantic import ValidationError

from sparsity_roofline.core.sparsecost import parse_pattern
from sparsity_roofline.models.report_model import AccuracyRecord
from sparsity_roofline.models.sparsity_model import SparsityConfig
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.exceptions import AccuracyDataError, SparsityConfigError
from sparsity_roofline.utils.logger import logger
from sparsity_roofline.utils.validation import first_error

ACCURACY_COLUMNS = ("model", "pattern", "level", "top1")


def load_accuracy(path: Path) -> List[AccuracyRecord]:
    """
    Reads a `model,pattern,level,top1` CSV. Pattern labels are normalized (e.g. BLOCK:4X4 to
    block:4x4) and (model, pattern, level) must be unique.
    """
    logger.debug(f"loading accuracy records from {path}")
    try:
        with open(path, newline="", encoding="utf-8") as file:
            reader = csv.DictReader(file)
            rows = list(reader)
            fieldnames = reader.fieldnames
    except OSError as exc:
        raise AccuracyDataError(Errors.ACCURACY_PARSE.format(path=path, line=0, detail=exc))

    if fieldnames and not set(ACCURACY_COLUMNS) <= set(fieldnames):
        raise AccuracyDataError(Errors.ACCURACY_PARSE.format(
            path=path, line=1, detail=f"expected columns {','.join(ACCURACY_COLUMNS)}",
        ))

    records, seen = [], {}
    for line, row in enumerate(rows, start=2):
        try:
            pattern = parse_pattern(row["pattern"] or "")
            record = AccuracyRecord(
                model=(row["model"] or "").strip(),
                pattern=pattern.label,
                level=row["level"],
                top1=row["top1"],
            )
        except SparsityConfigError as exc:
            raise AccuracyDataError(Errors.ACCURACY_PARSE.format(path=path, line=line, detail=exc))
        except ValidationError as exc:
            field, detail = first_error(exc)
            raise AccuracyDataError(Errors.ACCURACY_PARSE.format(path=path, line=line, detail=f"{field}: {detail}"))

        # Dense rows sit at level 0 and N:M rows at the level their pattern fixes.
        try:
            SparsityConfig(pattern=pattern, level=record.level)
        except ValidationError as exc:
            _, detail = first_error(exc)
            raise AccuracyDataError(Errors.ACCURACY_PARSE.format(path=path, line=line, detail=f"level: {detail}"))

        if record.key in seen:
            raise AccuracyDataError(Errors.ACCURACY_DUPLICATE.format(path=path, line=line, key=record.key))
        seen[record.key] = line
        records.append(record)

    logger.debug(f"{len(records)} accuracy records")
    return records

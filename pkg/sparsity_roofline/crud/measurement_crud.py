import csv
from pathlib import Path
from typing import List

from pydantic import ValidationError

from sparsity_roofline.core.sparsecost import config_from_pattern, parse_pattern
from sparsity_roofline.models.roofline_model import Measurement
from sparsity_roofline.utils.constants import Errors
from sparsity_roofline.utils.exceptions import MeasurementDataError, SparsityConfigError
from sparsity_roofline.utils.validation import first_error

MEASUREMENT_COLUMNS = ("scope", "pattern", "level", "latency_ms")


def load_measurements(path: Path) -> List[Measurement]:
    """Reads a `scope,pattern,level,latency_ms` CSV; scope is a layer id or `model`."""
    try:
        with open(path, newline="", encoding="utf-8") as file:
            reader = csv.DictReader(file)
            rows = list(reader)
            fieldnames = reader.fieldnames or []
    except OSError as exc:
        raise MeasurementDataError(Errors.MEASUREMENT_PARSE.format(path=path, line=0, detail=exc))

    if not set(MEASUREMENT_COLUMNS) <= set(fieldnames):
        raise MeasurementDataError(Errors.MEASUREMENT_PARSE.format(
            path=path, line=1, detail=f"expected columns {','.join(MEASUREMENT_COLUMNS)}",
        ))

    measurements = []
    for line, row in enumerate(rows, start=2):
        try:
            level = float(row["level"]) if (row["level"] or "").strip() else None
            config = config_from_pattern(parse_pattern(row["pattern"] or ""), level)
            measurements.append(Measurement(
                scope=(row["scope"] or "").strip(),
                config=config,
                measured_latency_s=float(row["latency_ms"]) / 1e3,
            ))
        except (SparsityConfigError, ValueError, TypeError) as exc:
            detail = first_error(exc)[1] if isinstance(exc, ValidationError) else exc
            raise MeasurementDataError(Errors.MEASUREMENT_PARSE.format(path=path, line=line, detail=detail))
    return measurements

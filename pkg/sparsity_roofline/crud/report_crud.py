import csv
import io
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from jinja2 import Environment, FileSystemLoader, select_autoescape
from pydantic import TypeAdapter

from sparsity_roofline.core.report import sparsity_roofline_chart
from sparsity_roofline.models.matrix_model import MatrixStats, TrafficBreakdown
from sparsity_roofline.models.report_model import OutputFormat, Series, SeriesPoint, SeriesSet
from sparsity_roofline.models.roofline_model import GridCell, SpeedupRecord, ValidationRow
from sparsity_roofline.utils.constants import TEMPLATES_DIR, Errors, Messages
from sparsity_roofline.utils.exceptions import EmitError
from sparsity_roofline.utils.formatting import fmt
from sparsity_roofline.utils.logger import logger

SERIES_COLUMNS = ["model", "pattern", "level", "speedup", "top1", "label", "dense_top1"]
SPEEDUP_COLUMNS = [
    "model", "batch", "pattern", "level", "config", "dense_sol_s", "sparse_sol_s", "speedup", "flop_speedup",
]
LAYER_COLUMNS = [
    "model", "batch", "config", "layer_id", "layer_config", "engine", "bound", "flops", "weight_value_bytes",
    "index_bytes", "input_feature_bytes", "output_feature_bytes", "total_bytes", "ai", "sol_latency_s",
]
VALIDATION_COLUMNS = [
    "scope", "config", "sol_latency_s", "measured_latency_s", "percent_of_sol", "ai", "achieved_flops_s",
    "under_roof", "dense_percent_of_sol", "percent_gap", "predicted_speedup", "measured_speedup", "verdict",
]
MATRIX_STATS_COLUMNS = ["name", "nrows", "ncols", "nnz", "level", "b_h", "b_w", "nonzero_blocks", "fill_ratio"]
TRAFFIC_COLUMNS = ["model", "batch", "config", "layer_id", "weight_bytes", "feature_bytes", "total_bytes", "feature_share"]

_json = TypeAdapter(Any)

templates = Environment(
    loader=FileSystemLoader(TEMPLATES_DIR),
    autoescape=select_autoescape(["svg.j2"]),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, int, float)):
        return fmt(value)
    return str(value.value if hasattr(value, "value") else value)


def _number(value: float | None) -> float | None:
    """Rounds to the significant digits used in every output file."""
    return None if value is None else float(fmt(value))


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        logger.error(f"Failed to write {path}")
        raise EmitError(Errors.UNWRITABLE.format(path=path, detail=exc))
    logger.info(Messages.WROTE.format(path=path))
    return path


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([_cell(value) for value in row] for row in rows)
    return buffer.getvalue()


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return write_text(path, csv_text(columns, rows))


def write_json(path: Path, payload: Any) -> Path:
    return write_text(path, _json.dump_json(payload, indent=2).decode("utf-8") + "\n")


def render_svg(template: str, context: Dict[str, Any]) -> str:
    return templates.get_template(template).render(**context)


def series_rows(series_set: SeriesSet) -> List[list]:
    return [
        [series.model, series.pattern, point.level, point.speedup, point.top1, point.label, series.dense_top1]
        for series in series_set.series
        for point in series.points
    ]


def series_payload(series_set: SeriesSet) -> List[dict]:
    return [
        {
            "model": series.model,
            "pattern": series.pattern,
            "dense_top1": _number(series.dense_top1),
            "points": [
                {"level": _number(p.level), "speedup": _number(p.speedup), "top1": _number(p.top1), "label": p.label}
                for p in series.points
            ],
        }
        for series in series_set.series
    ]


def emit(
    series_set: SeriesSet,
    output_format: OutputFormat,
    path: Path,
    width: int = 640,
    height: int = 480,
    title: str = "",
) -> Path:
    """Writes Sparsity Roofline series as CSV, JSON or an accuracy-vs-speedup SVG chart."""
    if output_format == OutputFormat.CSV:
        return write_csv(path, SERIES_COLUMNS, series_rows(series_set))
    if output_format == OutputFormat.JSON:
        return write_json(path, series_payload(series_set))
    if output_format == OutputFormat.SVG:
        chart = sparsity_roofline_chart(series_set, width, height, title)
        return write_text(path, render_svg("sparsity_roofline.svg.j2", chart))
    raise EmitError(Errors.UNKNOWN_FORMAT.format(fmt=output_format))


def write_roofline_svg(chart: Dict[str, Any], path: Path) -> Path:
    return write_text(path, render_svg("roofline.svg.j2", chart))


def read_series_csv(path: Path) -> SeriesSet:
    """Parses a series CSV written by `emit` back into a SeriesSet (unjoined records are not stored)."""
    try:
        with open(path, newline="", encoding="utf-8") as file:
            rows = list(csv.DictReader(file))
    except OSError as exc:
        raise EmitError(Errors.UNWRITABLE.format(path=path, detail=exc))

    grouped: Dict[tuple, List[SeriesPoint]] = {}
    dense: Dict[tuple, float | None] = {}
    for row in rows:
        key = (row["model"], row["pattern"])
        grouped.setdefault(key, []).append(SeriesPoint(
            level=float(row["level"]), speedup=float(row["speedup"]), top1=float(row["top1"]), label=row["label"],
        ))
        dense[key] = float(row["dense_top1"]) if row["dense_top1"] else None
    return SeriesSet(series=[
        Series(model=model, pattern=pattern, points=points, dense_top1=dense[(model, pattern)])
        for (model, pattern), points in grouped.items()
    ])


def speedup_rows(records: Iterable[SpeedupRecord]) -> List[list]:
    return [
        [r.model, r.batch, r.config.pattern_label, r.config.level, r.config.encode(),
         r.dense_sol_s, r.sparse_sol_s, r.speedup, r.flop_speedup]
        for r in records
    ]


def json_records(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> List[dict]:
    return [
        {column: _number(value) if isinstance(value, float) else getattr(value, "value", value)
         for column, value in zip(columns, row)}
        for row in rows
    ]


def write_table(
    name: str, columns: Sequence[str], rows: List[Sequence[Any]], out: Path, formats: Iterable[OutputFormat]
) -> List[Path]:
    """
    Writes `<name>.csv` and/or `<name>.json` for the tabular formats requested. A run asking
    only for charts still gets the CSV table.
    """
    formats = set(formats)
    written = []
    if OutputFormat.CSV in formats or OutputFormat.JSON not in formats:
        written.append(write_csv(out / f"{name}.csv", columns, rows))
    if OutputFormat.JSON in formats:
        written.append(write_json(out / f"{name}.json", json_records(columns, rows)))
    return written


def write_speedups(records: List[SpeedupRecord], out: Path, formats: Iterable[OutputFormat]) -> List[Path]:
    return write_table("speedups", SPEEDUP_COLUMNS, speedup_rows(records), out, formats)


def write_layer_sols(cells: List[GridCell], out: Path, formats: Iterable[OutputFormat]) -> List[Path]:
    return write_table("sol_layers", LAYER_COLUMNS, layer_rows(cells), out, formats)


def layer_rows(cells: Iterable[GridCell]) -> List[list]:
    rows = []
    seen = set()
    for cell in cells:
        for model_sol in (cell.dense, cell.sparse):
            key = (model_sol.model, model_sol.batch, model_sol.config.encode())
            if key in seen:
                continue
            seen.add(key)
            for layer in model_sol.per_layer:
                cost, sol = layer.cost, layer.sol
                rows.append([
                    model_sol.model, model_sol.batch, model_sol.config.encode(), layer.layer_id,
                    layer.config.encode(), sol.engine, sol.bound, cost.flops, cost.weight_value_bytes,
                    cost.index_bytes, cost.input_feature_bytes, cost.output_feature_bytes, cost.total_bytes,
                    sol.ai, sol.latency_s,
                ])
    return rows


def validation_rows(rows: Iterable[ValidationRow]) -> List[list]:
    return [[getattr(row, column) if column != "config" else row.config.encode() for column in VALIDATION_COLUMNS]
            for row in rows]


def matrix_stats_rows(stats: Iterable[MatrixStats]) -> List[list]:
    return [[getattr(row, column) for column in MATRIX_STATS_COLUMNS] for row in stats]


def traffic_rows(breakdowns: Iterable[TrafficBreakdown]) -> List[list]:
    rows = []
    for breakdown in breakdowns:
        config = breakdown.config.encode()
        for layer in breakdown.layers:
            rows.append([breakdown.model, breakdown.batch, config, layer.layer_id, layer.weight_bytes,
                         layer.feature_bytes, layer.total_bytes, layer.feature_share])
        rows.append([breakdown.model, breakdown.batch, config, "model", breakdown.weight_bytes,
                     breakdown.feature_bytes, breakdown.total_bytes, breakdown.feature_share])
    return rows

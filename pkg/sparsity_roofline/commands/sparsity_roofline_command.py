from pathlib import Path
from typing import Annotated, Dict, List

import typer

from sparsity_roofline.commands.common import (
    BatchOption, ConfigOption, EngineMapOption, FormatOption, HwOption, IndexBytesOption, ModelOption,
    OnIncompatibleOption, OutOption, PointerBytesOption, SparsityOption, SvgHeightOption, SvgWidthOption,
    ValueBytesOption, exit_on_error, resolve_run,
)
from sparsity_roofline.commands.sol_command import evaluate
from sparsity_roofline.core.report import assemble_series
from sparsity_roofline.crud import report_crud
from sparsity_roofline.crud.accuracy_crud import load_accuracy
from sparsity_roofline.models.report_model import SeriesSet
from sparsity_roofline.models.run_config_model import RunConfig
from sparsity_roofline.utils.logger import logger


def cmd_sparsity_roofline(run: RunConfig, accuracy_path: Path) -> Dict[int, SeriesSet]:
    """
    Joins speedups at SoL with accuracy and emits one series set per batch size as
    series_b<batch>.{csv,json,svg}; speedups without accuracy go to unjoined_b<batch>.csv.
    """
    accuracy = load_accuracy(accuracy_path)
    _, cells = evaluate(run)

    by_batch: Dict[int, List] = {}
    for cell in cells:
        by_batch.setdefault(cell.record.batch, []).append(cell.record)

    results = {}
    for batch, records in by_batch.items():
        series_set = assemble_series(records, accuracy)
        for output_format in run.formats:
            report_crud.emit(
                series_set, output_format, run.out / f"series_b{batch}.{output_format.value}",
                run.svg_width, run.svg_height, f"Sparsity Roofline, batch {batch}",
            )
        if series_set.unjoined:
            keys = [(r.model, r.config.encode()) for r in series_set.unjoined]
            logger.warning(f"{len(keys)} speedup record(s) at batch {batch} have no accuracy record: {keys}")
            report_crud.write_csv(
                run.out / f"unjoined_b{batch}.csv", report_crud.SPEEDUP_COLUMNS,
                report_crud.speedup_rows(series_set.unjoined),
            )
        results[batch] = series_set
    return results


def sparsity_roofline(
    accuracy: Annotated[Path, typer.Option("--accuracy", help="CSV with model,pattern,level,top1.")],
    config: ConfigOption = None,
    hw: HwOption = None,
    model: ModelOption = None,
    sparsity: SparsityOption = None,
    batch: BatchOption = None,
    value_bytes: ValueBytesOption = None,
    index_bytes: IndexBytesOption = None,
    pointer_bytes: PointerBytesOption = None,
    engine_map: EngineMapOption = None,
    out: OutOption = None,
    output_format: FormatOption = None,
    on_incompatible: OnIncompatibleOption = None,
    svg_width: SvgWidthOption = None,
    svg_height: SvgHeightOption = None,
):
    """Accuracy versus speedup at SoL, one series per (model, pattern)."""
    logger.debug("call to sparsity-roofline")
    with exit_on_error():
        run = resolve_run(
            config, hw, model, sparsity=sparsity, batches=batch, value_bytes=value_bytes,
            index_bytes=index_bytes, pointer_bytes=pointer_bytes, engine_map=engine_map, out=out,
            formats=output_format, on_incompatible=on_incompatible, svg_width=svg_width, svg_height=svg_height,
        )
        cmd_sparsity_roofline(run, accuracy)

from typing import List

from rich.table import Table

from sparsity_roofline.commands.common import (
    BatchOption, ConfigOption, HwOption, IndexBytesOption, ModelOption, OnIncompatibleOption, OutOption,
    PointerBytesOption, SparsityOption, ValueBytesOption, console, exit_on_error, load_inputs, resolve_run,
)
from sparsity_roofline.core.traffic import traffic_breakdown
from sparsity_roofline.crud import report_crud
from sparsity_roofline.models.matrix_model import TrafficBreakdown
from sparsity_roofline.models.run_config_model import RunConfig
from sparsity_roofline.utils.constants import Defaults
from sparsity_roofline.utils.formatting import fmt
from sparsity_roofline.utils.logger import logger


def cmd_traffic(run: RunConfig) -> List[TrafficBreakdown]:
    """Weight versus feature bytes per layer and per model for every (model, config, batch)."""
    _, graphs = load_inputs(run)
    breakdowns = [
        traffic_breakdown(graph, config, run.widths, batch, run.on_incompatible)
        for graph in graphs
        for batch in run.batches
        for config in run.configs
    ]
    report_crud.write_csv(run.out / "traffic.csv", report_crud.TRAFFIC_COLUMNS, report_crud.traffic_rows(breakdowns))
    return breakdowns


def traffic(
    config: ConfigOption = None,
    hw: HwOption = None,
    model: ModelOption = None,
    sparsity: SparsityOption = None,
    batch: BatchOption = None,
    value_bytes: ValueBytesOption = None,
    index_bytes: IndexBytesOption = None,
    pointer_bytes: PointerBytesOption = None,
    out: OutOption = None,
    on_incompatible: OnIncompatibleOption = None,
):
    """Memory traffic split into prunable weight bytes and unprunable feature bytes."""
    logger.debug("call to traffic")
    with exit_on_error():
        run = resolve_run(
            config, hw, model, sparsity=sparsity, batches=batch or list(Defaults.TRAFFIC_BATCHES),
            value_bytes=value_bytes, index_bytes=index_bytes, pointer_bytes=pointer_bytes, out=out,
            on_incompatible=on_incompatible,
        )
        breakdowns = cmd_traffic(run)

    table = Table(title="Memory traffic")
    for column in ("model", "batch", "config", "weight MB", "feature MB", "feature share"):
        table.add_column(column)
    for breakdown in breakdowns:
        table.add_row(
            breakdown.model, str(breakdown.batch), breakdown.config.encode(), fmt(breakdown.weight_bytes / 1e6),
            fmt(breakdown.feature_bytes / 1e6), fmt(breakdown.feature_share),
        )
    console.print(table)

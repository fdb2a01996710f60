from typing import List

from rich.table import Table

from sparsity_roofline.commands.common import (
    BatchOption, ConfigOption, EngineMapOption, FormatOption, HwOption, IndexBytesOption, ModelOption,
    OnIncompatibleOption, OutOption, PointerBytesOption, SparsityOption, SvgHeightOption, SvgWidthOption,
    ValueBytesOption, console, exit_on_error, load_inputs, resolve_run,
)
from sparsity_roofline.core.report import roofline_chart
from sparsity_roofline.core.roofline import evaluate_grid, resolve_engine_map
from sparsity_roofline.crud import report_crud
from sparsity_roofline.models.hardware_model import HardwareProfile
from sparsity_roofline.models.report_model import OutputFormat
from sparsity_roofline.models.roofline_model import GridCell, RooflinePoint
from sparsity_roofline.models.run_config_model import RunConfig
from sparsity_roofline.utils.formatting import fmt
from sparsity_roofline.utils.logger import logger


def evaluate(run: RunConfig) -> tuple[HardwareProfile, List[GridCell]]:
    profile, graphs = load_inputs(run)
    cells = evaluate_grid(
        graphs, run.configs, run.batches, profile, run.widths,
        resolve_engine_map(run.engine_map), run.on_incompatible,
    )
    return profile, cells


def write_sol_rooflines(profile: HardwareProfile, cells: List[GridCell], run: RunConfig) -> None:
    """One classic roofline per (model, batch) with a SoL point per layer and config."""
    groups: dict[tuple[str, int], List[GridCell]] = {}
    for cell in cells:
        groups.setdefault((cell.sparse.model, cell.sparse.batch), []).append(cell)

    for (model, batch), group in groups.items():
        sols = [group[0].dense] + [cell.sparse for cell in group]
        layers = [(sol.config.encode(), layer) for sol in sols for layer in sol.per_layer]
        points = [
            RooflinePoint(
                ai=layer.sol.ai,
                achieved_flops_s=layer.sol.flops / layer.sol.latency_s,
                label=f"{layer.layer_id} {config}",
            )
            for config, layer in layers
        ]
        engines = [layer.sol.engine for _, layer in layers]
        title = f"{model} batch {batch} ({profile.name})"
        chart = roofline_chart(profile, engines, points, run.svg_width, run.svg_height, title)
        report_crud.write_roofline_svg(chart, run.out / f"roofline_{model}_b{batch}.svg")


def cmd_sol(run: RunConfig) -> List[GridCell]:
    """Per-layer SoL tables and per-model speedups for every (model, config, batch)."""
    profile, cells = evaluate(run)
    records = [cell.record for cell in cells]

    report_crud.write_layer_sols(cells, run.out, run.formats)
    report_crud.write_speedups(records, run.out, run.formats)
    if OutputFormat.SVG in run.formats:
        write_sol_rooflines(profile, cells, run)
    return cells


def print_summary(cells: List[GridCell]) -> None:
    table = Table(title="Speedup at speed-of-light")
    for column in ("model", "batch", "config", "dense SoL (ms)", "sparse SoL (ms)", "speedup", "FLOP speedup"):
        table.add_column(column, justify="left" if column in ("model", "config") else "right")
    for cell in cells:
        record = cell.record
        table.add_row(
            record.model, str(record.batch), record.config.encode(),
            fmt(record.dense_sol_s * 1e3), fmt(record.sparse_sol_s * 1e3), fmt(record.speedup),
            fmt(record.flop_speedup) if record.flop_speedup is not None else "-",
        )
    console.print(table)


def sol(
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
    """Speed-of-light latency per layer and speedup at SoL per model."""
    logger.debug("call to sol")
    with exit_on_error():
        run = resolve_run(
            config, hw, model, sparsity=sparsity, batches=batch, value_bytes=value_bytes,
            index_bytes=index_bytes, pointer_bytes=pointer_bytes, engine_map=engine_map, out=out,
            formats=output_format, on_incompatible=on_incompatible, svg_width=svg_width, svg_height=svg_height,
        )
        cells = cmd_sol(run)
    print_summary(cells)

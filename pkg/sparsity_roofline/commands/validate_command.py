import math
from pathlib import Path
from typing import Annotated, Dict, List, Tuple

import typer
from rich.table import Table

from sparsity_roofline.commands.common import (
    BatchOption, ConfigOption, EngineMapOption, FormatOption, HwOption, IndexBytesOption, ModelOption,
    OnIncompatibleOption, OutOption, PointerBytesOption, SvgHeightOption, SvgWidthOption, ValueBytesOption,
    console, exit_on_error, load_inputs, resolve_run,
)
from sparsity_roofline.core.hwmodel import peak
from sparsity_roofline.core.netgraph import with_batch
from sparsity_roofline.core.report import roofline_chart
from sparsity_roofline.core.roofline import (
    check_under_roof, measured_speedup, model_sol, percent_of_sol, resolve_engine_map, roofline_point,
)
from sparsity_roofline.crud import report_crud
from sparsity_roofline.crud.measurement_crud import load_measurements
from sparsity_roofline.models.hardware_model import EngineClass, HardwareProfile
from sparsity_roofline.models.report_model import OutputFormat
from sparsity_roofline.models.roofline_model import Measurement, ModelSol, RooflinePoint, SolResult, ValidationRow
from sparsity_roofline.models.run_config_model import RunConfig
from sparsity_roofline.models.sparsity_model import CostBreakdown, PatternKind
from sparsity_roofline.utils.constants import Errors, Messages
from sparsity_roofline.utils.exceptions import (
    PhysicalInconsistencyError, RunConfigError, UndefinedIntensityError,
)
from sparsity_roofline.utils.formatting import fmt
from sparsity_roofline.utils.logger import logger

FASTER_THAN_LIGHT = "faster than speed-of-light"
ABOVE_ROOF = "above the roof"


def _scope_sol(
    sol: ModelSol, measurement: Measurement, profile: HardwareProfile
) -> Tuple[SolResult | ModelSol, CostBreakdown, EngineClass]:
    """SoL, cost and roof engine of the measured scope: one layer or the whole model."""
    if measurement.is_model_scope:
        # A whole model is held to the fastest roof any of its layers runs on.
        engines = sorted({layer.sol.engine for layer in sol.per_layer}, key=lambda engine: engine.value)
        engine = max(engines, key=lambda engine: peak(profile, engine))
        return sol, sol.total_cost(), engine
    layer = sol.layer(measurement.scope)
    if layer is None:
        raise RunConfigError(Errors.UNKNOWN_LAYER.format(model=sol.model, layer_id=measurement.scope))
    return layer.sol, layer.cost, layer.sol.engine


def _latency(scope_sol: SolResult | ModelSol) -> float:
    return scope_sol.total_latency_s if isinstance(scope_sol, ModelSol) else scope_sol.latency_s


def cmd_validate(run: RunConfig, measurements_path: Path) -> List[ValidationRow]:
    """
    Percent-of-SoL per measurement plus the dense/sparse percent gap. A sparse and a dense
    measurement of the same scope compare predicted against measured speedup. Writes the
    report first, then raises PhysicalInconsistencyError if any measurement beats SoL.
    """
    if len(run.models) != 1 or len(run.batches) != 1:
        raise RunConfigError(Errors.VALIDATE_SINGLE.format(models=len(run.models), batches=len(run.batches)))

    profile, graphs = load_inputs(run)
    graph = with_batch(graphs[0], run.batches[0])
    engine_map = resolve_engine_map(run.engine_map)
    measurements = load_measurements(measurements_path)

    sols: Dict[str, ModelSol] = {}
    for measurement in measurements:
        key = measurement.config.encode()
        if key not in sols:
            sols[key] = model_sol(graph, measurement.config, profile, run.widths, engine_map, run.on_incompatible)

    dense_by_scope = {m.scope: m for m in measurements if m.config.kind == PatternKind.DENSE}
    rows, points, engines, violations = [], [], set(), []
    for measurement in measurements:
        sol = sols[measurement.config.encode()]
        scope_sol, cost, engine = _scope_sol(sol, measurement, profile)
        sol_s = _latency(scope_sol)
        try:
            point = roofline_point(cost, measurement)
        except UndefinedIntensityError:
            point = RooflinePoint(ai=0.0, achieved_flops_s=0.0, label=measurement.scope)
        under_roof = check_under_roof(point, profile, engine)

        verdicts = []
        fraction = sol_s / measurement.measured_latency_s
        try:
            fraction = percent_of_sol(scope_sol, measurement)
        except PhysicalInconsistencyError as exc:
            violations.append(str(exc))
            verdicts.append(FASTER_THAN_LIGHT)
        if not under_roof:
            violations.append(f"'{measurement.scope}' {measurement.config.encode()} is above the {engine.value} roof")
            verdicts.append(ABOVE_ROOF)

        extra = {}
        dense = dense_by_scope.get(measurement.scope)
        if dense is not None and measurement.config.kind != PatternKind.DENSE:
            dense_sol_s = _latency(_scope_sol(sols[dense.config.encode()], dense, profile)[0])
            dense_fraction = dense_sol_s / dense.measured_latency_s
            equal = math.isclose(fraction, dense_fraction, rel_tol=1e-9)
            extra = {
                "dense_percent_of_sol": dense_fraction,
                "percent_gap": fraction - dense_fraction,
                "predicted_speedup": dense_sol_s / sol_s,
                "measured_speedup": measured_speedup(dense.measured_latency_s, measurement.measured_latency_s),
            }
            verdicts.append(Messages.SPEEDUP_MATCH if equal else Messages.SPEEDUP_MISMATCH)

        rows.append(ValidationRow(
            scope=measurement.scope, config=measurement.config, sol_latency_s=sol_s,
            measured_latency_s=measurement.measured_latency_s, percent_of_sol=fraction, ai=point.ai,
            achieved_flops_s=point.achieved_flops_s, under_roof=under_roof, verdict="; ".join(verdicts), **extra,
        ))
        points.append(point)
        engines.add(engine)

    report_crud.write_csv(run.out / "validation.csv", report_crud.VALIDATION_COLUMNS, report_crud.validation_rows(rows))
    if OutputFormat.SVG in run.formats:
        title = f"{graph.name} batch {graph.batch} measured ({profile.name})"
        chart = roofline_chart(profile, list(engines), points, run.svg_width, run.svg_height, title)
        report_crud.write_roofline_svg(chart, run.out / "roofline_validation.svg")

    if violations:
        raise PhysicalInconsistencyError("; ".join(violations))
    return rows


def print_summary(rows: List[ValidationRow]) -> None:
    table = Table(title="Percent of speed-of-light")
    for column in ("scope", "config", "SoL (ms)", "measured (ms)", "% of SoL", "TFLOP/s", "verdict"):
        table.add_column(column)
    for row in rows:
        table.add_row(
            row.scope, row.config.encode(), fmt(row.sol_latency_s * 1e3), fmt(row.measured_latency_s * 1e3),
            fmt(row.percent_of_sol * 100), fmt(row.achieved_flops_s / 1e12), row.verdict,
        )
    console.print(table)


def validate(
    measurements: Annotated[Path, typer.Option("--measurements", help="CSV with scope,pattern,level,latency_ms.")],
    config: ConfigOption = None,
    hw: HwOption = None,
    model: ModelOption = None,
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
    """Percent-of-SoL of measured latencies; exits 4 on measurements faster than SoL."""
    logger.debug("call to validate")
    with exit_on_error():
        run = resolve_run(
            # Configs come from the measurements file.
            config, hw, model, sparsity=["dense"], batches=batch, value_bytes=value_bytes,
            index_bytes=index_bytes, pointer_bytes=pointer_bytes, engine_map=engine_map, out=out,
            formats=output_format, on_incompatible=on_incompatible, svg_width=svg_width, svg_height=svg_height,
        )
        rows = cmd_validate(run, measurements)
    print_summary(rows)

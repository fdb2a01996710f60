"""
Speed-of-light latency per layer and per model, speedup at SoL, percent-of-SoL and
Roofline points for measured data.
"""
import math
from typing import Dict, Iterable, Iterator, List, Tuple

from sparsity_roofline.core.hwmodel import peak, roof_throughput
from sparsity_roofline.core.netgraph import lower_layer, with_batch
from sparsity_roofline.core.sparsecost import is_compatible, layer_cost
from sparsity_roofline.models.hardware_model import EngineClass, HardwareProfile
from sparsity_roofline.models.network_model import LayerSpec, ModelGraph
from sparsity_roofline.models.roofline_model import (
    Bound, GridCell, LayerSol, Measurement, ModelSol, RooflinePoint, SolResult, SpeedupRecord,
)
from sparsity_roofline.models.sparsity_model import CostBreakdown, DTypeWidths, PatternKind, SparsityConfig
from sparsity_roofline.utils.constants import Defaults, Errors, Messages
from sparsity_roofline.utils.exceptions import (
    ConfigError, DataError, EngineMapError, PhysicalInconsistencyError, RooflineError, UndefinedIntensityError,
)
from sparsity_roofline.utils.logger import logger

# Unstructured kernels run on scalar cores; everything else has a matrix-unit path.
DEFAULT_ENGINE_MAP: Dict[PatternKind, EngineClass] = {
    PatternKind.DENSE: EngineClass.MATRIX_UNIT,
    PatternKind.UNSTRUCTURED: EngineClass.SCALAR_CORE,
    PatternKind.BLOCK: EngineClass.MATRIX_UNIT,
    PatternKind.NOFM: EngineClass.SPARSE_MATRIX_UNIT,
}


def default_engine_map() -> Dict[PatternKind, EngineClass]:
    return dict(DEFAULT_ENGINE_MAP)


def parse_engine_map(items: Iterable[str]) -> Dict[PatternKind, EngineClass]:
    """Parses `pattern=engine` overrides, e.g. unstructured=matrix."""
    overrides = {}
    for item in items:
        pattern, sep, engine = item.partition("=")
        if not sep:
            raise EngineMapError(Errors.ENGINE_MAP.format(text=item, detail="expected pattern=engine"))
        try:
            overrides[PatternKind(pattern.strip().lower())] = EngineClass(engine.strip().lower())
        except ValueError as exc:
            raise EngineMapError(Errors.ENGINE_MAP.format(text=item, detail=str(exc)))
    return overrides


def resolve_engine_map(overrides: Dict[PatternKind, EngineClass] | None = None) -> Dict[PatternKind, EngineClass]:
    return {**DEFAULT_ENGINE_MAP, **(overrides or {})}


def arithmetic_intensity(flops: int, total_bytes: int) -> float:
    if total_bytes <= 0:
        raise UndefinedIntensityError(Errors.UNDEFINED_AI)
    return flops / total_bytes


def sol_latency(cost: CostBreakdown, profile: HardwareProfile, engine: EngineClass) -> SolResult:
    """Per-layer speed-of-light: max(FLOPs / peak FLOP/s, bytes / peak bandwidth)."""
    compute_s = cost.flops / peak(profile, engine)
    memory_s = cost.total_bytes / profile.peak_mem_bw
    # A tie at the knee counts as compute-bound.
    bound = Bound.COMPUTE_BOUND if compute_s >= memory_s else Bound.MEMORY_BOUND
    return SolResult(
        latency_s=max(compute_s, memory_s),
        ai=arithmetic_intensity(cost.flops, cost.total_bytes),
        bound=bound,
        engine=engine,
        flops=cost.flops,
        total_bytes=cost.total_bytes,
    )


def _engine_for(config: SparsityConfig, engine_map: Dict[PatternKind, EngineClass]) -> EngineClass:
    engine = engine_map.get(config.kind)
    if engine is None:
        raise ConfigError(Errors.ENGINE_NOT_MAPPED.format(pattern=config.kind.value))
    return engine


def layer_costs(
    graph: ModelGraph,
    config: SparsityConfig,
    widths: DTypeWidths,
    on_incompatible: str = "error",
) -> Iterator[Tuple[LayerSpec, SparsityConfig, CostBreakdown]]:
    """
    Costs every layer of the graph. Non-prunable layers are costed dense, and so are
    incompatible prunable layers when `on_incompatible` is 'dense'.
    """
    dense = SparsityConfig.dense()
    for layer in graph.layers:
        try:
            shape = lower_layer(layer, graph.batch)
            layer_config = config if layer.prunable else dense
            if on_incompatible == "dense" and not is_compatible(layer_config, shape):
                logger.warning(Messages.COSTED_DENSE.format(layer_id=layer.id, config=config.encode()))
                layer_config = dense
            _, cost = layer_cost(layer_config, shape, widths)
        except RooflineError as exc:
            raise type(exc)(Errors.LAYER_FAILED.format(layer_id=layer.id, detail=exc)) from exc
        yield layer, layer_config, cost


def model_sol(
    graph: ModelGraph,
    config: SparsityConfig,
    profile: HardwareProfile,
    widths: DTypeWidths,
    engine_map: Dict[PatternKind, EngineClass] | None = None,
    on_incompatible: str = "error",
) -> ModelSol:
    engine_map = engine_map if engine_map is not None else DEFAULT_ENGINE_MAP
    per_layer = []
    for layer, layer_config, cost in layer_costs(graph, config, widths, on_incompatible):
        try:
            sol = sol_latency(cost, profile, _engine_for(layer_config, engine_map))
        except RooflineError as exc:
            raise type(exc)(Errors.LAYER_FAILED.format(layer_id=layer.id, detail=exc)) from exc
        per_layer.append(LayerSol(layer_id=layer.id, config=layer_config, sol=sol, cost=cost))

    logger.debug(f"SoL of {graph.name} (batch {graph.batch}) at {config.encode()} over {len(per_layer)} layers")
    return ModelSol(
        model=graph.name,
        batch=graph.batch,
        config=config,
        per_layer=per_layer,
        total_latency_s=math.fsum(layer.sol.latency_s for layer in per_layer),
    )


def speedup_at_sol(dense: ModelSol, sparse: ModelSol) -> SpeedupRecord:
    if dense.total_latency_s <= 0 or sparse.total_latency_s <= 0:
        raise DataError(Errors.NON_POSITIVE_TOTAL.format(dense=dense.total_latency_s, sparse=sparse.total_latency_s))

    sparse_flops = sparse.total_flops
    return SpeedupRecord(
        model=sparse.model,
        batch=sparse.batch,
        config=sparse.config,
        dense_sol_s=dense.total_latency_s,
        sparse_sol_s=sparse.total_latency_s,
        speedup=dense.total_latency_s / sparse.total_latency_s,
        flop_speedup=dense.total_flops / sparse_flops if sparse_flops else None,
    )


def measured_speedup(dense_measured_s: float, sparse_measured_s: float) -> float:
    if dense_measured_s <= 0 or sparse_measured_s <= 0:
        raise DataError(Errors.NON_POSITIVE_TOTAL.format(dense=dense_measured_s, sparse=sparse_measured_s))
    return dense_measured_s / sparse_measured_s


def percent_of_sol(
    sol: SolResult | ModelSol,
    measured: Measurement,
    tolerance: float = Defaults.PERCENT_OF_SOL_TOLERANCE,
) -> float:
    """Fraction of speed-of-light reached: SoL latency / measured latency, in (0, 1]."""
    sol_s = sol.total_latency_s if isinstance(sol, ModelSol) else sol.latency_s
    fraction = sol_s / measured.measured_latency_s
    if fraction > 1.0 + tolerance:
        raise PhysicalInconsistencyError(Errors.FASTER_THAN_LIGHT.format(
            measured=measured.measured_latency_s, scope=measured.scope, sol=sol_s,
        ))
    return fraction


def roofline_point(cost: CostBreakdown, measured: Measurement) -> RooflinePoint:
    return RooflinePoint(
        ai=arithmetic_intensity(cost.flops, cost.total_bytes),
        achieved_flops_s=cost.flops / measured.measured_latency_s,
        label=f"{measured.scope} {measured.config.encode()}",
    )


def check_under_roof(
    point: RooflinePoint,
    profile: HardwareProfile,
    engine: EngineClass,
    tolerance: float = Defaults.ROOF_TOLERANCE,
) -> bool:
    return point.achieved_flops_s <= roof_throughput(profile, engine, point.ai) * (1.0 + tolerance)


def evaluate_grid(
    graphs: List[ModelGraph],
    configs: List[SparsityConfig],
    batches: List[int],
    profile: HardwareProfile,
    widths: DTypeWidths,
    engine_map: Dict[PatternKind, EngineClass] | None = None,
    on_incompatible: str = "error",
) -> List[GridCell]:
    """
    Evaluates every (model, batch, config) cell against the model's dense baseline at that
    batch, in input order.
    """
    cells = []
    for graph in graphs:
        for batch in batches:
            batched = with_batch(graph, batch)
            dense = model_sol(batched, SparsityConfig.dense(), profile, widths, engine_map, on_incompatible)
            for config in configs:
                sparse = model_sol(batched, config, profile, widths, engine_map, on_incompatible)
                cells.append(GridCell(dense=dense, sparse=sparse, record=speedup_at_sol(dense, sparse)))
    return cells


def layer_sol(
    graph: ModelGraph,
    layer_id: str,
    config: SparsityConfig,
    profile: HardwareProfile,
    widths: DTypeWidths,
    engine_map: Dict[PatternKind, EngineClass] | None = None,
    on_incompatible: str = "error",
) -> LayerSol:
    """SoL of a single layer of the graph, costed exactly as model_sol costs it."""
    if graph.layer(layer_id) is None:
        raise ConfigError(Errors.UNKNOWN_LAYER.format(model=graph.name, layer_id=layer_id))
    sol = model_sol(graph, config, profile, widths, engine_map, on_incompatible)
    return sol.layer(layer_id)

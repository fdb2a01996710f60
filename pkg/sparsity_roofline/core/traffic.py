from sparsity_roofline.core.netgraph import with_batch
from sparsity_roofline.core.roofline import layer_costs
from sparsity_roofline.models.matrix_model import TrafficBreakdown, TrafficRow
from sparsity_roofline.models.network_model import ModelGraph
from sparsity_roofline.models.sparsity_model import DTypeWidths, SparsityConfig


def traffic_breakdown(
    graph: ModelGraph,
    config: SparsityConfig,
    widths: DTypeWidths,
    batch: int,
    on_incompatible: str = "error",
) -> TrafficBreakdown:
    """
    Splits memory traffic into weight bytes (values + index data), which pruning can
    shrink, and feature bytes (n*k inputs + m*n outputs), which it cannot.
    """
    rows = [
        TrafficRow(layer_id=layer.id, weight_bytes=cost.weight_bytes, feature_bytes=cost.feature_bytes)
        for layer, _, cost in layer_costs(with_batch(graph, batch), config, widths, on_incompatible)
    ]
    return TrafficBreakdown(model=graph.name, batch=batch, config=config, layers=rows)

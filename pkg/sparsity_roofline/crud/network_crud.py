from pathlib import Path
from typing import List

from pydantic import ValidationError

from sparsity_roofline.core.netgraph import lowered_layers
from sparsity_roofline.models.network_model import LayerBlock, ModelGraph, ModelSpecFile
from sparsity_roofline.utils.constants import MODELS_DIR, Errors
from sparsity_roofline.utils.exceptions import ModelSpecError
from sparsity_roofline.utils.logger import logger
from sparsity_roofline.utils.validation import first_error


def expand_layers(spec: ModelSpecFile) -> list:
    """Flattens `block` entries into `repeat` copies with ids `<block>.<i>.<layer>`."""
    layers = []
    for entry in spec.layers:
        if not isinstance(entry, LayerBlock):
            layers.append(entry)
            continue
        for index in range(entry.repeat):
            layers.extend(
                layer.model_copy(update={"id": f"{entry.id}.{index}.{layer.id}"}) for layer in entry.layers
            )
    return layers


def load_model_spec(path: Path) -> ModelGraph:
    logger.debug(f"loading model spec {path}")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelSpecError(Errors.MODEL_SPEC_PARSE.format(path=path, detail=exc))

    try:
        spec = ModelSpecFile.model_validate_json(text)
    except ValidationError as exc:
        if exc.errors()[0]["type"] == "json_invalid":
            raise ModelSpecError(Errors.MODEL_SPEC_PARSE.format(path=path, detail=first_error(exc)[1]))
        field, detail = first_error(exc)
        raise ModelSpecError(Errors.MODEL_SPEC_FIELD.format(path=path, field=field, detail=detail))

    try:
        graph = ModelGraph(name=spec.name, layers=expand_layers(spec), batch=spec.batch)
    except ValidationError as exc:
        raise ModelSpecError(Errors.MODEL_SPEC_PARSE.format(path=path, detail=first_error(exc)[1]))

    # Impossible conv geometry fails at load.
    lowered_layers(graph)
    logger.debug(f"model {graph.name}: {len(graph.layers)} layers")
    return graph


def bundled_model_path(name: str) -> Path:
    return MODELS_DIR / f"{name}.json"


def list_bundled_models() -> List[str]:
    return sorted(path.stem for path in MODELS_DIR.glob("*.json"))

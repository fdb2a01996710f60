from pathlib import Path
from typing import Any, Dict, List

import yaml
from pydantic import ValidationError

from sparsity_roofline.core.roofline import parse_engine_map
from sparsity_roofline.core.sparsecost import config_from_pattern, parse_pattern, parse_sparsity, sparsity_sweep
from sparsity_roofline.crud.network_crud import load_model_spec
from sparsity_roofline.models.run_config_model import RunConfig
from sparsity_roofline.models.sparsity_model import DTypeWidths, NofMPattern, SparsityConfig
from sparsity_roofline.utils.constants import HARDWARE_DIR, MODELS_DIR, Errors
from sparsity_roofline.utils.exceptions import RunConfigError, SparsityConfigError
from sparsity_roofline.utils.logger import logger
from sparsity_roofline.utils.settings import get_settings
from sparsity_roofline.utils.validation import first_error

FILE_KEYS = {
    "hw", "models", "configs", "sweeps", "batches", "widths", "engine_map", "out", "formats",
    "on_incompatible", "svg_width", "svg_height",
}


def resolve_path(value: str | Path, base: Path, bundled_dir: Path, suffix: str) -> Path:
    """
    A bare name without suffix refers to a bundled data file (e.g. `resnet50`); anything
    else is a path relative to `base`.
    """
    path = Path(value)
    if not path.suffix and (bundled_dir / f"{path.name}{suffix}").exists():
        return bundled_dir / f"{path.name}{suffix}"
    return path if path.is_absolute() else base / path


def expand_sweeps(sweeps: List[Dict[str, Any]]) -> List[SparsityConfig]:
    """`{pattern: block:4x4, start: 0.5, steps: 5}` expands to one config per sweep level."""
    configs = []
    for sweep in sweeps:
        try:
            pattern = parse_pattern(str(sweep["pattern"]))
            start, steps = float(sweep["start"]), int(sweep["steps"])
        except (KeyError, TypeError, ValueError) as exc:
            raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path="<sweeps>", detail=f"invalid sweep {sweep}: {exc}"))
        if isinstance(pattern, NofMPattern):
            raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(
                path="<sweeps>", detail=f"{pattern.label} fixes its level and cannot be swept",
            ))
        configs += [config_from_pattern(pattern, level) for level in sparsity_sweep(start, steps)]
    return configs


def load_run_config_file(path: Path) -> Dict[str, Any]:
    """Reads a YAML run config into flag-shaped values, with paths resolved against the file."""
    try:
        with open(path, encoding="utf-8") as file:
            raw = yaml.safe_load(file) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path=path, detail=exc))
    if not isinstance(raw, dict):
        raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path=path, detail="top level must be a mapping"))

    unknown = sorted(set(raw) - FILE_KEYS)
    if unknown:
        raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path=path, detail=f"unknown keys {unknown}"))

    base = Path(path).resolve().parent
    data: Dict[str, Any] = {key: value for key, value in raw.items() if key not in ("configs", "sweeps", "widths")}
    if "hw" in raw:
        data["hw"] = resolve_path(raw["hw"], base, HARDWARE_DIR, ".toml")
    if "models" in raw:
        data["models"] = [resolve_path(model, base, MODELS_DIR, ".json") for model in raw["models"] or []]
    if isinstance(raw.get("engine_map"), dict):
        data["engine_map"] = [f"{pattern}={engine}" for pattern, engine in raw["engine_map"].items()]
    if raw.get("widths") is not None:
        try:
            DTypeWidths.model_validate(raw["widths"])
        except ValidationError as exc:
            field, detail = first_error(exc)
            raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path=path, detail=f"widths.{field}: {detail}"))
        data.update(raw["widths"])

    try:
        data["sparsity"] = [parse_sparsity(str(text)) for text in raw.get("configs") or []]
        data["sparsity"] += expand_sweeps(raw.get("sweeps") or [])
    except SparsityConfigError as exc:
        raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path=path, detail=exc))

    logger.debug(f"run config {path}: {sorted(data)}")
    return data


def _given(merged: Dict[str, Any], key: str, default: Any) -> Any:
    """The merged value for `key`; only a missing or null entry falls back to `default`."""
    value = merged.get(key)
    return default if value is None else value


def _spec_batches(models: List[Path]) -> List[int]:
    """Batch sizes declared by the model specs themselves, used when none are given."""
    return sorted({load_model_spec(path).batch for path in models})


def build_run_config(file_values: Dict[str, Any] | None = None, **flags: Any) -> RunConfig:
    """
    Merges run-config file values with command-line flags. Flags left unset (None or empty)
    fall back to the file, then to settings. Values that are given but invalid are rejected.
    """
    settings = get_settings()
    merged = dict(file_values or {})
    merged.update({key: value for key, value in flags.items() if value not in (None, [], ())})

    configs = [parse_sparsity(text) if isinstance(text, str) else text for text in merged.get("sparsity", [])]
    if not merged.get("models"):
        raise RunConfigError(Errors.RUN_CONFIG_EMPTY.format(what="model"))
    if not configs:
        raise RunConfigError(Errors.RUN_CONFIG_EMPTY.format(what="sparsity config"))

    batches = _given(merged, "batches", None)
    if batches is None:
        batches = _spec_batches(merged["models"])
    formats = _given(merged, "formats", ["csv"])
    if isinstance(formats, str):
        formats = [formats]

    data = {
        "hw": _given(merged, "hw", settings.hw_profile),
        "models": merged["models"],
        "configs": configs,
        "batches": batches,
        "widths": {
            "value_bytes": _given(merged, "value_bytes", settings.value_bytes),
            "index_bytes": _given(merged, "index_bytes", settings.index_bytes),
            "pointer_bytes": _given(merged, "pointer_bytes", settings.pointer_bytes),
        },
        "engine_map": parse_engine_map(_given(merged, "engine_map", [])),
        "formats": [part.strip().lower() for item in formats for part in item.split(",") if part.strip()],
        "on_incompatible": _given(merged, "on_incompatible", "error"),
        "svg_width": _given(merged, "svg_width", settings.svg_width),
        "svg_height": _given(merged, "svg_height", settings.svg_height),
    }
    if merged.get("out") is not None:
        data["out"] = merged["out"]

    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        field, detail = first_error(exc)
        raise RunConfigError(Errors.RUN_CONFIG_PARSE.format(path="<run config>", detail=f"{field}: {detail}"))

from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Iterator, List, Optional, Tuple

import typer
from rich.console import Console

from sparsity_roofline.crud import hardware_crud, network_crud
from sparsity_roofline.crud.run_config_crud import build_run_config, load_run_config_file, resolve_path
from sparsity_roofline.models.hardware_model import HardwareProfile
from sparsity_roofline.models.network_model import ModelGraph
from sparsity_roofline.models.run_config_model import RunConfig
from sparsity_roofline.utils.constants import HARDWARE_DIR, MODELS_DIR
from sparsity_roofline.utils.exceptions import RooflineError
from sparsity_roofline.utils.logger import logger

console = Console()

ConfigOption = Annotated[Optional[Path], typer.Option("--config", help="YAML run config; flags override it.")]
HwOption = Annotated[Optional[Path], typer.Option("--hw", help="Hardware profile (TOML path or bundled name).")]
ModelOption = Annotated[Optional[List[Path]], typer.Option("--model", help="Model spec (JSON path or bundled name).")]
SparsityOption = Annotated[Optional[List[str]], typer.Option(
    "--sparsity", help="dense, unstructured:0.875, block:4x4:0.875 or nm:2:4.",
)]
BatchOption = Annotated[Optional[List[int]], typer.Option("--batch", min=1, help="Batch size (repeatable).")]
ValueBytesOption = Annotated[Optional[int], typer.Option("--value-bytes", min=1)]
IndexBytesOption = Annotated[Optional[int], typer.Option("--index-bytes", min=1)]
PointerBytesOption = Annotated[Optional[int], typer.Option("--pointer-bytes", min=1)]
EngineMapOption = Annotated[Optional[List[str]], typer.Option("--engine-map", help="pattern=engine override.")]
OutOption = Annotated[Optional[Path], typer.Option("--out", help="Output directory.")]
FormatOption = Annotated[Optional[List[str]], typer.Option("--format", help="csv,json,svg")]
OnIncompatibleOption = Annotated[Optional[str], typer.Option(
    "--on-incompatible", help="'error' or 'dense' for layers a pattern cannot tile.",
)]
SvgWidthOption = Annotated[Optional[int], typer.Option("--svg-width", min=100)]
SvgHeightOption = Annotated[Optional[int], typer.Option("--svg-height", min=100)]


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Turns a RooflineError into its exit code at the command boundary."""
    try:
        yield
    except RooflineError as exc:
        logger.error(str(exc))
        raise typer.Exit(code=int(exc.exit_code))


def resolve_run(
    config: Optional[Path] = None,
    hw: Optional[Path] = None,
    model: Optional[List[Path]] = None,
    **flags,
) -> RunConfig:
    cwd = Path.cwd()
    file_values = load_run_config_file(config) if config else {}
    return build_run_config(
        file_values,
        hw=resolve_path(hw, cwd, HARDWARE_DIR, ".toml") if hw else None,
        models=[resolve_path(path, cwd, MODELS_DIR, ".json") for path in model or []],
        **flags,
    )


def load_inputs(run: RunConfig) -> Tuple[HardwareProfile, List[ModelGraph]]:
    profile = hardware_crud.load_profile(run.hw)
    graphs = [network_crud.load_model_spec(path) for path in run.models]
    logger.debug(f"profile {profile.name}, models {[graph.name for graph in graphs]}")
    return profile, graphs

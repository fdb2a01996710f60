from typing import Annotated, List, Optional

import typer

from sparsity_roofline.commands.common import exit_on_error
from sparsity_roofline.core.sparsecost import config_from_pattern, parse_pattern, sparsity_sweep
from sparsity_roofline.utils.formatting import fmt


def cmd_sweep_levels(start: float, steps: int, pattern: Optional[str] = None) -> List[str]:
    """Levels halving the remaining nonzeros at each step, or configs when a pattern is given."""
    levels = sparsity_sweep(start, steps)
    if pattern is None:
        return [fmt(level) for level in levels]
    parsed = parse_pattern(pattern)
    return [config_from_pattern(parsed, level, pattern).encode() for level in levels]


def sweep_levels(
    start: Annotated[float, typer.Option("--start", help="First sparsity level, 0 < start < 1.")] = 0.5,
    steps: Annotated[int, typer.Option("--steps", help="Number of levels.")] = 5,
    pattern: Annotated[Optional[str], typer.Option("--pattern", help="e.g. unstructured or block:4x4")] = None,
):
    """Prints a sparsity sweep, one level (or encoded config) per line."""
    with exit_on_error():
        lines = cmd_sweep_levels(start, steps, pattern)
    for line in lines:
        typer.echo(line)

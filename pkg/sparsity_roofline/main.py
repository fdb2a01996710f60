from typing import Annotated

import typer

from sparsity_roofline.commands.profile_matrices_command import profile_matrices
from sparsity_roofline.commands.sol_command import sol
from sparsity_roofline.commands.sparsity_roofline_command import sparsity_roofline
from sparsity_roofline.commands.sweep_levels_command import sweep_levels
from sparsity_roofline.commands.traffic_command import traffic
from sparsity_roofline.commands.validate_command import validate
from sparsity_roofline.utils.logger import set_verbose

app = typer.Typer(
    name="sparsity-roofline",
    help="Speed-of-light performance model for sparse neural networks.",
    no_args_is_help=True,
    add_completion=False,
)

app.command("sol")(sol)
app.command("sparsity-roofline")(sparsity_roofline)
app.command("validate")(validate)
app.command("profile-matrices")(profile_matrices)
app.command("sweep-levels")(sweep_levels)
app.command("traffic")(traffic)


@app.callback()
def root(verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log at DEBUG level.")] = False):
    set_verbose(verbose)

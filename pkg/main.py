import os
import sys
from dotenv import load_dotenv
load_dotenv()
import logging
import typer
from app.routers import census, cohomology, generator, graphs, verify

# ---------------------------------------------------------------------
# Logging setup
# ---------------------------------------------------------------------
logger = logging.getLogger(__name__)
handler = logging.StreamHandler(sys.stdout)
handler.flush = sys.stdout.flush
logging.basicConfig(level=os.getenv("MARKED_GRAPHS_LOG_LEVEL", "INFO").upper(), handlers=[handler])

# ---------------------------------------------------------------------
# CLI setup
# ---------------------------------------------------------------------
cli = typer.Typer(
    name="marked-graphs",
    help="Marked-graph cochain complexes: enumeration, cohomology and theorem verification",
    add_completion=False,
    no_args_is_help=True,
)

# Register commands
cli.command("enumerate")(graphs.cmd_enumerate)
cli.command("census")(census.cmd_census)
cli.command("cohomology")(cohomology.cmd_cohomology)
cli.command("verify")(verify.cmd_verify)
cli.command("generator")(generator.cmd_generator)


if __name__ == "__main__":
    cli()

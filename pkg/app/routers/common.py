"""
Shared plumbing for the command modules: run configuration, graph sources,
error-to-exit-code mapping and console summaries
"""
import logging
from typing import Callable, Dict, List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from app.checks import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from app.config import RunConfig, settings
from app.errors import MarkedGraphError
from app.services.enumeration import FamilySpec, graph_enumerator
from app.utils.canonical import canonical_form
from app.utils.graph import Graph
from app.utils.parsers import GraphFileError, read_graph_file

logger = logging.getLogger(__name__)

console = Console(stderr=True)


def build_config(**values) -> RunConfig:
    """Validate CLI values; invalid combinations are usage errors (exit 2)"""
    try:
        config = RunConfig(**values)
    except ValidationError as e:
        for error in e.errors():
            console.print(f"[red]Usage error:[/red] {error['msg']}")
        raise typer.Exit(code=EXIT_USAGE)
    if config.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    settings.max_vertices = config.max_vertices
    settings.max_basis = config.max_basis
    return config


def family_of(config: RunConfig) -> FamilySpec:
    return FamilySpec(r=config.r, l=config.l, legs_labeled=config.legs_labeled)


def load_graphs(config: RunConfig) -> Dict[str, Graph]:
    """Canonical key -> graph, from the family or from the input file"""
    if config.graph_path is None:
        return graph_enumerator.enumerate_keyed(family_of(config), config.max_vertices)
    keyed: Dict[str, Graph] = {}
    for graph in read_graph_file(config.graph_path):
        _, key = canonical_form(graph, legs_labeled=config.legs_labeled)
        if key in keyed:
            logger.warning(f"⚠️ Skipping duplicate graph {key} in {config.graph_path}")
            continue
        # keep the file's edge order: it is the element order of the complexes
        keyed[key] = graph
    logger.info(f"📋 Loaded {len(keyed)} graph(s) from {config.graph_path}")
    return {key: keyed[key] for key in sorted(keyed)}


def scope_of(config: RunConfig) -> str:
    return family_of(config).label if config.graph_path is None else str(config.graph_path)


def run_command(body: Callable[[], int]) -> None:
    """Run a command body and convert its outcome or error into an exit code"""
    try:
        code = body()
    except GraphFileError as e:
        logger.error(f"❌ Cannot read graph file: {e}")
        code = EXIT_FAILURE
    except (MarkedGraphError, OSError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        code = EXIT_FAILURE
    if code != EXIT_OK:
        raise typer.Exit(code=code)


def summary_table(title: str, columns: List[str], rows: List[List[object]], limit: Optional[int] = 40) -> None:
    table = Table(title=title)
    for column in columns:
        table.add_column(column)
    shown = rows if limit is None else rows[:limit]
    for row in shown:
        table.add_row(*(str(value) for value in row))
    console.print(table)
    if limit is not None and len(rows) > limit:
        console.print(f"... {len(rows) - limit} more row(s) in the output file")

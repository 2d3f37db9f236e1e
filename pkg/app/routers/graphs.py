from pathlib import Path
from typing import Optional
import logging

import typer

from app.checks import EXIT_OK
from app.config import settings
from app.routers.common import build_config, family_of, run_command, summary_table
from app.schemas.graphs import GraphRecord
from app.services.enumeration import graph_enumerator
from app.utils.data_manager import report_store

logger = logging.getLogger(__name__)


def cmd_enumerate(
    r: Optional[int] = typer.Option(None, "--r", help="Number of legs"),
    l: Optional[int] = typer.Option(None, "--l", help="Loop order"),
    legs_labeled: bool = typer.Option(True, "--legs-labeled/--legs-unlabeled", help="Leg labels must be preserved by isomorphisms"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output JSON file (default: <output dir>/graphs.json)"),
    max_vertices: int = typer.Option(settings.max_vertices, "--max-vertices", help="Refuse families forcing more internal vertices"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    Enumerate Gra(r, l): connected multigraphs with r legs, loop order l,
    trivalent internal vertices and no self-loops.
    """
    config = build_config(
        command="enumerate", r=r, l=l, legs_labeled=legs_labeled, output=out,
        max_vertices=max_vertices, verbose=verbose,
    )

    def body() -> int:
        spec = family_of(config)
        keyed = graph_enumerator.enumerate_keyed(spec, config.max_vertices)
        records = [GraphRecord.from_graph(graph, key) for key, graph in keyed.items()]
        target = report_store.save_json(report_store.resolve(config.output, "graphs.json"), records)
        summary_table(
            f"{spec.label}: {len(records)} graph(s)",
            ["key", "|E|", "legs"],
            [[record.key, len(record.edges), len(record.legs)] for record in records],
        )
        logger.info(f"✅ {len(records)} graph(s) written to {target}")
        return EXIT_OK

    run_command(body)

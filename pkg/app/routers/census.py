from pathlib import Path
from typing import Optional
import logging

import typer

from app.checks import EXIT_OK
from app.config import settings
from app.routers.common import build_config, family_of, run_command, summary_table
from app.services.enumeration import family_census
from app.utils.data_manager import report_store

logger = logging.getLogger(__name__)


def cmd_census(
    r: Optional[int] = typer.Option(None, "--r", help="Number of legs"),
    l: Optional[int] = typer.Option(None, "--l", help="Loop order"),
    legs_labeled: bool = typer.Option(True, "--legs-labeled/--legs-unlabeled"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output CSV file (default: <output dir>/census.csv)"),
    max_vertices: int = typer.Option(settings.max_vertices, "--max-vertices"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Per-graph census: |E|, |C| and admissible-marking counts of every sector"""
    config = build_config(
        command="census", r=r, l=l, legs_labeled=legs_labeled, output=out,
        max_vertices=max_vertices, verbose=verbose,
    )

    def body() -> int:
        spec = family_of(config)
        rows = family_census(spec, config.max_vertices)
        report_store.save_census_csv(report_store.resolve(config.output, "census.csv"), rows)
        summary_table(
            f"{spec.label} census",
            ["key", "|E|", "|C|", "edge", "cycle", "vertex", "mixed"],
            [[row.key, row.n_edges, row.n_cycles, row.edge_markings, row.cycle_markings,
              row.vertex_markings, row.mixed_markings] for row in rows],
        )
        return EXIT_OK

    run_command(body)

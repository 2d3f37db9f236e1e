from pathlib import Path
from typing import Optional
import logging

import typer

from app.checks import EXIT_FAILURE, EXIT_OK
from app.config import settings
from app.routers.common import build_config, load_graphs, run_command, scope_of, summary_table
from app.schemas.reports import CohomologyReport, CohomologyRun, GraphCohomology
from app.services.cohomology import export_matrices, sector_cohomology
from app.utils.data_manager import report_store

logger = logging.getLogger(__name__)


def cmd_cohomology(
    r: Optional[int] = typer.Option(None, "--r", help="Number of legs"),
    l: Optional[int] = typer.Option(None, "--l", help="Loop order"),
    graph: Optional[Path] = typer.Option(None, "--graph", help="Graph JSON file instead of a family"),
    legs_labeled: bool = typer.Option(True, "--legs-labeled/--legs-unlabeled"),
    sectors: str = typer.Option("edge,cycle,vertex,mixed", "--sectors", help="Comma-separated sectors"),
    out: Optional[Path] = typer.Option(None, "--out", "--report", help="Output JSON (default: <output dir>/cohomology.json)"),
    export_dir: Optional[Path] = typer.Option(
        None, "--export-matrices", help="Also write every differential as COO text plus manifest.json into this directory"
    ),
    max_vertices: int = typer.Option(settings.max_vertices, "--max-vertices"),
    max_basis: int = typer.Option(settings.max_basis, "--max-basis", help="Refuse grades with more markings"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    Integral cohomology of every sector complex of every graph: D for the edge,
    cycle and vertex sectors, S + (-1)^n T for the mixed one.
    """
    config = build_config(
        command="cohomology", r=r, l=l, graph_path=graph, legs_labeled=legs_labeled,
        sectors=[part.strip() for part in sectors.split(",") if part.strip()],
        output=out, export_dir=export_dir, max_vertices=max_vertices, max_basis=max_basis, verbose=verbose,
    )

    def body() -> int:
        keyed = load_graphs(config)
        if config.export_dir is not None:
            export_matrices(keyed, config.sectors, config.export_dir)
        entries = []
        for key, g in keyed.items():
            for sector in config.sectors:
                entries.append(GraphCohomology(key=key, sector=sector, report=sector_cohomology(g, sector)))
        aggregate = {
            sector: CohomologyReport.direct_sum([entry.report for entry in entries if entry.sector == sector])
            for sector in config.sectors
        }
        run = CohomologyRun(scope=scope_of(config), sectors=config.sectors, graphs=entries, aggregate=aggregate)
        report_store.save_json(report_store.resolve(config.output, "cohomology.json"), run)
        summary_table(
            f"{run.scope}: cohomology",
            ["graph", "sector", "dims", "free ranks", "torsion"],
            [[entry.key, entry.sector, [d.dim for d in entry.report.degrees], entry.report.free_ranks(),
              [d.torsion for d in entry.report.degrees if d.torsion]] for entry in entries],
        )
        mismatched = [entry for entry in entries if not entry.report.euler_matches()]
        if mismatched:
            logger.error(f"❌ Euler characteristic mismatch on {mismatched[0].key}/{mismatched[0].sector}")
            return EXIT_FAILURE
        unconfirmed = [entry for entry in entries if entry.report.rank_mismatches]
        if unconfirmed:
            logger.error(f"❌ Modular rank cross-check failed on {unconfirmed[0].key}/{unconfirmed[0].sector}")
            return EXIT_FAILURE
        return EXIT_OK

    run_command(body)

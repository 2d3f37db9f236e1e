from pathlib import Path
from typing import Optional
import logging

import typer

from app.checks import EXIT_OK, MIXED
from app.config import settings
from app.routers.common import build_config, load_graphs, run_command
from app.schemas.chains import GeneratorRecord
from app.services.marking_complex import exp_generator
from app.utils.conflict import sector_system
from app.utils.data_manager import report_store

logger = logging.getLogger(__name__)


def cmd_generator(
    r: Optional[int] = typer.Option(None, "--r", help="Number of legs"),
    l: Optional[int] = typer.Option(None, "--l", help="Loop order"),
    graph: Optional[Path] = typer.Option(None, "--graph", help="Graph JSON file instead of a family"),
    legs_labeled: bool = typer.Option(True, "--legs-labeled/--legs-unlabeled"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output JSON (default: <output dir>/chain.json)"),
    max_vertices: int = typer.Option(settings.max_vertices, "--max-vertices"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """
    Emit e^delta e^chi(m0) for every graph: the sum of all admissible
    1-markings of edges and cycles, each with coefficient +1.
    """
    config = build_config(
        command="generator", r=r, l=l, graph_path=graph, legs_labeled=legs_labeled,
        output=out, max_vertices=max_vertices, verbose=verbose,
    )

    def body() -> int:
        keyed = load_graphs(config)
        chains = [exp_generator(sector_system(g, MIXED, name=key)) for key, g in keyed.items()]
        record = GeneratorRecord(
            r=config.r,
            l=config.l,
            legs_labeled=config.legs_labeled,
            graphs=list(keyed),
            chains=[chain.to_record() for chain in chains],
            total_terms=sum(len(chain) for chain in chains),
        )
        target = report_store.save_json(report_store.resolve(config.output, "chain.json"), record)
        logger.info(f"✅ {record.total_terms} term(s) over {len(chains)} graph(s) written to {target}")
        return EXIT_OK

    run_command(body)

from pathlib import Path
from typing import Optional
import logging

import typer

from app.checks import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, parse_checks
from app.config import settings
from app.routers.common import build_config, console, family_of, load_graphs, run_command, scope_of, summary_table
from app.services.suite import SuiteRunner
from app.utils.data_manager import report_store

logger = logging.getLogger(__name__)


def cmd_verify(
    r: Optional[int] = typer.Option(None, "--r", help="Number of legs"),
    l: Optional[int] = typer.Option(None, "--l", help="Loop order"),
    graph: Optional[Path] = typer.Option(None, "--graph", help="Graph JSON file instead of a family"),
    legs_labeled: bool = typer.Option(True, "--legs-labeled/--legs-unlabeled"),
    checks: str = typer.Option("all", "--checks", help="all or a comma-separated subset of algebra,universal,acyclic,mu,cocycles,main,order,commute"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for the order trials"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Random reorderings per system"),
    report: Optional[Path] = typer.Option(None, "--report", "--out", help="Output JSON (default: <output dir>/report.json)"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Worker processes (default: MARKED_GRAPHS_WORKERS)"),
    inject_fault: Optional[str] = typer.Option(None, "--inject-fault", help="Flip one sign rule (mutation testing)"),
    timing: bool = typer.Option(False, "--timing", help="Record elapsed time per check (reports are then not reproducible)"),
    max_vertices: int = typer.Option(settings.max_vertices, "--max-vertices"),
    max_basis: int = typer.Option(settings.max_basis, "--max-basis"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Run the verification suite; exit 0 iff every check passes"""
    try:
        selected = parse_checks(checks)
    except ValueError as e:
        console.print(f"[red]Usage error:[/red] {e}")
        raise typer.Exit(code=EXIT_USAGE)
    config = build_config(
        command="verify", r=r, l=l, graph_path=graph, legs_labeled=legs_labeled, checks=selected,
        seed=seed if seed is not None else settings.seed,
        trials=trials if trials is not None else settings.order_trials,
        output=report, workers=workers if workers is not None else settings.workers,
        fault=inject_fault, timing=timing, max_vertices=max_vertices, max_basis=max_basis, verbose=verbose,
    )

    def body() -> int:
        keyed = load_graphs(config)
        spec = family_of(config) if config.graph_path is None else None
        suite = SuiteRunner(config.workers, timing=config.timing).run(
            keyed, config.checks, config.seed, config.trials, scope=scope_of(config), spec=spec, fault=config.fault,
        )
        report_store.save_json(report_store.resolve(config.output, "report.json"), suite)
        failures = [result for result in suite.results if not result.passed]
        summary_table(
            f"{suite.scope}: {suite.passed} passed, {suite.failed} failed",
            ["check", "scope", "status"],
            [[result.check, result.scope, result.status] for result in (failures or suite.results)],
        )
        return EXIT_OK if suite.all_passed else EXIT_FAILURE

    run_command(body)

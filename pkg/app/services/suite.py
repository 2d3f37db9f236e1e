"""
Suite runner: per-graph checks over a worker pool plus the family-level
main theorem check, assembled in a deterministic order.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from app.checks import MAIN
from app.config import settings
from app.schemas.reports import SuiteReport, VerificationResult
from app.services.enumeration import FamilySpec, graph_enumerator
from app.services.marking_complex import injected_fault
from app.services.theorems import graph_checks, verify_main_theorem
from app.utils.graph import Graph

logger = logging.getLogger(__name__)


def _run_graph(
    key: str,
    graph: Graph,
    checks: Sequence[str],
    seed: int,
    trials: int,
    fault: Optional[str],
    max_basis: int,
    timing: bool,
) -> List[VerificationResult]:
    """Worker entry point; bounds and fault are re-applied inside the worker process"""
    settings.max_basis = max_basis
    with injected_fault(fault):
        started = time.perf_counter()
        results = graph_checks(key, graph, checks, seed, trials)
        if timing:
            elapsed = round((time.perf_counter() - started) * 1000.0, 3)
            results = [result.model_copy(update={"elapsed_ms": elapsed}) for result in results]
    return results


class SuiteRunner:
    """Runs the selected checks on a keyed set of graphs"""

    def __init__(self, workers: Optional[int] = None, timing: bool = False):
        self.workers = workers if workers is not None else settings.workers
        self.timing = timing

    def run(
        self,
        graphs: Dict[str, Graph],
        checks: Sequence[str],
        seed: int,
        trials: int,
        scope: str,
        spec: Optional[FamilySpec] = None,
        fault: Optional[str] = None,
    ) -> SuiteReport:
        """
        Per-graph checks run in key order (in parallel when workers > 1); the
        main check runs once over all graphs. Results are sorted by (check, scope).
        """
        per_graph = [name for name in checks if name != MAIN]
        results: List[VerificationResult] = []
        jobs: List[Tuple] = [
            (key, graph, per_graph, seed, trials, fault, settings.max_basis, self.timing)
            for key, graph in sorted(graphs.items())
        ]
        if per_graph and jobs:
            logger.info(f"📋 Running {len(per_graph)} check(s) on {len(jobs)} graph(s) with {self.workers} worker(s)")
            if self.workers > 1 and len(jobs) > 1:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    futures = [pool.submit(_run_graph, *job) for job in jobs]
                    for future in futures:
                        results.extend(future.result())
            else:
                for job in jobs:
                    results.extend(_run_graph(*job))

        if MAIN in checks:
            with injected_fault(fault):
                started = time.perf_counter()
                main = verify_main_theorem(spec, graphs=graphs, scope=scope)
                if self.timing:
                    main = main.model_copy(update={"elapsed_ms": round((time.perf_counter() - started) * 1000.0, 3)})
            results.append(main)

        results.sort(key=lambda result: (result.check, result.scope))
        failed = sum(1 for result in results if not result.passed)
        report = SuiteReport(
            scope=scope,
            checks=list(checks),
            seed=seed,
            trials=trials,
            fault=fault,
            graphs=len(graphs),
            passed=len(results) - failed,
            failed=failed,
            results=results,
        )
        if failed:
            logger.warning(f"⚠️ {scope}: {failed} of {len(results)} check(s) failed")
        else:
            logger.info(f"✅ {scope}: all {len(results)} check(s) passed")
        return report


def run_family_suite(
    spec: FamilySpec,
    checks: Sequence[str],
    seed: int,
    trials: int,
    workers: Optional[int] = None,
    fault: Optional[str] = None,
    max_vertices: Optional[int] = None,
) -> SuiteReport:
    """Enumerate the family and run every selected check on it"""
    graphs = graph_enumerator.enumerate_keyed(spec, max_vertices)
    return SuiteRunner(workers).run(graphs, checks, seed, trials, scope=spec.label, spec=spec, fault=fault)

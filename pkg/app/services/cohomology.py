"""
Integral (co)homology of bounded complexes of free abelian groups via Smith normal form
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from app.checks import CYCLE, D_TOTAL, EDGE, MIXED, TOTAL, VERTEX
from app.errors import ComplexError
from app.schemas.reports import CohomologyReport, DegreeReport, RankMismatch
from app.services.marking_complex import (
    DifferentialMatrix,
    complex_matrices,
    max_degree,
    mu_basis,
    mu_boundary_matrix,
)
from app.utils.chains import marking_key
from app.utils.conflict import ConflictSystem, sector_system
from app.utils.data_manager import report_store
from app.utils.graph import Graph
from app.utils.smith import SNFResult, SparseIntMatrix, rank_mod_p, smith_normal_form

logger = logging.getLogger(__name__)

# differential used for the complex of each sector
SECTOR_KIND: Dict[str, str] = {EDGE: D_TOTAL, CYCLE: D_TOTAL, VERTEX: D_TOTAL, MIXED: TOTAL}

# modular rank cross-check: prime and largest matrix (rows x cols) it runs on
RANK_CHECK_PRIME = 32003
RANK_CHECK_MAX_CELLS = 250_000


def _as_sparse(matrix) -> SparseIntMatrix:
    return matrix.to_sparse() if isinstance(matrix, DifferentialMatrix) else matrix


def _composition_witness(first, second, degree: int) -> Optional[Dict[str, object]]:
    """Coordinates of the first nonzero entry of second @ first"""
    product = _as_sparse(second) @ _as_sparse(first)
    hit = product.first_nonzero()
    if hit is None:
        return None
    row, col, value = hit
    witness: Dict[str, object] = {"degree": degree, "row": row, "col": col, "value": value}
    if isinstance(first, DifferentialMatrix) and isinstance(second, DifferentialMatrix):
        witness["source"] = marking_key(first.cols[col])
        witness["target"] = marking_key(second.rows[row])
    return witness


def check_composition(matrices: Sequence) -> None:
    """
    Raises:
        ComplexError: two consecutive maps do not compose to zero
    """
    for degree in range(len(matrices) - 1):
        witness = _composition_witness(matrices[degree], matrices[degree + 1], degree)
        if witness is not None:
            raise ComplexError(f"Differentials leaving degrees {degree} and {degree + 1} do not compose to zero", witness)


def rank_mismatches(
    maps: Iterable[Tuple[int, object, SNFResult]], p: int = RANK_CHECK_PRIME
) -> List[RankMismatch]:
    """
    Cross-check each (degree, matrix, SNF) triple against the rank over GF(p).

    Reducing mod p kills exactly the invariant factors divisible by p, so the
    modular rank must equal the count of the others. Matrices above
    RANK_CHECK_MAX_CELLS entries are skipped.
    """
    mismatches: List[RankMismatch] = []
    for degree, matrix, result in maps:
        matrix = _as_sparse(matrix)
        if matrix.n_rows * matrix.n_cols > RANK_CHECK_MAX_CELLS:
            logger.debug(f"🔍 Skipping the mod {p} rank of {matrix!r}")
            continue
        expected = sum(1 for factor in result.invariant_factors if factor % p)
        modular = rank_mod_p(matrix, p)
        if modular != expected:
            logger.warning(
                f"⚠️ Map leaving degree {degree} has rank {modular} mod {p}, "
                f"its invariant factors give {expected}"
            )
            mismatches.append(RankMismatch(degree=degree, rank=expected, rank_mod_p=modular, p=p))
    return mismatches


def cohomology(dims: Sequence[int], matrices: Sequence) -> CohomologyReport:
    """
    Cohomology of 0 -> C^0 -> C^1 -> ... -> C^N with matrices[n]: C^n -> C^(n+1).

    A missing last matrix means the top degree maps to zero. Consecutive
    matrices must compose to zero, otherwise ComplexError is raised.
    """
    check_composition(matrices)
    results: List[SNFResult] = [smith_normal_form(_as_sparse(matrix)) for matrix in matrices]
    degrees = []
    for n, dim in enumerate(dims):
        outgoing = results[n].rank if n < len(results) else 0
        incoming = results[n - 1] if 0 < n <= len(results) else None
        free_rank = dim - outgoing - (incoming.rank if incoming else 0)
        degrees.append(DegreeReport(
            n=n,
            dim=dim,
            free_rank=free_rank,
            torsion=list(incoming.torsion) if incoming else [],
        ))
    return CohomologyReport(
        degrees=degrees,
        euler=sum((-1) ** n * dim for n, dim in enumerate(dims)),
        rank_mismatches=rank_mismatches((n, matrix, results[n]) for n, matrix in enumerate(matrices)),
    )


def homology(dims: Sequence[int], boundaries: Sequence) -> CohomologyReport:
    """
    Homology of C_N -> ... -> C_1 -> C_0 -> 0 with boundaries[k]: C_k -> C_(k-1)
    for k >= 1 (boundaries[0] is ignored and may be None).
    """
    maps = list(boundaries[1:])
    # C_k -> C_{k-1} composed with C_{k+1} -> C_k
    for k in range(1, len(maps)):
        witness = _composition_witness(maps[k], maps[k - 1], k + 1)
        if witness is not None:
            raise ComplexError(f"Boundaries leaving degrees {k + 1} and {k} do not compose to zero", witness)
    results = {k + 1: smith_normal_form(_as_sparse(matrix)) for k, matrix in enumerate(maps)}
    degrees = []
    for k, dim in enumerate(dims):
        outgoing = results[k].rank if k in results else 0
        incoming = results.get(k + 1)
        degrees.append(DegreeReport(
            n=k,
            dim=dim,
            free_rank=dim - outgoing - (incoming.rank if incoming else 0),
            torsion=list(incoming.torsion) if incoming else [],
        ))
    return CohomologyReport(
        degrees=degrees,
        euler=sum((-1) ** k * dim for k, dim in enumerate(dims)),
        rank_mismatches=rank_mismatches((k, maps[k - 1], result) for k, result in results.items()),
    )


def complex_cohomology(cs: ConflictSystem, kind: str = D_TOTAL) -> CohomologyReport:
    """Cohomology of the marking complex of cs under one differential kind"""
    dims, matrices = complex_matrices(cs, kind)
    report = cohomology(dims, matrices)
    logger.debug(f"🔍 {kind}-cohomology of {cs!r}: free ranks {report.free_ranks()}")
    return report


def sector_cohomology(g: Graph, sector: str) -> CohomologyReport:
    """D-cohomology of the edge, cycle or vertex complex; total cohomology of the mixed one"""
    if sector not in SECTOR_KIND:
        raise ValueError(f"Unknown sector '{sector}'")
    return complex_cohomology(sector_system(g, sector), SECTOR_KIND[sector])


def export_matrices(keyed: Dict[str, Graph], sectors: Sequence[str], directory: Union[str, Path]) -> Path:
    """
    Write every differential of every sector complex as a COO text file
    (one 'row col value' line per nonzero entry) under directory, plus a
    manifest.json giving, per file, the graph key, sector, kind, degree,
    shape and the row and column bases as marking keys.

    Files are named g<graph index>_<sector>_d<source degree>.coo, graphs
    indexed in key order.
    """
    directory = Path(directory)
    files: List[Dict[str, object]] = []
    for index, (key, g) in enumerate(keyed.items()):
        for sector in sectors:
            kind = SECTOR_KIND[sector]
            _, matrices = complex_matrices(sector_system(g, sector), kind)
            for degree, matrix in enumerate(matrices):
                name = f"g{index:03d}_{sector}_d{degree}.coo"
                report_store.save_text(directory / name, matrix.to_coo())
                files.append({
                    "file": name,
                    "key": key,
                    "sector": sector,
                    "kind": kind,
                    "degree": degree,
                    "shape": list(matrix.shape),
                    **matrix.manifest(),
                })
    logger.info(f"📤 Exported {len(files)} matrix file(s) to {directory}")
    return report_store.save_json(directory / "manifest.json", {"matrices": files})


def mu_homology(cs: ConflictSystem, fully_marked: bool = False) -> CohomologyReport:
    """
    Homology of the delta-only complex graded by 1-mark count k.

    With fully_marked, only markings that mark every element are kept (the
    all-marked model complex of a conflict-free system).
    """
    top = len(cs) if fully_marked else max_degree(cs)
    dims = [len(mu_basis(cs, k, fully_marked)) for k in range(top + 1)]
    boundaries: List[Optional[DifferentialMatrix]] = [None]
    boundaries.extend(mu_boundary_matrix(cs, k, fully_marked) for k in range(1, top + 1))
    return homology(dims, boundaries)

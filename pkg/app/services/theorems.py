"""
Executable checks of the algebraic statements about marking complexes.

Every check returns a VerificationResult; a failure carries a witness (the
identity, degree and markings where it breaks) and is never raised.
"""
import itertools
import logging
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from scipy import sparse

from app.checks import (
    ACYCLIC,
    ALGEBRA,
    COCYCLES,
    COMMUTE,
    CYCLE,
    D,
    D_TOTAL,
    DELTA,
    EDGE,
    MAIN,
    MIXED,
    MU,
    ORDER,
    S_SECTOR,
    T_SECTOR,
    TOTAL,
    UNIVERSAL,
    VERTEX,
)
from app.errors import ComplexError
from app.schemas.reports import CohomologyReport, VerificationResult
from app.services.cohomology import complex_cohomology, mu_homology
from app.services.enumeration import FamilySpec, graph_enumerator
from app.services.marking_complex import (
    DifferentialMatrix,
    apply_differential,
    differential_matrix,
    exp_generator,
    exp_series,
    max_degree,
    transport,
)
from app.utils.chains import Chain, marking_key, sector_bigrade
from app.utils.conflict import ConflictSystem, conflict_graph, sector_system, system_from_pairs
from app.utils.graph import Graph

logger = logging.getLogger(__name__)


def _result(check: str, scope: str, witness: Optional[Dict[str, Any]], **details: Any) -> VerificationResult:
    status = "pass" if witness is None else "fail"
    if witness is not None:
        logger.error(f"❌ {check} failed on {scope}: {witness}")
    return VerificationResult(check=check, scope=scope, status=status, witness=witness, details=details)


def _scope(cs: ConflictSystem, scope: Optional[str]) -> str:
    return scope if scope is not None else (cs.name or repr(cs))


# --- Matrix identities ---

class _Matrices:
    """Differential matrices of one system, built once per (kind, degree)"""

    def __init__(self, cs: ConflictSystem):
        self.cs = cs
        self.top = max_degree(cs)
        self._cache: Dict[tuple, DifferentialMatrix] = {}

    def get(self, kind: str, degree: int) -> DifferentialMatrix:
        key = (kind, degree)
        if key not in self._cache:
            self._cache[key] = differential_matrix(self.cs, kind, degree)
        return self._cache[key]

    def csr(self, kind: str, degree: int) -> sparse.csr_matrix:
        return self.get(kind, degree).to_scipy()


def _first_nonzero(product: sparse.spmatrix):
    coo = product.tocoo()
    hits = sorted((int(r), int(c), int(v)) for r, c, v in zip(coo.row, coo.col, coo.data) if v)
    return hits[0] if hits else None


def _identity_witness(
    matrices: _Matrices, name: str, degree: int, product: sparse.spmatrix
) -> Optional[Dict[str, Any]]:
    hit = _first_nonzero(product)
    if hit is None:
        return None
    row, col, value = hit
    source = matrices.get(D_TOTAL, degree).cols[col]
    target = matrices.get(D_TOTAL, degree + 1).rows[row]
    return {
        "identity": name,
        "degree": degree,
        "source": marking_key(source),
        "target": marking_key(target),
        "value": value,
        "bigrade": {sector: grade.model_dump() for sector, grade in sector_bigrade(matrices.cs, source).items()},
    }


def _square_zero(matrices: _Matrices, kind: str, degree: int) -> sparse.spmatrix:
    return matrices.csr(kind, degree + 1) @ matrices.csr(kind, degree)


def verify_differential_algebra(cs: ConflictSystem, scope: Optional[str] = None) -> VerificationResult:
    """delta^2 = d^2 = D^2 = 0 and delta d + d delta = 0 in every degree; S, T and the total differential too on mixed systems"""
    matrices = _Matrices(cs)
    mixed = bool(cs.members(EDGE)) and bool(cs.members(CYCLE))
    identities = 0
    for n in range(matrices.top):
        products = [
            ("delta o delta", _square_zero(matrices, DELTA, n)),
            ("d o d", _square_zero(matrices, D, n)),
            ("delta o d + d o delta",
             matrices.csr(DELTA, n + 1) @ matrices.csr(D, n) + matrices.csr(D, n + 1) @ matrices.csr(DELTA, n)),
            ("D o D", _square_zero(matrices, D_TOTAL, n)),
        ]
        if mixed:
            products.extend([
                ("S o S", _square_zero(matrices, S_SECTOR, n)),
                ("T o T", _square_zero(matrices, T_SECTOR, n)),
                ("total o total", _square_zero(matrices, TOTAL, n)),
            ])
        for name, product in products:
            identities += 1
            witness = _identity_witness(matrices, name, n, product)
            if witness is not None:
                return _result(ALGEBRA, _scope(cs, scope), witness)
    return _result(ALGEBRA, _scope(cs, scope), None, identities=identities)


def verify_commutation(g: Graph, scope: Optional[str] = None) -> VerificationResult:
    """ST - TS = 0 on the mixed system, degree by degree"""
    cs = sector_system(g, MIXED)
    matrices = _Matrices(cs)
    for n in range(matrices.top):
        commutator = (
            matrices.csr(S_SECTOR, n + 1) @ matrices.csr(T_SECTOR, n)
            - matrices.csr(T_SECTOR, n + 1) @ matrices.csr(S_SECTOR, n)
        )
        witness = _identity_witness(matrices, "S o T - T o S", n, commutator)
        if witness is not None:
            return _result(COMMUTE, _scope(cs, scope), witness)
    return _result(COMMUTE, _scope(cs, scope), None, degrees=matrices.top)


# --- Transport ---

def reference_conflicts(g: Graph, cs: ConflictSystem, sector: str) -> Set[Tuple[int, int]]:
    """
    Conflicting position pairs of cs recomputed from g alone: adjacency in the
    line graph of the multigraph for edges, intersecting vertex sets of the
    edge ids for cycles.
    """
    pairs: Set[Tuple[int, int]] = set()
    if sector == EDGE:
        position = {element.payload[0]: index for index, element in enumerate(cs.elements)}
        line = nx.line_graph(g.to_networkx(), create_using=nx.Graph)
        for (_, _, first), (_, _, second) in line.edges():
            a, b = position[first], position[second]
            pairs.add((min(a, b), max(a, b)))
        return pairs
    vertex_sets = [{w for edge_id in element.payload for w in g.edges[edge_id]} for element in cs.elements]
    for a, b in itertools.combinations(range(len(cs)), 2):
        if vertex_sets[a] & vertex_sets[b]:
            pairs.add((a, b))
    return pairs


def conflict_graph_witness(g: Graph, cs: ConflictSystem, sector: str) -> Optional[Dict[str, Any]]:
    """First element pair on which cs and the reference conflicts of g disagree"""
    expected = reference_conflicts(g, cs, sector)
    got = {(min(a, b), max(a, b)) for a, b in conflict_graph(cs).edges()}
    differing = sorted(expected ^ got)
    if not differing:
        return None
    a, b = differing[0]
    return {
        "identity": "conflict graph",
        "elements": [cs.elements[a].label, cs.elements[b].label],
        "expected": (a, b) in expected,
        "got": (a, b) in got,
    }


def verify_universal(g: Graph, sector: str, scope: Optional[str] = None) -> VerificationResult:
    """
    The conflict graph of the edge or cycle system matches the one recomputed
    from g, and the complex equals the vertex complex of that graph under Psi.
    """
    if sector not in (EDGE, CYCLE):
        raise ValueError(f"Universality is checked for the edge and cycle sectors, not '{sector}'")
    cs = sector_system(g, sector)
    witness = conflict_graph_witness(g, cs, sector)
    if witness is not None:
        return _result(UNIVERSAL, _scope(cs, scope), witness)
    psi = transport(cs)
    top = max_degree(cs)
    for n in range(top + 1):
        for kind in (DELTA, D):
            witness = psi.intertwining_witness(kind, n)
            if witness is not None:
                return _result(UNIVERSAL, _scope(cs, scope), witness)
    return _result(UNIVERSAL, _scope(cs, scope), None, elements=len(cs), degrees=top + 1)


# --- Cohomology statements ---

def _report_witness(expected: str, report: CohomologyReport) -> Dict[str, Any]:
    return {"expected": expected, "report": report.model_dump()}


def verify_acyclicity(cs: ConflictSystem, kind: str = D_TOTAL, scope: Optional[str] = None) -> VerificationResult:
    """Cohomology is Z in degree 0 and vanishes above, without torsion"""
    try:
        report = complex_cohomology(cs, kind)
    except ComplexError as e:
        return _result(ACYCLIC, _scope(cs, scope), {"error": str(e), **e.witness})
    if report.rank_mismatches:
        return _result(ACYCLIC, _scope(cs, scope), _report_witness("ranks confirmed mod p", report))
    if not report.is_integers_in_degree_zero():
        return _result(ACYCLIC, _scope(cs, scope), _report_witness("Z in degree 0 only", report))
    return _result(ACYCLIC, _scope(cs, scope), None, dims=[degree.dim for degree in report.degrees])


def verify_mu_homology(cs: ConflictSystem, scope: Optional[str] = None) -> VerificationResult:
    """
    delta-only homology of cs is Z at k = 0, and the all-marked model complexes
    on n = 1..max_degree(cs) independent elements are exact.
    """
    try:
        report = mu_homology(cs)
        if not report.is_integers_in_degree_zero():
            return _result(MU, _scope(cs, scope), _report_witness("Z at k = 0 only", report))
        for n in range(1, max(max_degree(cs), 1) + 1):
            model = mu_homology(system_from_pairs(n, [], name=f"independent-{n}"), fully_marked=True)
            if any(degree.free_rank or degree.torsion for degree in model.degrees):
                witness = _report_witness(f"exact all-marked model on {n} elements", model)
                return _result(MU, _scope(cs, scope), witness)
    except ComplexError as e:
        return _result(MU, _scope(cs, scope), {"error": str(e), **e.witness})
    return _result(MU, _scope(cs, scope), None, dims=[degree.dim for degree in report.degrees])


def _chain_witness(name: str, image: Chain) -> Dict[str, Any]:
    marking, coeff = next(iter(image))
    return {"chain": name, "marking": marking_key(marking), "coeff": coeff, "terms": len(image)}


def verify_cocycles(g: Graph, scope: Optional[str] = None) -> VerificationResult:
    """
    S e^chi(m0) = 0 on edges, T e^delta(m0) = 0 on cycles, and on the mixed
    system the total differential kills e^delta e^chi(m0), which also matches
    its exponential series.
    """
    edges = sector_system(g, EDGE)
    cycles = sector_system(g, CYCLE)
    mixed = sector_system(g, MIXED)
    generator = exp_generator(mixed)
    images = [
        ("S e^chi (edge complex)", apply_differential(edges, D_TOTAL, exp_generator(edges))),
        ("T e^delta (cycle complex)", apply_differential(cycles, D_TOTAL, exp_generator(cycles))),
        ("S e^chi (mixed complex)", apply_differential(mixed, S_SECTOR, exp_generator(mixed, [EDGE]))),
        ("T e^delta (mixed complex)", apply_differential(mixed, T_SECTOR, exp_generator(mixed, [CYCLE]))),
        ("total e^delta e^chi", apply_differential(mixed, TOTAL, generator)),
    ]
    scope = scope if scope is not None else str(g)
    for name, image in images:
        if not image.is_zero():
            return _result(COCYCLES, scope, _chain_witness(name, image))
    series = exp_series(mixed, (CYCLE, EDGE))
    if series != generator:
        difference = series - generator
        return _result(COCYCLES, scope, _chain_witness("exponential series - independent-set sum", difference))
    return _result(COCYCLES, scope, None, generator_terms=len(generator))


def verify_order_independence(
    cs: ConflictSystem, trials: int, seed: int, kind: str = D_TOTAL, scope: Optional[str] = None
) -> VerificationResult:
    """Random reorderings of the elements leave the cohomology report unchanged"""
    try:
        reference = complex_cohomology(cs, kind).model_dump()
        rng = np.random.default_rng(seed)
        for trial in range(trials):
            permutation = [int(k) for k in rng.permutation(len(cs))]
            report = complex_cohomology(cs.reordered(permutation), kind).model_dump()
            if report != reference:
                witness = {"trial": trial, "permutation": permutation, "expected": reference, "got": report}
                return _result(ORDER, _scope(cs, scope), witness)
    except ComplexError as e:
        return _result(ORDER, _scope(cs, scope), {"error": str(e), **e.witness})
    return _result(ORDER, _scope(cs, scope), None, trials=trials, seed=seed)


def verify_main_theorem(
    spec: Optional[FamilySpec] = None, graphs: Optional[Dict[str, Graph]] = None, scope: Optional[str] = None
) -> VerificationResult:
    """
    Total cohomology over the family is free of rank |family| in degree 0 and
    vanishes above; each e^delta e^chi(m0) is a nonzero degree-0 cocycle.

    Degree 0 receives no differential, so a nonzero cocycle there is a
    nontrivial class.
    """
    if graphs is None and spec is None:
        raise ValueError("Either a family or a keyed set of graphs is required")
    keyed = graphs if graphs is not None else graph_enumerator.enumerate_keyed(spec)
    scope = scope if scope is not None else (spec.label if spec is not None else "graphs")
    reports: List[CohomologyReport] = []
    generator_terms = 0
    for key, g in keyed.items():
        cs = sector_system(g, MIXED)
        try:
            report = complex_cohomology(cs, TOTAL)
        except ComplexError as e:
            return _result(MAIN, scope, {"graph": key, "error": str(e), **e.witness})
        if report.rank_mismatches:
            return _result(MAIN, scope, {"graph": key, **_report_witness("ranks confirmed mod p", report)})
        if not report.is_integers_in_degree_zero():
            return _result(MAIN, scope, {"graph": key, **_report_witness("Z in degree 0 only", report)})
        generator = exp_generator(cs)
        image = apply_differential(cs, TOTAL, generator)
        if generator.is_zero():
            return _result(MAIN, scope, {"graph": key, "chain": "e^delta e^chi", "terms": 0})
        if not image.is_zero():
            return _result(MAIN, scope, {"graph": key, **_chain_witness("total e^delta e^chi", image)})
        generator_terms += len(generator)
        reports.append(report)

    aggregate = CohomologyReport.direct_sum(reports)
    ranks = aggregate.free_ranks()
    degree0 = ranks[0] if ranks else 0
    if degree0 != len(keyed) or any(ranks[1:]) or aggregate.has_torsion():
        return _result(MAIN, scope, {"graphs": len(keyed), "report": aggregate.model_dump()})
    logger.info(f"✅ {scope}: degree-0 total cohomology has rank {degree0} = number of graphs")
    return _result(MAIN, scope, None, graphs=len(keyed), degree0_rank=degree0, generator_terms=generator_terms)


# --- Per-graph bundle used by the suite ---

def graph_checks(key: str, g: Graph, checks: Sequence[str], seed: int, trials: int) -> List[VerificationResult]:
    """All selected per-graph checks of one graph (main is family-level and excluded)"""
    results: List[VerificationResult] = []
    systems = {sector: sector_system(g, sector, name=f"{key}/{sector}") for sector in (EDGE, CYCLE, VERTEX, MIXED)}
    kinds = {EDGE: D_TOTAL, CYCLE: D_TOTAL, VERTEX: D_TOTAL, MIXED: TOTAL}
    if ALGEBRA in checks:
        results.extend(verify_differential_algebra(cs) for cs in systems.values())
    if UNIVERSAL in checks:
        results.extend(verify_universal(g, sector, scope=f"{key}/{sector}") for sector in (EDGE, CYCLE))
    if ACYCLIC in checks:
        results.extend(verify_acyclicity(cs, kinds[sector]) for sector, cs in systems.items())
    if MU in checks:
        results.append(verify_mu_homology(systems[VERTEX]))
    if COCYCLES in checks:
        results.append(verify_cocycles(g, scope=f"{key}/{MIXED}"))
    if ORDER in checks:
        results.extend(
            verify_order_independence(cs, trials, seed, kinds[sector]) for sector, cs in systems.items()
        )
    if COMMUTE in checks:
        results.append(verify_commutation(g, scope=f"{key}/{MIXED}"))
    return results

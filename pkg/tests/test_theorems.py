import pytest

from app.checks import ALGEBRA, ALL_CHECKS, COMMUTE, CYCLE, D_TOTAL, EDGE, FAULTS, MAIN, MIXED, ORDER, TOTAL
from app.schemas.reports import CohomologyReport, DegreeReport, RankMismatch
from app.services import theorems
from app.services.enumeration import FamilySpec, GraphEnumerator
from app.services.marking_complex import injected_fault
from app.services.suite import SuiteRunner, run_family_suite
from app.services.theorems import (
    conflict_graph_witness,
    graph_checks,
    verify_acyclicity,
    verify_cocycles,
    verify_commutation,
    verify_differential_algebra,
    verify_main_theorem,
    verify_mu_homology,
    verify_order_independence,
    verify_universal,
)
from app.utils.conflict import (
    ConflictSystem,
    edge_conflict_system,
    sector_system,
    system_from_pairs,
    vertex_conflict_system,
)
from app.utils.data_manager import dumps

GRAPHS = ["bubble", "dumbbell", "theta", "tree", "triangle"]


@pytest.mark.parametrize("fixture", GRAPHS)
@pytest.mark.parametrize("sector", [EDGE, CYCLE, "vertex", MIXED])
def test_differential_algebra(fixture, sector, request):
    cs = sector_system(request.getfixturevalue(fixture), sector)
    result = verify_differential_algebra(cs, scope=f"{fixture}/{sector}")
    assert result.passed, result.witness
    assert result.witness is None


def test_algebra_counts_sector_identities_on_mixed_systems(dumbbell):
    plain = verify_differential_algebra(sector_system(dumbbell, EDGE))
    mixed = verify_differential_algebra(sector_system(dumbbell, MIXED))
    assert mixed.details["identities"] > plain.details["identities"]


@pytest.mark.parametrize("fixture", GRAPHS)
@pytest.mark.parametrize("sector", [EDGE, CYCLE])
def test_universal_model(fixture, sector, request):
    assert verify_universal(request.getfixturevalue(fixture), sector).passed


def test_universal_model_is_defined_for_edges_and_cycles_only(bubble):
    with pytest.raises(ValueError):
        verify_universal(bubble, "vertex")


def test_dropped_edge_conflict_is_caught(dumbbell):
    cs = edge_conflict_system(dumbbell)
    assert conflict_graph_witness(dumbbell, cs, EDGE) is None
    a, b = cs.conflict_pairs[0]
    tampered = ConflictSystem(cs.elements, cs.conflict_pairs[1:])
    assert conflict_graph_witness(dumbbell, tampered, EDGE) == {
        "identity": "conflict graph",
        "elements": [f"e{a}", f"e{b}"],
        "expected": True,
        "got": False,
    }


def test_spurious_cycle_conflict_is_caught(dumbbell):
    cs = sector_system(dumbbell, CYCLE)
    assert conflict_graph_witness(dumbbell, cs, CYCLE) is None
    witness = conflict_graph_witness(dumbbell, ConflictSystem(cs.elements, [(0, 1)]), CYCLE)
    assert witness["elements"] == ["c0", "c1"]
    assert witness["expected"] is False and witness["got"] is True


def test_universal_check_fails_on_a_tampered_system(monkeypatch, theta):
    cs = sector_system(theta, CYCLE)
    tampered = ConflictSystem(cs.elements, cs.conflict_pairs[1:])
    monkeypatch.setattr(theorems, "sector_system", lambda g, sector: tampered)
    result = verify_universal(theta, CYCLE)
    assert not result.passed
    assert result.witness["identity"] == "conflict graph"


@pytest.mark.parametrize("fixture", GRAPHS)
def test_acyclicity_of_every_sector(fixture, request):
    graph = request.getfixturevalue(fixture)
    for sector, kind in ((EDGE, D_TOTAL), (CYCLE, D_TOTAL), ("vertex", D_TOTAL), (MIXED, TOTAL)):
        assert verify_acyclicity(sector_system(graph, sector), kind).passed


def test_acyclicity_of_small_conflict_systems(bubble):
    assert verify_acyclicity(system_from_pairs(0, [])).passed
    assert verify_acyclicity(system_from_pairs(3, [(0, 1), (1, 2), (0, 2)])).passed
    assert verify_acyclicity(edge_conflict_system(bubble)).passed


@pytest.mark.parametrize("fixture", GRAPHS + ["vertex_example"])
def test_mu_homology(fixture, request):
    result = verify_mu_homology(vertex_conflict_system(request.getfixturevalue(fixture)))
    assert result.passed, result.witness


@pytest.mark.parametrize("fixture", GRAPHS)
def test_cocycles(fixture, request):
    result = verify_cocycles(request.getfixturevalue(fixture))
    assert result.passed, result.witness
    assert result.details["generator_terms"] > 0


@pytest.mark.parametrize("fixture", ["bubble", "dumbbell", "theta"])
def test_sector_differentials_commute(fixture, request):
    assert verify_commutation(request.getfixturevalue(fixture)).passed


def test_order_independence(dumbbell):
    for sector, kind in ((EDGE, D_TOTAL), (MIXED, TOTAL)):
        result = verify_order_independence(sector_system(dumbbell, sector), trials=20, seed=7, kind=kind)
        assert result.passed
        assert result.details == {"trials": 20, "seed": 7}
    assert verify_order_independence(system_from_pairs(1, []), trials=5, seed=1).passed


@pytest.mark.parametrize("r, l", [(2, 1), (3, 1), (4, 1), (2, 2)])
def test_main_theorem(r, l):
    spec = FamilySpec(r=r, l=l)
    count = len(GraphEnumerator().enumerate_keyed(spec))
    result = verify_main_theorem(spec)
    assert result.passed, result.witness
    assert result.details["degree0_rank"] == count
    assert result.details["graphs"] == count


def test_main_theorem_needs_graphs():
    with pytest.raises(ValueError):
        verify_main_theorem()


def test_graph_checks_scopes(dumbbell):
    results = graph_checks("db", dumbbell, [ALGEBRA, COMMUTE], seed=1, trials=1)
    assert {result.scope for result in results} == {"db/edge", "db/cycle", "db/vertex", "db/mixed"}
    assert all(result.passed for result in results)
    assert MAIN not in {result.check for result in results}


# --- Mutation sensitivity ---

@pytest.mark.parametrize("fault", sorted(FAULTS))
def test_every_sign_fault_is_caught_with_a_witness(dumbbell, fault):
    with injected_fault(fault):
        results = graph_checks("db", dumbbell, [ALGEBRA, COMMUTE], seed=1, trials=1)
    failures = [result for result in results if not result.passed]
    assert failures
    assert all(result.witness for result in failures)


@pytest.mark.parametrize(
    "fault, sector, identity",
    [
        ("delta_position", EDGE, "delta o delta"),
        ("d_position", EDGE, "d o d"),
        ("delta_global", EDGE, "delta o d + d o delta"),
        ("total_sign", MIXED, "total o total"),
    ],
)
def test_fault_witness_names_the_broken_identity(dumbbell, fault, sector, identity):
    with injected_fault(fault):
        result = verify_differential_algebra(sector_system(dumbbell, sector))
    assert not result.passed
    assert result.witness["identity"] == identity
    assert result.witness["degree"] == 0
    assert set(result.witness) >= {"source", "target", "value", "bigrade"}


def test_sector_sign_fault_breaks_commutation(dumbbell):
    with injected_fault("sector_signs"):
        result = verify_commutation(dumbbell)
    assert not result.passed
    assert result.witness["identity"] == "S o T - T o S"


# --- Suite ---

def test_suite_on_the_smallest_family():
    report = run_family_suite(FamilySpec(r=2, l=1), list(ALL_CHECKS), seed=7, trials=3)
    assert report.all_passed
    assert report.graphs == 1
    assert report.passed == len(report.results)
    assert [(result.check, result.scope) for result in report.results] == sorted(
        (result.check, result.scope) for result in report.results
    )


def test_suite_reports_are_reproducible(bubble, dumbbell):
    graphs = {"bubble": bubble, "dumbbell": dumbbell}
    first = SuiteRunner(workers=1).run(graphs, [ORDER], seed=7, trials=5, scope="pair")
    second = SuiteRunner(workers=1).run(graphs, [ORDER], seed=7, trials=5, scope="pair")
    assert dumps(first) == dumps(second)
    assert all(result.elapsed_ms is None for result in first.results)


def test_suite_records_faults(dumbbell):
    report = SuiteRunner(workers=1).run(
        {"db": dumbbell}, [ALGEBRA], seed=1, trials=1, scope="db", fault="delta_position"
    )
    assert report.fault == "delta_position"
    assert not report.all_passed
    assert report.failed >= 1


def test_suite_timing_is_opt_in(bubble):
    report = SuiteRunner(workers=1, timing=True).run({"bubble": bubble}, [ALGEBRA], seed=1, trials=1, scope="b")
    assert all(result.elapsed_ms is not None for result in report.results)


@pytest.mark.slow
def test_worker_pool_matches_inline_run():
    spec = FamilySpec(r=2, l=2)
    inline = run_family_suite(spec, [ALGEBRA, ORDER], seed=3, trials=2, workers=1)
    pooled = run_family_suite(spec, [ALGEBRA, ORDER], seed=3, trials=2, workers=2)
    assert dumps(inline) == dumps(pooled)


@pytest.mark.slow
@pytest.mark.parametrize("r, l", [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (2, 3)])
def test_all_checks_on_the_reference_families(r, l):
    report = run_family_suite(FamilySpec(r=r, l=l), list(ALL_CHECKS), seed=20240101, trials=20)
    assert report.all_passed, [result.witness for result in report.results if not result.passed][:1]


def _unconfirmed_report(*args, **kwargs) -> CohomologyReport:
    return CohomologyReport(
        degrees=[DegreeReport(n=0, dim=1, free_rank=1)],
        euler=1,
        rank_mismatches=[RankMismatch(degree=0, rank=1, rank_mod_p=0, p=32003)],
    )


def test_rank_mismatch_fails_acyclicity(monkeypatch, bubble):
    monkeypatch.setattr(theorems, "complex_cohomology", _unconfirmed_report)
    result = verify_acyclicity(edge_conflict_system(bubble))
    assert not result.passed
    assert result.witness["expected"] == "ranks confirmed mod p"
    assert result.witness["report"]["rank_mismatches"][0]["rank_mod_p"] == 0


def test_rank_mismatch_fails_the_main_theorem(monkeypatch, bubble):
    monkeypatch.setattr(theorems, "complex_cohomology", _unconfirmed_report)
    result = verify_main_theorem(graphs={"bubble": bubble})
    assert not result.passed
    assert result.witness["graph"] == "bubble"

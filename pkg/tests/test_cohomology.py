import math

import pytest
from hypothesis import given, strategies as st

from app.checks import CYCLE, D_TOTAL, EDGE, MIXED, SECTORS, TOTAL, VERTEX
from app.errors import ComplexError
from app.schemas.reports import CohomologyReport, DegreeReport, RankMismatch
from app.services.cohomology import (
    RANK_CHECK_PRIME,
    SECTOR_KIND,
    check_composition,
    cohomology,
    complex_cohomology,
    homology,
    mu_homology,
    rank_mismatches,
    sector_cohomology,
)
from app.services.marking_complex import complex_matrices
from app.utils.conflict import edge_conflict_system, sector_system, system_from_pairs, vertex_conflict_system
from app.utils.graph import Graph
from app.utils.smith import SNFResult, SparseIntMatrix


def test_single_element_complex():
    report = complex_cohomology(system_from_pairs(1, []))
    assert [degree.dim for degree in report.degrees] == [2, 1]
    assert report.free_ranks() == [1, 0]
    assert report.is_integers_in_degree_zero()


def test_torsion_shows_up_in_the_target_degree():
    report = cohomology([1, 1], [SparseIntMatrix.from_dense([[2]])])
    assert report.degrees == [
        DegreeReport(n=0, dim=1, free_rank=0, torsion=[]),
        DegreeReport(n=1, dim=1, free_rank=0, torsion=[2]),
    ]
    assert report.has_torsion()
    assert report.euler == 0
    assert report.euler_matches()


def test_composition_is_checked():
    one = SparseIntMatrix.from_dense([[1]])
    with pytest.raises(ComplexError) as excinfo:
        cohomology([1, 1, 1], [one, one])
    assert excinfo.value.witness == {"degree": 0, "row": 0, "col": 0, "value": 1}


def test_marking_complex_composes_to_zero():
    cs = system_from_pairs(1, [])
    _, matrices = complex_matrices(cs, D_TOTAL)
    check_composition(matrices)


def test_homology_of_an_interval():
    # two points joined by one segment
    boundary = SparseIntMatrix.from_dense([[1], [-1]])
    report = homology([2, 1], [None, boundary])
    assert report.free_ranks() == [1, 0]


def test_homology_of_a_circle():
    boundary = SparseIntMatrix.from_dense([[-1, 1], [1, -1]])
    report = homology([2, 2], [None, boundary])
    assert report.free_ranks() == [1, 1]
    assert not report.is_integers_in_degree_zero()


@pytest.mark.parametrize("sector", SECTORS)
def test_every_sector_of_the_dumbbell_is_acyclic(dumbbell, sector):
    report = sector_cohomology(dumbbell, sector)
    assert report.is_integers_in_degree_zero()
    assert report.euler_matches()


def test_dumbbell_mixed_degree_zero(dumbbell):
    assert sector_cohomology(dumbbell, MIXED).free_ranks()[0] == 1


def test_tree_cycle_sector_is_a_single_generator(tree):
    report = sector_cohomology(tree, CYCLE)
    assert [degree.dim for degree in report.degrees] == [1]
    assert report.free_ranks() == [1]


def test_unknown_sector_is_rejected(bubble):
    with pytest.raises(ValueError):
        sector_cohomology(bubble, "faces")


def test_bubble_total_complex(bubble):
    report = sector_cohomology(bubble, MIXED)
    assert [degree.dim for degree in report.degrees] == [4, 3]
    assert report.free_ranks() == [1, 0]


@pytest.mark.parametrize("fixture", ["bubble", "dumbbell", "theta", "triangle", "vertex_example"])
def test_mu_homology_is_integers_in_degree_zero(fixture, request):
    cs = vertex_conflict_system(request.getfixturevalue(fixture))
    assert mu_homology(cs).is_integers_in_degree_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_all_marked_models_are_exact(n):
    report = mu_homology(system_from_pairs(n, []), fully_marked=True)
    assert [degree.dim for degree in report.degrees] == [
        math.comb(n, k) for k in range(n + 1)
    ]
    assert all(degree.free_rank == 0 and not degree.torsion for degree in report.degrees)


def test_all_marked_model_of_a_conflicting_system_is_empty():
    report = mu_homology(system_from_pairs(2, [(0, 1)]), fully_marked=True)
    assert all(degree.dim == 0 for degree in report.degrees)


def test_direct_sum_adds_degree_by_degree(dumbbell, bubble):
    first = sector_cohomology(dumbbell, EDGE)
    second = sector_cohomology(bubble, EDGE)
    total = CohomologyReport.direct_sum([first, second])
    assert total.free_ranks()[0] == 2
    assert total.degrees[0].dim == first.degrees[0].dim + second.degrees[0].dim
    assert total.euler == first.euler + second.euler
    assert CohomologyReport.direct_sum([]).degrees == []


def test_total_and_D_agree_on_single_sector_systems(dumbbell):
    cs = edge_conflict_system(dumbbell)
    assert complex_cohomology(cs, TOTAL) == complex_cohomology(cs, D_TOTAL)


def test_vertex_sector_uses_D(vertex_example):
    report = sector_cohomology(vertex_example, VERTEX)
    assert report == complex_cohomology(vertex_conflict_system(vertex_example), D_TOTAL)


@pytest.mark.parametrize(
    "graph, sector",
    [
        (Graph(n_vertices=2, edges=((0, 1), (0, 1)), legs=(0, 1)), MIXED),
        (Graph(n_vertices=3, edges=((0, 1), (1, 2), (0, 2)), legs=(0, 1, 2)), MIXED),
        (Graph(n_vertices=4, edges=((0, 1), (0, 1), (1, 2), (2, 3), (2, 3)), legs=(0, 3)), EDGE),
        (Graph(n_vertices=5, edges=((0, 1), (0, 2), (1, 2), (2, 3), (2, 4))), VERTEX),
    ],
)
@given(data=st.data())
def test_cohomology_is_invariant_under_basis_permutations(graph, sector, data):
    dims, matrices = complex_matrices(sector_system(graph, sector), SECTOR_KIND[sector])
    sizes = list(dims) + [matrices[-1].shape[0]]
    orders = [data.draw(st.permutations(range(size))) for size in sizes]
    # rows of the map leaving degree n are the basis of degree n + 1
    permuted = [
        matrix.to_sparse().permuted(orders[n + 1], orders[n]) for n, matrix in enumerate(matrices)
    ]
    assert cohomology(dims, permuted) == cohomology(dims, matrices)


# --- Modular rank cross-check ---

def test_torsion_at_the_check_prime_is_not_a_rank_mismatch():
    report = cohomology([1, 1], [SparseIntMatrix.from_dense([[RANK_CHECK_PRIME]])])
    assert report.degrees[1].torsion == [RANK_CHECK_PRIME]
    assert report.rank_mismatches == []


def test_wrong_smith_ranks_are_reported():
    identity = SparseIntMatrix.identity(2)
    wrong = SNFResult(invariant_factors=(1,), rank=1)
    assert rank_mismatches([(0, identity, wrong)]) == [
        RankMismatch(degree=0, rank=1, rank_mod_p=2, p=RANK_CHECK_PRIME)
    ]
    assert rank_mismatches([(0, identity, wrong)], p=2)[0].p == 2


@pytest.mark.parametrize("sector", SECTORS)
def test_marking_complexes_pass_the_rank_cross_check(dumbbell, sector):
    assert sector_cohomology(dumbbell, sector).rank_mismatches == []


def test_homology_is_cross_checked_too():
    boundary = SparseIntMatrix.from_dense([[-1, 1], [1, -1]])
    assert homology([2, 2], [None, boundary]).rank_mismatches == []


def test_direct_sum_keeps_rank_mismatches():
    mismatch = RankMismatch(degree=0, rank=1, rank_mod_p=2, p=3)
    total = CohomologyReport.direct_sum([CohomologyReport(rank_mismatches=[mismatch]), CohomologyReport()])
    assert total.rank_mismatches == [mismatch]

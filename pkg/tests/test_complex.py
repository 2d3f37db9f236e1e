import pytest
from hypothesis import given, settings
from scipy import sparse

from app.checks import CYCLE, D, D_TOTAL, DELTA, EDGE, KINDS, S_SECTOR, T_SECTOR, TOTAL, VERTEX
from app.errors import InadmissibleMarkingError, ResourceLimitError, SystemMismatchError, UnknownDifferentialError
from app.services.marking_complex import (
    apply_D,
    apply_d,
    apply_delta,
    apply_differential,
    apply_total,
    basis_size,
    differential_matrix,
    exp_generator,
    exp_series,
    graded_basis,
    injected_fault,
    max_degree,
    one_mark_generator,
    transport,
)
from app.utils.chains import Bigrade, Chain, check_admissible, sector_bigrade
from app.utils.conflict import (
    cycle_conflict_system,
    edge_conflict_system,
    mixed_conflict_system,
    system_from_pairs,
    vertex_conflict_system,
)
from strategies import conflict_systems


def _terms(chain: Chain) -> dict:
    return {m: coeff for m, coeff in chain}


# --- Bases ---

def test_bigrade_basis_of_two_conflicting_elements():
    cs = system_from_pairs(2, [(0, 1)])
    assert graded_basis(cs, Bigrade(i=1, j=0)) == [(0, 1), (1, 0)]
    assert graded_basis(cs, Bigrade(i=1, j=1)) == []


def test_degree_basis_mixes_one_mark_counts():
    cs = system_from_pairs(1, [])
    assert graded_basis(cs, 0) == [(0,), (1,)]
    assert graded_basis(cs, 1) == [(2,)]
    assert graded_basis(cs, 2) == []
    assert graded_basis(cs, -1) == []


def test_basis_bound_is_a_refusal(dumbbell):
    cs = edge_conflict_system(dumbbell)
    with pytest.raises(ResourceLimitError):
        graded_basis(cs, 0, max_basis=3)


@given(conflict_systems())
def test_basis_sizes_match_counts(cs):
    for degree in range(max_degree(cs) + 2):
        basis = graded_basis(cs, degree)
        assert len(basis) == basis_size(cs, degree)
        assert basis == sorted(set(basis))
        for m in basis:
            check_admissible(cs, m)
            assert m.count(2) == degree


def test_inadmissible_marking_is_rejected(dumbbell):
    cs = edge_conflict_system(dumbbell)
    with pytest.raises(InadmissibleMarkingError):
        apply_delta(cs, (1, 1, 0, 0, 0))
    with pytest.raises(InadmissibleMarkingError):
        apply_d(cs, (3, 0, 0, 0, 0))
    with pytest.raises(InadmissibleMarkingError):
        apply_D(cs, (0, 0))


def test_sector_bigrade_of_a_mixed_marking(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    grades = sector_bigrade(cs, (2, 0, 0, 1, 0, 0, 0))
    assert grades[EDGE] == Bigrade(i=1, j=1)
    assert grades[CYCLE] == Bigrade(i=0, j=0)


# --- Differentials on pinned markings ---

def test_delta_on_a_single_one_mark(dumbbell):
    cs = edge_conflict_system(dumbbell)
    assert _terms(apply_delta(cs, (1, 0, 0, 0, 0))) == {(2, 0, 0, 0, 0): -1}


def test_d_skips_blocked_edges(dumbbell):
    cs = edge_conflict_system(dumbbell)
    assert _terms(apply_d(cs, (1, 0, 0, 0, 0))) == {(1, 0, 0, 2, 0): -1, (1, 0, 0, 0, 2): -1}


def test_vertex_differentials(vertex_example):
    cs = vertex_conflict_system(vertex_example)
    m = (0, 0, 0, 1, 0)
    assert _terms(apply_d(cs, m)) == {(2, 0, 0, 1, 0): 1, (0, 2, 0, 1, 0): 1, (0, 0, 0, 1, 2): -1}
    assert _terms(apply_delta(cs, m)) == {(0, 0, 0, 2, 0): -1}


def test_cycle_differentials(dumbbell):
    cs = cycle_conflict_system(dumbbell)
    assert _terms(apply_d(cs, (0, 1))) == {(2, 1): 1}
    assert _terms(apply_delta(cs, (0, 1))) == {(0, 2): -1}


def test_delta_signs_count_later_one_marks():
    cs = system_from_pairs(3, [])
    # two marked elements: global sign +1, the first 1-mark has one later 1-mark
    assert _terms(apply_delta(cs, (1, 0, 1))) == {(2, 0, 1): -1, (1, 0, 2): 1}


def test_D_on_the_unmarked_marking_of_independent_elements():
    cs = system_from_pairs(3, [])
    assert _terms(apply_D(cs, (0, 0, 0))) == {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1}


def test_single_element_matrix():
    cs = system_from_pairs(1, [])
    matrix = differential_matrix(cs, D_TOTAL, 0)
    assert matrix.shape == (1, 2)
    assert matrix.to_sparse().to_dense() == [[1, -1]]
    assert matrix.manifest() == {"rows": ["2"], "cols": ["0", "1"]}
    assert matrix.to_coo() == "0 0 1\n0 1 -1\n"


def test_matrix_rejects_unknown_kind_and_degree():
    cs = system_from_pairs(1, [])
    with pytest.raises(UnknownDifferentialError):
        differential_matrix(cs, "sigma", 0)
    with pytest.raises(ValueError):
        differential_matrix(cs, D_TOTAL, 2)
    with pytest.raises(UnknownDifferentialError):
        apply_differential(cs, "sigma", (0,))


def test_sector_differentials_act_on_their_own_sector(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    zero = (0,) * len(cs)
    s_image = apply_differential(cs, S_SECTOR, zero)
    t_image = apply_differential(cs, T_SECTOR, zero)
    assert all(m[5:] == (0, 0) for m, _ in s_image)
    assert _terms(t_image) == {(0, 0, 0, 0, 0, 2, 0): 1, (0, 0, 0, 0, 0, 0, 2): 1}


def test_sector_signs_only_count_their_own_sector(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    # e0 1-marked, c1 1-marked: T sees only its own mark, so delta's global sign is -1
    m = (1, 0, 0, 0, 0, 0, 1)
    assert _terms(apply_differential(cs, T_SECTOR, m)) == {(1, 0, 0, 0, 0, 0, 2): -1}
    assert _terms(apply_differential(cs, D_TOTAL, m))[(1, 0, 0, 0, 0, 0, 2)] == 1


def test_total_sign_follows_two_mark_count(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    m = (2, 0, 0, 0, 0, 0, 0)
    expected = apply_differential(cs, S_SECTOR, m) - apply_differential(cs, T_SECTOR, m)
    assert apply_total(cs, m) == expected


@settings(deadline=None)
@given(conflict_systems(max_size=6))
def test_differentials_square_to_zero_on_random_systems(cs):
    for n in range(max_degree(cs)):
        first = {kind: differential_matrix(cs, kind, n).to_scipy() for kind in (DELTA, D, D_TOTAL)}
        second = {kind: differential_matrix(cs, kind, n + 1).to_scipy() for kind in (DELTA, D, D_TOTAL)}
        for kind in (DELTA, D, D_TOTAL):
            assert (second[kind] @ first[kind]).count_nonzero() == 0
        anticommutator = second[DELTA] @ first[D] + second[D] @ first[DELTA]
        assert sparse.csr_matrix(anticommutator).count_nonzero() == 0


@pytest.mark.parametrize("kind", KINDS)
def test_chains_and_matrices_agree(dumbbell, kind):
    cs = mixed_conflict_system(dumbbell)
    matrix = differential_matrix(cs, kind, 0)
    for col, m in enumerate(matrix.cols):
        image = _terms(apply_differential(cs, kind, m))
        column = {matrix.rows[r]: value for (r, c), value in matrix.entries.items() if c == col}
        assert image == column


def test_sign_fault_changes_delta(dumbbell):
    cs = edge_conflict_system(dumbbell)
    with injected_fault("delta_global"):
        assert _terms(apply_delta(cs, (1, 0, 0, 0, 0))) == {(2, 0, 0, 0, 0): 1}
    assert _terms(apply_delta(cs, (1, 0, 0, 0, 0))) == {(2, 0, 0, 0, 0): -1}
    with pytest.raises(ValueError):
        with injected_fault("no_such_rule"):
            pass


# --- Transport ---

@pytest.mark.parametrize("build", [edge_conflict_system, cycle_conflict_system])
def test_transport_intertwines_every_degree(dumbbell, build):
    cs = build(dumbbell)
    psi = transport(cs)
    for n in range(max_degree(cs) + 1):
        assert psi.intertwining_witness(DELTA, n) is None
        assert psi.intertwining_witness(D, n) is None
        assert len(psi.basis_map(n)) == len(graded_basis(cs, n))


def test_transported_chain_matches_vertex_side(dumbbell):
    cs = edge_conflict_system(dumbbell)
    psi = transport(cs)
    m = (1, 0, 0, 1, 0)
    assert psi.transported_chain(apply_D(cs, m)) == apply_D(psi.target, psi.apply(m))


def test_transport_rejects_mismatched_systems(dumbbell):
    cs = edge_conflict_system(dumbbell)
    with pytest.raises(SystemMismatchError):
        transport(cs, system_from_pairs(5, []))
    with pytest.raises(SystemMismatchError):
        transport(cs, system_from_pairs(4, cs.conflict_pairs[:1]))


# --- Generators ---

def test_one_mark_generator_on_isolated_elements():
    cs = system_from_pairs(2, [])
    assert _terms(one_mark_generator(cs, (0, 0))) == {(1, 0): 1, (0, 1): 1}


def test_one_mark_generator_skips_blocked_elements(dumbbell):
    cs = edge_conflict_system(dumbbell)
    assert _terms(one_mark_generator(cs, (1, 0, 0, 0, 0))) == {(1, 0, 0, 1, 0): 1, (1, 0, 0, 0, 1): 1}


def test_exp_generator_of_two_conflicting_elements():
    cs = system_from_pairs(2, [(0, 1)])
    assert _terms(exp_generator(cs)) == {(0, 0): 1, (1, 0): 1, (0, 1): 1}


def test_exp_generator_restricted_to_a_sector(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    edges_only = exp_generator(cs, [EDGE])
    assert all(m[5:] == (0, 0) for m, _ in edges_only)
    assert len(edges_only) == len(exp_generator(edge_conflict_system(dumbbell)))


def test_exp_series_matches_independent_set_sum(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    assert exp_series(cs, (CYCLE, EDGE)) == exp_generator(cs)


@given(conflict_systems())
def test_exp_series_matches_independent_set_sum_on_random_systems(cs):
    assert exp_series(cs, (VERTEX,)) == exp_generator(cs)


@given(conflict_systems())
def test_exp_generator_is_a_D_cocycle(cs):
    assert apply_differential(cs, D_TOTAL, exp_generator(cs)).is_zero()


def test_mixed_generator_is_a_total_cocycle(dumbbell):
    cs = mixed_conflict_system(dumbbell)
    assert apply_differential(cs, TOTAL, exp_generator(cs)).is_zero()


# --- Chains ---

def test_chain_arithmetic_drops_zero_terms():
    cs = system_from_pairs(2, [])
    first = Chain.of(cs, [((1, 0), 2), ((0, 1), 1)])
    second = Chain.of(cs, [((1, 0), -2)])
    total = first + second
    assert _terms(total) == {(0, 1): 1}
    assert (first - first).is_zero()
    assert _terms(first.scaled(3)) == {(1, 0): 6, (0, 1): 3}
    assert total.to_record().model_dump() == {"system": cs.key, "terms": [{"marking": "01", "coeff": 1}]}


def test_exact_division_refuses_remainders():
    cs = system_from_pairs(1, [])
    chain = Chain.of(cs, [((1,), 3)])
    with pytest.raises(ArithmeticError):
        chain.divided(2)
    assert _terms(chain.divided(3)) == {(1,): 1}


def test_chains_of_different_systems_do_not_mix():
    first = Chain.of(system_from_pairs(1, []), [((1,), 1)])
    second = Chain.of(system_from_pairs(1, [], name="other"), [((1,), 1)])
    with pytest.raises(SystemMismatchError):
        first + second

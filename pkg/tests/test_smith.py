import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from app.checks import SECTORS
from app.services.cohomology import SECTOR_KIND
from app.services.enumeration import FamilySpec, graph_enumerator
from app.services.marking_complex import complex_matrices
from app.utils.conflict import sector_system
from app.utils.smith import SparseIntMatrix, rank_mod_p, smith_normal_form
from strategies import int_matrices


def _sympy_factors(matrix: SparseIntMatrix):
    factors = invariant_factors(Matrix(matrix.to_dense()), domain=ZZ)
    return tuple(sorted(abs(int(factor)) for factor in factors if factor != 0))


def _unimodular(matrix: SparseIntMatrix) -> bool:
    return Matrix(matrix.to_dense()).det() in (1, -1)


@pytest.mark.parametrize(
    "rows, factors",
    [
        ([[0, 1], [1, 0]], (1, 1)),
        ([[2, 0], [0, 3]], (1, 6)),
        ([[2, 0], [0, 4]], (2, 4)),
        ([[2, 4], [6, 8]], (2, 4)),
        ([[1, 2], [2, 4]], (1,)),
        ([[0, 0], [0, 0]], ()),
        ([[1, -1]], (1,)),
        ([[6, 10, 15]], (1,)),
    ],
)
def test_invariant_factors(rows, factors):
    matrix = SparseIntMatrix.from_dense(rows)
    result = smith_normal_form(matrix, with_transforms=True)
    assert result.invariant_factors == factors
    assert result.rank == len(factors)
    assert result.reproduces(matrix)


def test_torsion_drops_unit_factors():
    result = smith_normal_form(SparseIntMatrix.from_dense([[2, 0], [0, 3]]))
    assert result.torsion == (6,)
    with pytest.raises(ValueError):
        result.reproduces(SparseIntMatrix.identity(2))


def test_empty_shapes():
    for matrix in (SparseIntMatrix(0, 3), SparseIntMatrix(3, 0)):
        result = smith_normal_form(matrix, with_transforms=True)
        assert result.invariant_factors == ()
        assert result.reproduces(matrix)


def test_large_entries_stay_exact():
    big = 2 ** 70
    matrix = SparseIntMatrix.from_dense([[big, 0], [0, big * 3]])
    assert smith_normal_form(matrix).invariant_factors == (big, big * 3)


def test_sparse_matrix_arithmetic():
    a = SparseIntMatrix.from_dense([[1, 2], [0, 1]])
    b = SparseIntMatrix.from_dense([[1, -2], [0, 1]])
    assert a @ b == SparseIntMatrix.identity(2)
    assert (a - a).is_zero()
    assert a.transpose().to_dense() == [[1, 0], [2, 1]]
    assert a.first_nonzero() == (0, 0, 1)
    with pytest.raises(ValueError):
        SparseIntMatrix(1, 1, {(1, 0): 1})
    with pytest.raises(ValueError):
        a @ SparseIntMatrix(3, 1)


@given(int_matrices())
def test_transforms_reproduce_the_diagonal(matrix):
    result = smith_normal_form(matrix, with_transforms=True)
    assert result.reproduces(matrix)
    assert _unimodular(result.left)
    assert _unimodular(result.right)


@given(int_matrices(values=st.integers(min_value=-6, max_value=6)))
def test_factors_match_sympy(matrix):
    result = smith_normal_form(matrix)
    assert result.invariant_factors == _sympy_factors(matrix)
    assert all(b % a == 0 for a, b in zip(result.invariant_factors, result.invariant_factors[1:]))


@given(int_matrices())
def test_rank_mod_p_is_bounded_by_rank(matrix):
    rank = smith_normal_form(matrix).rank
    assert rank_mod_p(matrix, 2) <= rank
    assert rank_mod_p(matrix) == rank


def test_rank_mod_p_examples():
    matrix = SparseIntMatrix.from_dense([[2, 0], [0, 0]])
    assert rank_mod_p(matrix, 2) == 0
    assert rank_mod_p(matrix, 3) == 1
    with pytest.raises(ValueError):
        rank_mod_p(matrix, 4)
    with pytest.raises(ValueError):
        rank_mod_p(matrix, 2 ** 31 + 11)


@pytest.mark.slow
@settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))
@given(int_matrices(max_rows=40, max_cols=40))
def test_transforms_on_large_random_matrices(matrix):
    result = smith_normal_form(matrix, with_transforms=True)
    assert result.reproduces(matrix)
    assert _unimodular(result.left)
    assert _unimodular(result.right)


@pytest.mark.parametrize("sector", SECTORS)
@pytest.mark.parametrize("r, l", [(3, 1), (2, 2)])
def test_rank_mod_p_matches_smith_rank_on_differentials(r, l, sector):
    for graph in graph_enumerator.enumerate_graphs(FamilySpec(r=r, l=l)):
        _, matrices = complex_matrices(sector_system(graph, sector), SECTOR_KIND[sector])
        for matrix in matrices:
            sparse = matrix.to_sparse()
            assert rank_mod_p(sparse) == smith_normal_form(sparse).rank

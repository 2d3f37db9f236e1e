"""
Marking complexes over a conflict system
========================================
Graded bases of admissible markings, the differentials delta (1 -> 2),
d (unmarked and unblocked -> 2), D = delta + d, their sector restrictions
S and T, the total differential S + (-1)^n T of a mixed system, the transport
onto the vertex complex of the conflict graph and the one-mark generators.

Degrees are counted by 2-marks, except for the delta-only boundary used by
mu homology, which is graded by 1-marks.
"""
import itertools
import logging
import math
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from app.checks import CYCLE, D, D_TOTAL, DELTA, EDGE, FAULTS, KINDS, S_SECTOR, T_SECTOR, TOTAL
from app.config import settings
from app.errors import ResourceLimitError, UnknownDifferentialError
from app.utils.chains import Bigrade, Chain, Marking, check_admissible, marking_key, zero_marking
from app.utils.conflict import ConflictSystem, check_same_shape, vertex_system_of
from app.utils.smith import SparseIntMatrix

logger = logging.getLogger(__name__)

Grade = Union[int, Bigrade]

_active_fault: ContextVar[Optional[str]] = ContextVar("sign_fault", default=None)


@contextmanager
def injected_fault(name: Optional[str]) -> Iterator[None]:
    """Flip one named sign rule inside the block (mutation testing)"""
    if name is not None and name not in FAULTS:
        raise ValueError(f"Unknown fault '{name}' (expected one of {', '.join(FAULTS)})")
    token = _active_fault.set(name)
    if name:
        logger.warning(f"⚠️ Sign fault '{name}' injected: {FAULTS[name]}")
    try:
        yield
    finally:
        _active_fault.reset(token)


def active_fault() -> Optional[str]:
    return _active_fault.get()


# --- Graded bases ---

def max_degree(cs: ConflictSystem) -> int:
    """Largest number of simultaneously marked elements"""
    return max(len(subset) for subset in cs.all_independent_sets)


def _split(grade: Grade) -> Tuple[Optional[int], int]:
    if isinstance(grade, Bigrade):
        return grade.i, grade.j
    return None, grade


def basis_size(cs: ConflictSystem, grade: Grade) -> int:
    ones, twos = _split(grade)
    if ones is None:
        return sum(math.comb(len(subset), twos) for subset in cs.all_independent_sets)
    return sum(math.comb(len(subset), twos) for subset in cs.all_independent_sets if len(subset) == ones + twos)


def graded_basis(cs: ConflictSystem, grade: Grade, max_basis: Optional[int] = None) -> List[Marking]:
    """
    All admissible markings of the grade in lexicographic order of their value vectors.

    An int grade selects the 2-mark count over all 1-mark counts; a Bigrade
    fixes both. Negative or unpopulated grades give an empty basis.
    """
    ones, twos = _split(grade)
    if twos < 0 or (ones is not None and ones < 0):
        return []
    bound = max_basis if max_basis is not None else settings.max_basis
    size = basis_size(cs, grade)
    if size > bound:
        raise ResourceLimitError(f"Grade {grade} of {cs!r} has {size} markings, above the basis bound of {bound}")

    basis: List[Marking] = []
    for subset in cs.all_independent_sets:
        if len(subset) < twos or (ones is not None and len(subset) != ones + twos):
            continue
        for doubled in map(frozenset, itertools.combinations(subset, twos)):
            values = [0] * len(cs)
            for index in subset:
                values[index] = 2 if index in doubled else 1
            basis.append(tuple(values))
    basis.sort()
    return basis


def mu_basis(cs: ConflictSystem, ones: int, fully_marked: bool = False) -> List[Marking]:
    """Markings with exactly `ones` 1-marks; with fully_marked every element is marked"""
    if fully_marked:
        twos = len(cs) - ones
        if twos < 0 or cs.conflict_pairs:
            return []
        return graded_basis(cs, Bigrade(i=ones, j=twos)) if ones >= 0 else []
    if ones < 0:
        return []
    basis: List[Marking] = []
    for twos in range(max_degree(cs) - ones + 1):
        basis.extend(graded_basis(cs, Bigrade(i=ones, j=twos)))
    return sorted(basis)


# --- Differentials ---

def _remark(m: Marking, position: int, value: int) -> Marking:
    return m[:position] + (value,) + m[position + 1:]


def _terms(
    cs: ConflictSystem, m: Marking, sector: Optional[str], with_delta: bool, with_d: bool
) -> List[Tuple[Marking, int]]:
    """
    Signed terms of (delta + d) restricted to `sector` (all elements when None).
    Signs count marked elements of the same sector; blocking uses every marked element.
    """
    fault = _active_fault.get()
    acting = cs.members(sector)
    if sector is None or fault == "sector_signs":
        counted = None
    else:
        counted = frozenset(acting)

    def counts(index: int) -> bool:
        return counted is None or index in counted

    marked = [index for index, value in enumerate(m) if value]
    terms: List[Tuple[Marking, int]] = []

    if with_delta:
        global_sign = 1
        if fault != "delta_global" and sum(1 for index in marked if counts(index)) % 2:
            global_sign = -1
        for p in acting:
            if m[p] != 1:
                continue
            later = 0
            if fault != "delta_position":
                later = sum(1 for index in range(p + 1, len(m)) if m[index] == 1 and counts(index))
            terms.append((_remark(m, p, 2), global_sign * (-1) ** later))

    if with_d:
        blocked = set()
        for index in marked:
            blocked |= cs.neighbours[index]
        for p in acting:
            if m[p] != 0 or p in blocked:
                continue
            earlier = 0
            if fault != "d_position":
                earlier = sum(1 for index in marked if index < p and counts(index))
            terms.append((_remark(m, p, 2), (-1) ** earlier))

    return terms


def _total_terms(cs: ConflictSystem, m: Marking) -> List[Tuple[Marking, int]]:
    sign = 1 if _active_fault.get() == "total_sign" else (-1) ** m.count(2)
    terms = _terms(cs, m, EDGE, True, True)
    terms.extend((target, sign * coeff) for target, coeff in _terms(cs, m, CYCLE, True, True))
    return terms


def _kind_terms(cs: ConflictSystem, kind: str, m: Marking) -> List[Tuple[Marking, int]]:
    if kind == DELTA:
        return _terms(cs, m, None, True, False)
    if kind == D:
        return _terms(cs, m, None, False, True)
    if kind == D_TOTAL:
        return _terms(cs, m, None, True, True)
    if kind == S_SECTOR:
        return _terms(cs, m, EDGE, True, True)
    if kind == T_SECTOR:
        return _terms(cs, m, CYCLE, True, True)
    if kind == TOTAL:
        return _total_terms(cs, m)
    raise UnknownDifferentialError(f"Unknown differential kind '{kind}' (expected one of {', '.join(KINDS)})")


def apply_delta(cs: ConflictSystem, m: Marking, sector: Optional[str] = None) -> Chain:
    """Every 1-mark turned into a 2-mark, signed (-1)^|marked| (-1)^#(later 1-marks)"""
    check_admissible(cs, m)
    return Chain.of(cs, _terms(cs, m, sector, True, False))


def apply_d(cs: ConflictSystem, m: Marking, sector: Optional[str] = None) -> Chain:
    """Every unmarked element free of conflicts with marked ones set to 2, signed (-1)^#(earlier marks)"""
    check_admissible(cs, m)
    return Chain.of(cs, _terms(cs, m, sector, False, True))


def apply_D(cs: ConflictSystem, m: Marking, sector: Optional[str] = None) -> Chain:
    check_admissible(cs, m)
    return Chain.of(cs, _terms(cs, m, sector, True, True))


def apply_total(cs: ConflictSystem, m: Marking) -> Chain:
    """S + (-1)^n T with n the 2-mark count of m"""
    check_admissible(cs, m)
    return Chain.of(cs, _total_terms(cs, m))


def apply_differential(cs: ConflictSystem, kind: str, chain: Union[Chain, Marking]) -> Chain:
    """Any differential kind, extended linearly to chains"""
    if not isinstance(chain, Chain):
        check_admissible(cs, chain)
        chain = Chain.of(cs, [(chain, 1)])
    result = Chain(cs)
    for m, coeff in chain:
        for target, sign in _kind_terms(cs, kind, m):
            result.add_term(target, sign * coeff)
    return result


class DifferentialMatrix:
    """A differential between two ordered bases; entries keyed by (row, col)"""

    def __init__(self, kind: str, source_degree: int, rows: Sequence[Marking], cols: Sequence[Marking], entries: Dict[Tuple[int, int], int]):
        self.kind = kind
        self.source_degree = source_degree
        self.rows: Tuple[Marking, ...] = tuple(rows)
        self.cols: Tuple[Marking, ...] = tuple(cols)
        self.entries = {position: value for position, value in entries.items() if value}

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.cols)

    def __repr__(self) -> str:
        return f"DifferentialMatrix(kind='{self.kind}', degree={self.source_degree}, shape={self.shape}, nnz={len(self.entries)})"

    def to_sparse(self) -> SparseIntMatrix:
        return SparseIntMatrix(len(self.rows), len(self.cols), self.entries)

    def to_scipy(self) -> sparse.csr_matrix:
        """Integer CSR copy for matrix identities"""
        if not self.entries:
            return sparse.csr_matrix(self.shape, dtype=np.int64)
        positions = sorted(self.entries)
        data = np.array([self.entries[p] for p in positions], dtype=np.int64)
        rows = np.array([p[0] for p in positions], dtype=np.int64)
        cols = np.array([p[1] for p in positions], dtype=np.int64)
        return sparse.csr_matrix((data, (rows, cols)), shape=self.shape, dtype=np.int64)

    def to_coo(self) -> str:
        """Coordinate list, one 'row col value' line per nonzero entry"""
        return "".join(f"{r} {c} {value}\n" for (r, c), value in sorted(self.entries.items()))

    def manifest(self) -> Dict[str, List[str]]:
        """Row and column bases as marking keys"""
        return {
            "rows": [marking_key(m) for m in self.rows],
            "cols": [marking_key(m) for m in self.cols],
        }


def _assemble(cs: ConflictSystem, kind: str, degree: int, source: List[Marking], target: List[Marking], terms_of) -> DifferentialMatrix:
    row_of = {m: index for index, m in enumerate(target)}
    entries: Dict[Tuple[int, int], int] = {}
    for col, m in enumerate(source):
        for image, sign in terms_of(m):
            position = (row_of[image], col)
            entries[position] = entries.get(position, 0) + sign
    return DifferentialMatrix(kind, degree, target, source, entries)


def differential_matrix(cs: ConflictSystem, kind: str, source_degree: int) -> DifferentialMatrix:
    """
    Matrix of `kind` from the degree-n basis to the degree-(n+1) basis.

    Raises:
        UnknownDifferentialError: kind not in KINDS
        ValueError: source_degree outside 0..max_degree(cs)
    """
    if kind not in KINDS:
        raise UnknownDifferentialError(f"Unknown differential kind '{kind}' (expected one of {', '.join(KINDS)})")
    top = max_degree(cs)
    if not 0 <= source_degree <= top:
        raise ValueError(f"Source degree {source_degree} outside 0..{top}")
    source = graded_basis(cs, source_degree)
    target = graded_basis(cs, source_degree + 1)
    return _assemble(cs, kind, source_degree, source, target, lambda m: _kind_terms(cs, kind, m))


def complex_matrices(cs: ConflictSystem, kind: str) -> Tuple[List[int], List[DifferentialMatrix]]:
    """Basis sizes of degrees 0..top and the matrices leaving each degree"""
    top = max_degree(cs)
    matrices = [differential_matrix(cs, kind, n) for n in range(top + 1)]
    dims = [m.shape[1] for m in matrices]
    logger.debug(f"🔍 {kind} complex of {cs!r}: dims {dims}")
    return dims, matrices


def mu_boundary_matrix(cs: ConflictSystem, ones: int, fully_marked: bool = False) -> DifferentialMatrix:
    """delta as a boundary from k 1-marks to k-1 1-marks"""
    source = mu_basis(cs, ones, fully_marked)
    target = mu_basis(cs, ones - 1, fully_marked)
    return _assemble(cs, DELTA, ones, source, target, lambda m: _terms(cs, m, None, True, False))


# --- Transport onto the vertex complex of the conflict graph ---

class Transport:
    """
    Grade-preserving bijection between the marking bases of a conflict system
    and of the vertex system of its conflict graph (same values, same positions).
    """

    def __init__(self, source: ConflictSystem, target: ConflictSystem):
        check_same_shape(source, target)
        self.source = source
        self.target = target

    def apply(self, m: Marking) -> Marking:
        check_admissible(self.source, m)
        return tuple(m)

    def basis_map(self, degree: int) -> Dict[str, str]:
        return {marking_key(m): marking_key(self.apply(m)) for m in graded_basis(self.source, degree)}

    def transported_chain(self, chain: Chain) -> Chain:
        result = Chain(self.target)
        for m, coeff in chain:
            result.add_term(self.apply(m), coeff)
        return result

    def intertwining_witness(self, kind: str, degree: int) -> Optional[Dict[str, object]]:
        """First source marking where Psi o f != f' o Psi, or None"""
        for m in graded_basis(self.source, degree):
            left = self.transported_chain(Chain.of(self.source, _kind_terms(self.source, kind, m)))
            right = Chain.of(self.target, _kind_terms(self.target, kind, self.apply(m)))
            if left.terms != right.terms:
                return {
                    "kind": kind,
                    "degree": degree,
                    "source": marking_key(m),
                    "transported": left.to_record().model_dump(),
                    "vertex_side": right.to_record().model_dump(),
                }
        return None


def transport(cs: ConflictSystem, vertex_system: Optional[ConflictSystem] = None) -> Transport:
    """Psi from cs to the vertex system of its conflict graph (built when not given)"""
    return Transport(cs, vertex_system if vertex_system is not None else vertex_system_of(cs))


# --- Generators ---

def _free_positions(cs: ConflictSystem, m: Marking, sector: Optional[str]) -> List[int]:
    blocked = set()
    for index, value in enumerate(m):
        if value:
            blocked |= cs.neighbours[index]
    return [p for p in cs.members(sector) if m[p] == 0 and p not in blocked]


def one_mark_generator(cs: ConflictSystem, m: Marking, sector: Optional[str] = None) -> Chain:
    """Sum of m with one more unblocked element of the sector 1-marked, coefficient +1"""
    check_admissible(cs, m)
    return Chain.of(cs, [(_remark(m, p, 1), 1) for p in _free_positions(cs, m, sector)])


def _sector_members(cs: ConflictSystem, sectors: Optional[Iterable[str]]) -> frozenset:
    if sectors is None:
        return frozenset(range(len(cs)))
    members = set()
    for sector in sectors:
        members.update(cs.members(sector))
    return frozenset(members)


def exp_generator(cs: ConflictSystem, sectors: Optional[Sequence[str]] = None) -> Chain:
    """All admissible {0,1}-markings marking only elements of the sectors, coefficient +1"""
    allowed = _sector_members(cs, sectors)
    chain = Chain(cs)
    for subset in cs.all_independent_sets:
        if allowed.issuperset(subset):
            values = [0] * len(cs)
            for index in subset:
                values[index] = 1
            chain.add_term(tuple(values), 1)
    return chain


def exp_series(cs: ConflictSystem, sectors: Sequence[str] = (CYCLE, EDGE)) -> Chain:
    """
    Product of exponentials of one-mark generators applied to the unmarked
    marking, evaluated as sum_k A^k / k!; the rightmost sector acts first.
    """
    chain = Chain.of(cs, [(zero_marking(cs), 1)])
    for sector in reversed(tuple(sectors)):
        total = chain
        power = chain
        k = 0
        while True:
            k += 1
            raised = Chain(cs)
            for m, coeff in power:
                for p in _free_positions(cs, m, sector):
                    raised.add_term(_remark(m, p, 1), coeff)
            if raised.is_zero():
                break
            power = raised.divided(k)
            total = total + power
        chain = total
    return chain

"""
Exact integer linear algebra: sparse integer matrices, Smith normal form
with optional unimodular transforms, and rank modulo a prime.

All arithmetic runs on Python integers, so intermediate growth never
overflows; numpy is only used for the modular rank.
"""
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sympy import isprime

Entries = Dict[Tuple[int, int], int]


class SparseIntMatrix:
    """n_rows x n_cols integer matrix stored as {(row, col): value} without zeros"""
    __slots__ = ("n_rows", "n_cols", "entries")

    def __init__(self, n_rows: int, n_cols: int, entries: Optional[Entries] = None):
        if n_rows < 0 or n_cols < 0:
            raise ValueError(f"Invalid shape ({n_rows}, {n_cols})")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.entries: Entries = {}
        for (r, c), value in (entries or {}).items():
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise ValueError(f"Entry ({r}, {c}) outside a {n_rows}x{n_cols} matrix")
            if value:
                self.entries[(r, c)] = int(value)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], n_cols: Optional[int] = None) -> "SparseIntMatrix":
        width = n_cols if n_cols is not None else (len(rows[0]) if rows else 0)
        entries = {(r, c): value for r, row in enumerate(rows) for c, value in enumerate(row) if value}
        return cls(len(rows), width, entries)

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls(n, n, {(k, k): 1 for k in range(n)})

    @classmethod
    def diagonal(cls, n_rows: int, n_cols: int, values: Iterable[int]) -> "SparseIntMatrix":
        return cls(n_rows, n_cols, {(k, k): value for k, value in enumerate(values)})

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    def to_dense(self) -> List[List[int]]:
        dense = [[0] * self.n_cols for _ in range(self.n_rows)]
        for (r, c), value in self.entries.items():
            dense[r][c] = value
        return dense

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.n_cols, self.n_rows, {(c, r): v for (r, c), v in self.entries.items()})

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "SparseIntMatrix":
        """Row k of the result is row row_order[k] of self; likewise for columns"""
        new_row = {old: new for new, old in enumerate(row_order)}
        new_col = {old: new for new, old in enumerate(col_order)}
        return SparseIntMatrix(
            self.n_rows, self.n_cols, {(new_row[r], new_col[c]): v for (r, c), v in self.entries.items()}
        )

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        by_row: Dict[int, List[Tuple[int, int]]] = {}
        for (r, c), value in other.entries.items():
            by_row.setdefault(r, []).append((c, value))
        product: Entries = {}
        for (r, k), value in self.entries.items():
            for c, other_value in by_row.get(k, ()):
                product[(r, c)] = product.get((r, c), 0) + value * other_value
        return SparseIntMatrix(self.n_rows, other.n_cols, product)

    def __add__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.shape != other.shape:
            raise ValueError(f"Cannot add {self.shape} and {other.shape}")
        total = dict(self.entries)
        for position, value in other.entries.items():
            total[position] = total.get(position, 0) + value
        return SparseIntMatrix(self.n_rows, self.n_cols, total)

    def __neg__(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.n_rows, self.n_cols, {p: -v for p, v in self.entries.items()})

    def __sub__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def is_zero(self) -> bool:
        return not self.entries

    def first_nonzero(self) -> Optional[Tuple[int, int, int]]:
        if not self.entries:
            return None
        r, c = min(self.entries)
        return r, c, self.entries[(r, c)]

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.n_rows}x{self.n_cols}, nnz={len(self.entries)})"


class SNFResult(BaseModel):
    """Invariant factors d_1 | d_2 | ... | d_k and, on request, U and V with U M V = diag"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    invariant_factors: Tuple[int, ...] = Field(default=(), description="Positive, each dividing the next")
    rank: int = Field(default=0, ge=0)
    left: Optional[SparseIntMatrix] = Field(default=None, description="U, n_rows x n_rows")
    right: Optional[SparseIntMatrix] = Field(default=None, description="V, n_cols x n_cols")

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(factor for factor in self.invariant_factors if factor > 1)

    def reproduces(self, matrix: SparseIntMatrix) -> bool:
        """U M V equals the diagonal of invariant factors"""
        if self.left is None or self.right is None:
            raise ValueError("Result was computed without transforms")
        target = SparseIntMatrix.diagonal(matrix.n_rows, matrix.n_cols, self.invariant_factors)
        return self.left @ matrix @ self.right == target


class _Workspace:
    """Row and column views of a matrix under elimination, with optional U and V"""

    def __init__(self, matrix: SparseIntMatrix, with_transforms: bool):
        self.rows: Dict[int, Dict[int, int]] = {}
        self.cols: Dict[int, set] = {}
        for (r, c), value in matrix.entries.items():
            self.rows.setdefault(r, {})[c] = value
            self.cols.setdefault(c, set()).add(r)
        self.with_transforms = with_transforms
        # U by rows, V by columns
        self.left: List[Dict[int, int]] = [{k: 1} for k in range(matrix.n_rows)] if with_transforms else []
        self.right: List[Dict[int, int]] = [{k: 1} for k in range(matrix.n_cols)] if with_transforms else []

    def _set(self, r: int, c: int, value: int) -> None:
        if value:
            self.rows.setdefault(r, {})[c] = value
            self.cols.setdefault(c, set()).add(r)
        else:
            row = self.rows.get(r)
            if row is not None and c in row:
                del row[c]
                if not row:
                    del self.rows[r]
            column = self.cols.get(c)
            if column is not None:
                column.discard(r)
                if not column:
                    del self.cols[c]

    @staticmethod
    def _combine(vectors: List[Dict[int, int]], target: int, source: int, factor: int) -> None:
        """vectors[target] -= factor * vectors[source]"""
        into = vectors[target]
        for k, value in vectors[source].items():
            updated = into.get(k, 0) - factor * value
            if updated:
                into[k] = updated
            else:
                into.pop(k, None)

    def subtract_row(self, target: int, source: int, factor: int) -> None:
        if not factor:
            return
        for c, value in list(self.rows.get(source, {}).items()):
            self._set(target, c, self.rows.get(target, {}).get(c, 0) - factor * value)
        if self.with_transforms:
            self._combine(self.left, target, source, factor)

    def subtract_col(self, target: int, source: int, factor: int) -> None:
        if not factor:
            return
        for r in list(self.cols.get(source, ())):
            value = self.rows[r][source]
            self._set(r, target, self.rows.get(r, {}).get(target, 0) - factor * value)
        if self.with_transforms:
            self._combine(self.right, target, source, factor)

    def pivot(self, done_rows: set) -> Optional[Tuple[int, int]]:
        """Smallest magnitude entry among active rows; ties by fill-in estimate then position"""
        best = None
        best_key = None
        for r, row in self.rows.items():
            if r in done_rows:
                continue
            for c, value in row.items():
                key = (abs(value), (len(row) - 1) * (len(self.cols[c]) - 1), r, c)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (r, c)
        return best


def _eliminate(ws: _Workspace) -> List[Tuple[int, int, int]]:
    """Reduce to one nonzero per pivot row and column; returns (row, col, value) per pivot"""
    pivots: List[Tuple[int, int, int]] = []
    done_rows: set = set()
    while True:
        choice = ws.pivot(done_rows)
        if choice is None:
            return pivots
        r, c = choice
        while True:
            p = ws.rows[r][c]
            for other in sorted(ws.cols.get(c, set()) - {r}):
                ws.subtract_row(other, r, ws.rows[other][c] // p)
            for other in sorted(set(ws.rows.get(r, {})) - {c}):
                ws.subtract_col(other, c, ws.rows[r][other] // p)
            rest_col = ws.cols.get(c, set()) - {r}
            rest_row = set(ws.rows.get(r, {})) - {c}
            if not rest_col and not rest_row:
                break
            # a nonzero remainder is smaller than the pivot: move the pivot there
            if rest_col:
                r = min(rest_col, key=lambda row: (abs(ws.rows[row][c]), row))
            else:
                c = min(rest_row, key=lambda col: (abs(ws.rows[r][col]), col))
        pivots.append((r, c, ws.rows[r][c]))
        done_rows.add(r)


def _fix_divisibility(ws: _Workspace, pivots: List[Tuple[int, int, int]]) -> List[Tuple[int, int, int]]:
    """
    Replace diagonal pairs (a, b) with a not dividing b by (gcd, lcm) using
    unimodular operations, then make every factor positive.
    """
    pivots = [list(p) for p in pivots]
    for i in range(len(pivots)):
        for j in range(i + 1, len(pivots)):
            ri, ci, a = pivots[i]
            rj, cj, b = pivots[j]
            if b % a == 0:
                continue
            g, x, y = _extended_gcd(a, b)
            if ws.with_transforms:
                # row_i += row_j
                ws._combine(ws.left, ri, rj, -1)
                # [col_i, col_j] <- [x col_i + y col_j, -(b/g) col_i + (a/g) col_j]
                old_i, old_j = dict(ws.right[ci]), dict(ws.right[cj])
                ws.right[ci] = _linear(old_i, x, old_j, y)
                ws.right[cj] = _linear(old_i, -(b // g), old_j, a // g)
                # row_j -= (y b / g) row_i
                ws._combine(ws.left, rj, ri, y * b // g)
            pivots[i][2] = g
            pivots[j][2] = a * b // g
    for entry in pivots:
        if entry[2] < 0:
            entry[2] = -entry[2]
            if ws.with_transforms:
                ws.left[entry[0]] = {k: -v for k, v in ws.left[entry[0]].items()}
    return [tuple(p) for p in pivots]


def _extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """g = gcd(a, b) > 0 with x a + y b = g"""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _linear(u: Dict[int, int], a: int, v: Dict[int, int], b: int) -> Dict[int, int]:
    result: Dict[int, int] = {}
    for k, value in u.items():
        result[k] = result.get(k, 0) + a * value
    for k, value in v.items():
        result[k] = result.get(k, 0) + b * value
    return {k: value for k, value in result.items() if value}


def smith_normal_form(matrix: SparseIntMatrix, with_transforms: bool = False) -> SNFResult:
    """
    Invariant factors of an integer matrix by unimodular row and column
    operations with smallest-magnitude pivoting.

    With with_transforms, the returned U and V satisfy U M V = diag(factors)
    with the factors in the leading diagonal positions.
    """
    ws = _Workspace(matrix, with_transforms)
    pivots = _fix_divisibility(ws, _eliminate(ws))
    factors = tuple(value for _, _, value in pivots)
    if not with_transforms:
        return SNFResult(invariant_factors=factors, rank=len(factors))

    pivot_rows = [r for r, _, _ in pivots]
    pivot_row_set = set(pivot_rows)
    pivot_cols = [c for _, c, _ in pivots]
    pivot_col_set = set(pivot_cols)
    row_order = pivot_rows + [r for r in range(matrix.n_rows) if r not in pivot_row_set]
    col_order = pivot_cols + [c for c in range(matrix.n_cols) if c not in pivot_col_set]
    left = SparseIntMatrix(
        matrix.n_rows, matrix.n_rows,
        {(k, c): v for k, r in enumerate(row_order) for c, v in ws.left[r].items()},
    )
    right = SparseIntMatrix(
        matrix.n_cols, matrix.n_cols,
        {(r, k): v for k, c in enumerate(col_order) for r, v in ws.right[c].items()},
    )
    return SNFResult(invariant_factors=factors, rank=len(factors), left=left, right=right)


def rank_mod_p(matrix: SparseIntMatrix, p: int = 32003) -> int:
    """
    Rank over the field with p elements by dense elimination in int64.

    Raises:
        ValueError: p is not prime or too large for exact int64 products
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p >= 2 ** 31:
        raise ValueError(f"Prime {p} is too large for int64 elimination")
    if not matrix.entries:
        return 0
    dense = np.zeros(matrix.shape, dtype=np.int64)
    for (r, c), value in matrix.entries.items():
        dense[r, c] = value % p

    rank = 0
    n_rows, n_cols = matrix.shape
    for c in range(n_cols):
        if rank == n_rows:
            break
        candidates = np.nonzero(dense[rank:, c])[0]
        if candidates.size == 0:
            continue
        pivot_row = rank + int(candidates[0])
        if pivot_row != rank:
            dense[[rank, pivot_row]] = dense[[pivot_row, rank]]
        inverse = pow(int(dense[rank, c]), -1, p)
        dense[rank] = (dense[rank] * inverse) % p
        below = np.nonzero(dense[rank + 1:, c])[0] + rank + 1
        if below.size:
            factors = dense[below, c].reshape(-1, 1)
            dense[below] = (dense[below] - factors * dense[rank]) % p
        rank += 1
    return rank

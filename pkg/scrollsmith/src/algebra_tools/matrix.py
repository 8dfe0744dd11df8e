"""Dense exact matrices over GF(p) or QQ."""
from itertools import combinations
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from scrollsmith.src.algebra_tools.fields import FieldLike, ScalarField, as_field
from scrollsmith.src.errors import ContextMismatchError

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

Vector = Tuple[Any, ...]


def _gauss_jordan_mod_p(
    rows: Sequence[Sequence[int]], ncols: int, p: int
) -> Tuple[np.ndarray, List[int]]:
    """
    Gauss-Jordan elimination over GF(p) on integer rows.

    Returns the reduced row echelon form and the pivot columns.
    """
    dtype = np.int64 if p < 2**31 else object
    m = np.array([list(r) for r in rows], dtype=dtype).reshape(len(rows), ncols) % p
    n_rows = m.shape[0]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= n_rows:
            break
        below = np.nonzero(m[r:, c])[0]
        if below.size == 0:
            continue
        pivot = r + int(below[0])
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        hits = np.nonzero(col)[0]
        if hits.size:
            m[hits] = (m[hits] - np.outer(col[hits], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def _rref_generic(rows: Sequence[Sequence[Any]], ncols: int) -> Tuple[List[List[Any]], List[int]]:
    """Gauss-Jordan with field elements supporting + - * / (used for QQ)."""
    m = [list(r) for r in rows]
    n_rows = len(m)
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def _bareiss_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    """Fraction-free elimination on an integer matrix; every division is exact."""
    m = [list(r) for r in rows]
    n_rows = len(m)
    rank = 0
    prev = 1
    for c in range(ncols):
        if rank == n_rows:
            break
        pivot = next((i for i in range(rank, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        lead = m[rank][c]
        for i in range(rank + 1, n_rows):
            below = m[i][c]
            row = m[i]
            for j in range(c + 1, ncols):
                row[j] = (lead * row[j] - below * m[rank][j]) // prev
            row[c] = 0
        prev = lead
        rank += 1
    return rank


def _bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def laplace_determinant(entries: Sequence[Sequence[Any]]) -> Any:
    """Cofactor expansion for small matrices over any commutative ring (e.g. K[s])."""
    n = len(entries)
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    total = None
    for j in range(n):
        if not entries[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in entries[1:]]
        term = entries[0][j] * laplace_determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return entries[0][0] * 0
    return total


class ExactMatrix:
    """
    Immutable dense matrix whose entries share one ScalarField.

    Rank over GF(p) uses Gaussian elimination on machine integers; over QQ the
    rows are cleared to integers and reduced fraction-free.
    """

    __slots__ = ("field", "rows", "cols", "_entries")

    def __init__(
        self,
        field: FieldLike,
        entries: Sequence[Sequence[Any]],
        cols: Optional[int] = None,
    ):
        self.field = as_field(field)
        data = tuple(tuple(self.field(x) for x in row) for row in entries)
        self.rows = len(data)
        self.cols = (len(data[0]) if data else 0) if cols is None else cols
        for row in data:
            if len(row) != self.cols:
                raise ValueError(f"ragged matrix: expected {self.cols} columns")
        self._entries = data

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, field: FieldLike, rows: int, cols: int) -> "ExactMatrix":
        return cls(field, [[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, field: FieldLike, n: int) -> "ExactMatrix":
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(
        cls, field: FieldLike, columns: Sequence[Sequence[Any]]
    ) -> "ExactMatrix":
        if not columns:
            raise ValueError("at least one column is required")
        return cls(field, [list(row) for row in zip(*columns)], cols=len(columns))

    @classmethod
    def random(
        cls,
        field: FieldLike,
        rows: int,
        cols: int,
        rng: np.random.Generator,
        bound: Optional[int] = None,
    ) -> "ExactMatrix":
        field = as_field(field)
        return cls(
            field,
            [[field.random_element(rng, bound) for _ in range(cols)] for _ in range(rows)],
            cols=cols,
        )

    @staticmethod
    def vstack(blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        first = blocks[0]
        for block in blocks[1:]:
            first.field.require_same(block.field)
            if block.cols != first.cols:
                raise ValueError("column counts differ")
        rows = [row for block in blocks for row in block.entries]
        return ExactMatrix(first.field, rows, cols=first.cols)

    # access -------------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> Tuple[Tuple[Any, ...], ...]:
        return self._entries

    def __getitem__(self, index: Tuple[int, int]) -> Any:
        i, j = index
        return self._entries[i][j]

    def row(self, i: int) -> Vector:
        return self._entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._entries)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and self._entries == other._entries
        )

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.to_strings_key()))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.field}, {self.rows}x{self.cols})"

    def to_strings(self) -> List[List[str]]:
        return [[self.field.format(x) for x in row] for row in self._entries]

    def to_strings_key(self) -> Tuple[Tuple[str, ...], ...]:
        return tuple(tuple(row) for row in self.to_strings())

    def to_ints(self) -> List[List[int]]:
        """Canonical integer representatives (GF(p) only)."""
        if not self.field.is_prime_field:
            raise ContextMismatchError("to_ints needs a prime field")
        return [[self.field.to_int(x) for x in row] for row in self._entries]

    def _integer_rows(self) -> List[List[int]]:
        """Rows scaled by their denominators' lcm (QQ only); preserves rank."""
        out = []
        for row in self._entries:
            lcm = 1
            for x in row:
                den = self.field.denom(x)
                lcm = math.lcm(lcm, den)
            out.append([self.field.numer(x) * (lcm // self.field.denom(x)) for x in row])
        return out

    # structure ----------------------------------------------------------
    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, [list(col) for col in zip(*self._entries)], cols=self.rows) \
            if self.rows else ExactMatrix(self.field, [[] for _ in range(self.cols)], cols=0)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(
            self.field, [[self._entries[i][j] for j in cols] for i in rows], cols=len(cols)
        )

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "ExactMatrix":
        return self.submatrix(list(row_perm), list(col_perm))

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self.field.require_same(other.field)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = self.field.zero
        other_cols = other.columns()
        result = []
        for row in self._entries:
            out_row = []
            for col in other_cols:
                acc = zero
                for a, b in zip(row, col):
                    if a and b:
                        acc += a * b
                out_row.append(acc)
            result.append(out_row)
        return ExactMatrix(self.field, result, cols=other.cols)

    def apply(self, vector: Sequence[Any]) -> Vector:
        """M·w for a column vector w."""
        if len(vector) != self.cols:
            raise ValueError("vector length does not match column count")
        w = [self.field(x) for x in vector]
        zero = self.field.zero
        return tuple(sum((a * b for a, b in zip(row, w) if a and b), zero) for row in self._entries)

    def left_apply(self, vector: Sequence[Any]) -> Vector:
        """w·M for a row vector w."""
        return self.transpose().apply(vector)

    def reduce_mod(self, p: int) -> "ExactMatrix":
        """Reduce a rational matrix into GF(p)."""
        target = ScalarField.prime(p)
        if self.field == target:
            return self
        return ExactMatrix(
            target,
            [[self.field.reduce(x, target) for x in row] for row in self._entries],
            cols=self.cols,
        )

    def scale_columns_to_integers(self) -> "ExactMatrix":
        """Multiply each column of a rational matrix by the lcm of its denominators."""
        if self.field.is_prime_field:
            return self
        scaled = []
        for col in self.columns():
            lcm = 1
            for x in col:
                den = self.field.denom(x)
                lcm = math.lcm(lcm, den)
            scaled.append([x * lcm for x in col])
        return ExactMatrix.from_columns(self.field, scaled)

    # linear algebra -----------------------------------------------------
    def rref(self) -> Tuple["ExactMatrix", List[int]]:
        if self.field.is_prime_field:
            m, pivots = _gauss_jordan_mod_p(self.to_ints(), self.cols, self.field.modulus)
            return ExactMatrix(self.field, [[int(x) for x in row] for row in m], cols=self.cols), pivots
        m, pivots = _rref_generic(self._entries, self.cols)
        return ExactMatrix(self.field, m, cols=self.cols), pivots

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        if self.field.is_prime_field:
            return len(_gauss_jordan_mod_p(self.to_ints(), self.cols, self.field.modulus)[1])
        return _bareiss_rank(self._integer_rows(), self.cols)

    def kernel_basis(self) -> List[Vector]:
        """Basis of {w : M·w = 0}; its size is cols - rank."""
        if self.rows == 0:
            return [
                tuple(self.field.one if i == j else self.field.zero for i in range(self.cols))
                for j in range(self.cols)
            ]
        reduced, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in set(pivots)]
        basis = []
        for f in free:
            vec = [self.field.zero] * self.cols
            vec[f] = self.field.one
            for i, pc in enumerate(pivots):
                vec[pc] = -reduced[i, f]
            basis.append(tuple(vec))
        return basis

    def left_kernel_basis(self) -> List[Vector]:
        """Basis of {c : c·M = 0}."""
        return self.transpose().kernel_basis() if self.cols else [
            tuple(self.field.one if i == j else self.field.zero for i in range(self.rows))
            for j in range(self.rows)
        ]

    def determinant(self) -> Any:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if self.rows == 0:
            return self.field.one
        if self.field.is_prime_field:
            p = self.field.modulus
            m = [list(r) for r in self.to_ints()]
            n = self.rows
            det = 1
            for k in range(n):
                pivot = next((i for i in range(k, n) if m[i][k] % p), None)
                if pivot is None:
                    return self.field.zero
                if pivot != k:
                    m[k], m[pivot] = m[pivot], m[k]
                    det = -det
                det = det * m[k][k] % p
                inv = pow(m[k][k], -1, p)
                for i in range(k + 1, n):
                    factor = m[i][k] * inv % p
                    if factor:
                        m[i] = [(a - factor * b) % p for a, b in zip(m[i], m[k])]
            return self.field(det)
        scale = 1
        for row in self._entries:
            lcm = 1
            for x in row:
                den = self.field.denom(x)
                lcm = math.lcm(lcm, den)
            scale *= lcm
        return self.field.from_ratio(_bareiss_det(self._integer_rows()), scale)

    def minors(self, k: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...], Any]]:
        """All k x k minors as (row indices, column indices, value)."""
        for rows in combinations(range(self.rows), k):
            for cols in combinations(range(self.cols), k):
                yield rows, cols, self.submatrix(rows, cols).determinant()

    # serialization ------------------------------------------------------
    def to_json(self) -> Dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "modulus": self.field.modulus,
            "entries": self.to_strings(),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "ExactMatrix":
        try:
            field = ScalarField(modulus=data.get("modulus"))
            matrix = cls(field, data["entries"], cols=int(data["cols"]))
        except KeyError as e:
            logger.error(f"Matrix JSON is missing {e}")
            raise ValueError(f"matrix JSON is missing {e}") from e
        if matrix.rows != int(data["rows"]):
            raise ValueError("row count does not match the entries")
        return matrix

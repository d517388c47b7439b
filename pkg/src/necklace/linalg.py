"""Exact rational linear algebra: sparse matrices, echelon forms, kernels and
truncated matrix power series.

Scalars are ``fractions.Fraction`` (or plain ``int`` where the value is
integral, which keeps the hot loops fast).  Nothing here ever touches a float.
"""
from __future__ import annotations

import heapq
import json
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .errors import SingularConstantTerm

Rational = Fraction
Scalar = Union[int, Fraction]


def rat(x) -> Scalar:
    """Coerce ``x`` (int, Fraction or "p/q" string) to an exact scalar."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return simplify(x)
    if isinstance(x, str):
        return simplify(Fraction(x.strip()))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def simplify(x: Scalar) -> Scalar:
    """Demote integral Fractions to int (cheap arithmetic afterwards)."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def div(a: Scalar, b: Scalar) -> Scalar:
    if type(a) is int and type(b) is int:
        if a % b == 0:
            return a // b
        return Fraction(a, b)
    return simplify(Fraction(a) / b)


def format_rational(x: Scalar) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Scalar:
    return rat(s)


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Immutable sparse rational matrix keyed by (row, col)."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[Tuple[int, int], Scalar] = ()):
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        clean = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (i, j), v in items:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
            v = rat(v)
            if v:
                clean[(i, j)] = v
        self.rows = rows
        self.cols = cols
        self._entries = clean

    @property
    def entries(self) -> Dict[Tuple[int, int], Scalar]:
        return dict(self._entries)

    @classmethod
    def from_rows(cls, data: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                v = rat(v)
                if v:
                    ent[(i, j)] = v
        return cls(rows, cols, ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        return self._entries.get(key, 0)

    def to_rows(self) -> List[List[Scalar]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> List[Dict[int, Scalar]]:
        out: List[Dict[int, Scalar]] = [dict() for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self._entries.items()})

    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._entries) == (other.rows, other.cols, other._entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._same_shape(other)
        ent = dict(self._entries)
        for k, v in other._entries.items():
            ent[k] = ent.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, ent)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c: Scalar) -> "SparseMatrix":
        c = rat(c)
        return SparseMatrix(self.rows, self.cols, {k: c * v for k, v in self._entries.items()})

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
            right = other.row_dicts()
            ent: Dict[Tuple[int, int], Scalar] = {}
            for (i, k), v in self._entries.items():
                for j, w in right[k].items():
                    ent[(i, j)] = ent.get((i, j), 0) + v * w
            return SparseMatrix(self.rows, other.cols, ent)
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out: List[Scalar] = [0] * self.rows
        for (i, j), v in self._entries.items():
            out[i] += v * vec[j]
        return [simplify(x) for x in out]

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self._entries)})"

    # JSON: array of row arrays of rational strings
    def to_json(self) -> str:
        return json.dumps([[format_rational(v) for v in row] for row in self.to_rows()])

    @classmethod
    def from_json(cls, text: str) -> "SparseMatrix":
        data = json.loads(text)
        return cls.from_rows([[rat(str(v)) for v in row] for row in data])


# ---------------------------------------------------------------------------
# row reduction


def rref(m: SparseMatrix) -> Tuple[SparseMatrix, List[int], int]:
    """Reduced row echelon form.

    Pivoting: scan columns left to right, take the first (topmost) remaining
    row with a nonzero entry.  Returns (echelon, pivot columns, rank); the
    echelon matrix has the same shape as ``m`` with zero rows at the bottom.
    """
    rows = [r for r in m.row_dicts()]
    pending = list(range(len(rows)))
    pivots: List[int] = []
    done: List[Dict[int, Scalar]] = []
    for col in range(m.cols):
        pick = None
        for idx in pending:
            if rows[idx].get(col):
                pick = idx
                break
        if pick is None:
            continue
        pending.remove(pick)
        prow = rows[pick]
        inv = prow[col]
        if inv != 1:
            prow = {k: div(v, inv) for k, v in prow.items()}
        for other in pending:
            _eliminate(rows[other], prow, col)
        for other in done:
            _eliminate(other, prow, col)
        done.append(prow)
        pivots.append(col)
    ent = {}
    for i, row in enumerate(done):
        for j, v in row.items():
            ent[(i, j)] = v
    return SparseMatrix(m.rows, m.cols, ent), pivots, len(pivots)


def _eliminate(target: Dict[int, Scalar], prow: Dict[int, Scalar], col: int) -> None:
    f = target.get(col)
    if not f:
        return
    for k, v in prow.items():
        nv = target.get(k, 0) - f * v
        if nv:
            target[k] = simplify(nv)
        else:
            target.pop(k, None)


def rank(m: SparseMatrix) -> int:
    ech = Echelon()
    for row in m.row_dicts():
        ech.add(row)
    return ech.rank


def kernel_basis(m: SparseMatrix) -> List[List[Scalar]]:
    """Basis of the right null space, one vector per free column."""
    ech, pivots, r = rref(m)
    rows = ech.row_dicts()[:r]
    pivset = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v: List[Scalar] = [0] * m.cols
        v[f] = 1
        for i, pc in enumerate(pivots):
            x = rows[i].get(f)
            if x:
                v[pc] = -x
        basis.append(v)
    return basis


def inverse(m: SparseMatrix) -> SparseMatrix:
    if m.rows != m.cols:
        raise SingularConstantTerm("non-square matrix has no inverse")
    n = m.rows
    aug = SparseMatrix(n, 2 * n, {**m.entries, **{(i, n + i): 1 for i in range(n)}})
    ech, pivots, _ = rref(aug)
    if n and (len(pivots) < n or pivots[n - 1] != n - 1):
        raise SingularConstantTerm("matrix is singular")
    ent = {(i, j - n): v for (i, j), v in ech.entries.items() if j >= n}
    return SparseMatrix(n, n, ent)


class Echelon:
    """Incremental sparse semi-echelon basis over integer-indexed columns.

    The pivot of a stored row is its smallest column index and carries
    coefficient 1.  Rows are only top-reduced when inserted, which keeps them
    sparse; ``reduce`` performs full reduction so that the result has no entry
    in any pivot column (a canonical normal form modulo the row space).
    """

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: Dict[int, Dict[int, Scalar]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def _run(self, vec: Mapping[int, Scalar], full: bool) -> Dict[int, Scalar]:
        v = {k: x for k, x in vec.items() if x}
        heap = list(v)
        heapq.heapify(heap)
        rows = self.rows
        while heap:
            c = heapq.heappop(heap)
            f = v.get(c)
            if not f:
                continue
            row = rows.get(c)
            if row is None:
                if full:
                    continue
                break
            for k, x in row.items():
                old = v.get(k)
                if old is None:
                    v[k] = -f * x
                    heapq.heappush(heap, k)
                else:
                    nv = old - f * x
                    if nv:
                        v[k] = nv
                    else:
                        del v[k]
        return v

    def reduce(self, vec: Mapping[int, Scalar]) -> Dict[int, Scalar]:
        return {k: simplify(x) for k, x in self._run(vec, True).items()}

    def contains(self, vec: Mapping[int, Scalar]) -> bool:
        return not self._run(vec, True)

    def add(self, vec: Mapping[int, Scalar]) -> bool:
        """Insert ``vec``; return True iff it was independent of the stored rows."""
        v = self._run(vec, False)
        if not v:
            return False
        lead = min(v)
        f = v[lead]
        if f == 1:
            row = {k: simplify(x) for k, x in v.items()}
        elif f == -1:
            row = {k: simplify(-x) for k, x in v.items()}
        else:
            row = {k: div(x, f) for k, x in v.items()}
        self.rows[lead] = row
        return True

    def add_pivot_row(self, row: Dict[int, Scalar]) -> None:
        """Insert a row already known to have a fresh, normalized pivot."""
        lead = min(row)
        assert lead not in self.rows and row[lead] == 1
        self.rows[lead] = row


def rank_of_vectors(vectors: Iterable[Mapping[int, Scalar]]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


# ---------------------------------------------------------------------------
# truncated matrix power series


class MatrixSeries:
    """Truncated series sum_k A_k t^k with n x n exact coefficients, k <= N."""

    __slots__ = ("size", "coefficients", "truncation")

    def __init__(self, size: int, coefficients: Sequence[SparseMatrix], truncation: int | None = None):
        coeffs = list(coefficients)
        if truncation is None:
            truncation = len(coeffs) - 1
        if truncation < 0:
            raise ValueError("truncation must be >= 0")
        coeffs = coeffs[: truncation + 1]
        while len(coeffs) < truncation + 1:
            coeffs.append(SparseMatrix.zero(size, size))
        for c in coeffs:
            if (c.rows, c.cols) != (size, size):
                raise ValueError("coefficient shape mismatch")
        self.size = size
        self.coefficients = tuple(coeffs)
        self.truncation = truncation

    @classmethod
    def identity(cls, size: int, truncation: int) -> "MatrixSeries":
        return cls(size, [SparseMatrix.identity(size)], truncation)

    @classmethod
    def scalar(cls, coeffs: Sequence[Scalar], truncation: int | None = None) -> "MatrixSeries":
        return cls(1, [SparseMatrix(1, 1, {(0, 0): c}) for c in coeffs], truncation)

    def __getitem__(self, k: int) -> SparseMatrix:
        return self.coefficients[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return (self.size, self.truncation, self.coefficients) == (other.size, other.truncation, other.coefficients)

    def __mul__(self, other: "MatrixSeries") -> "MatrixSeries":
        if self.size != other.size:
            raise ValueError("size mismatch")
        n = min(self.truncation, other.truncation)
        out = []
        for k in range(n + 1):
            acc = SparseMatrix.zero(self.size, self.size)
            for j in range(k + 1):
                a, b = self.coefficients[j], other.coefficients[k - j]
                if a.nnz() and b.nnz():
                    acc = acc + (a @ b)
            out.append(acc)
        return MatrixSeries(self.size, out, n)

    def __repr__(self):
        return f"MatrixSeries(size={self.size}, N={self.truncation})"


def series_inverse(a: MatrixSeries) -> MatrixSeries:
    """b with a*b = I + O(t^{N+1}), by the recursion b_k = -a_0^{-1} sum_{j>=1} a_j b_{k-j}."""
    try:
        b0 = inverse(a.coefficients[0])
    except SingularConstantTerm:
        raise SingularConstantTerm("constant term of the series is not invertible") from None
    n = a.size
    bs = [b0]
    for k in range(1, a.truncation + 1):
        acc = SparseMatrix.zero(n, n)
        for j in range(1, k + 1):
            aj = a.coefficients[j]
            if aj.nnz():
                acc = acc + (aj @ bs[k - j])
        bs.append(-(b0 @ acc))
    return MatrixSeries(n, bs, a.truncation)

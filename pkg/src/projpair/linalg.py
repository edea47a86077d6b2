"""Dense matrices and subspaces over exact rationals or binary64 floats.

The rational backend is the oracle of the whole package: rank, kernels,
solving and determinants run fraction-free (Bareiss) on integer-scaled
rows, so results are exact with controlled coefficient growth.  The float
backend mirrors the same API through SVD thresholding and least squares,
with every cutoff taken from an explicit :class:`TolerancePolicy`.

Subspaces are value objects identified by a canonical reduced
column-echelon basis, which makes equality decidable over the rationals
and tolerance-based over floats.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    NegativePower,
    NotInvariant,
    ProjpairError,
)
from .scalars import (
    FLOAT,
    RATIONAL,
    DEFAULT_POLICY,
    Scalar,
    TolerancePolicy,
    check_same_field,
    coerce_scalar,
)

__all__ = [
    "Matrix",
    "Subspace",
    "rank",
    "kernel_basis",
    "subspace_sum",
    "subspace_intersection",
    "restrict_operator",
    "trace",
    "solve_exact",
]


class Matrix:
    """Immutable dense matrix with a scalar-field tag.

    Entries are Fractions (rational field) or floats.  All operations
    return new matrices; mixing fields raises :class:`FieldMismatch`.
    """

    __slots__ = ("rows", "cols", "field", "data")

    def __init__(self, data: Iterable[Iterable], field: str, *, _raw: bool = False):
        rows = tuple(tuple(r) for r in data)
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged row lengths")
        if not _raw:
            rows = tuple(
                tuple(coerce_scalar(x, field) for x in r) for r in rows
            )
        object.__setattr__(self, "rows", nrows)
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", rows)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Matrix is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int, field: str) -> "Matrix":
        zero = Fraction(0) if field == RATIONAL else 0.0
        return cls([[zero] * cols for _ in range(rows)], field, _raw=True)

    @classmethod
    def identity(cls, n: int, field: str) -> "Matrix":
        zero = Fraction(0) if field == RATIONAL else 0.0
        one = Fraction(1) if field == RATIONAL else 1.0
        return cls(
            [[one if i == j else zero for j in range(n)] for i in range(n)],
            field,
            _raw=True,
        )

    @classmethod
    def diag(cls, values: Sequence, field: str) -> "Matrix":
        vals = [coerce_scalar(v, field) for v in values]
        zero = Fraction(0) if field == RATIONAL else 0.0
        n = len(vals)
        return cls(
            [[vals[i] if i == j else zero for j in range(n)] for i in range(n)],
            field,
            _raw=True,
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], field: str, rows: int | None = None) -> "Matrix":
        cols = [list(c) for c in columns]
        if not cols:
            if rows is None:
                raise DimensionMismatch("need explicit row count for an empty column list")
            return cls.zeros(rows, 0, field)
        nrows = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(nrows)], field)

    # -- basic queries --------------------------------------------------

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def entry(self, i: int, j: int) -> Scalar:
        return self.data[i][j]

    def column(self, j: int) -> "Matrix":
        return Matrix([[r[j]] for r in self.data], self.field, _raw=True)

    def to_lists(self) -> list[list[Scalar]]:
        return [list(r) for r in self.data]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.data], dtype=float).reshape(
            self.rows, self.cols
        )

    def to_float(self) -> "Matrix":
        if self.field == FLOAT:
            return self
        return Matrix([[float(x) for x in r] for r in self.data], FLOAT, _raw=True)

    def max_norm(self) -> Scalar:
        """Largest absolute entry (0 for empty matrices)."""
        if self.rows == 0 or self.cols == 0:
            return Fraction(0) if self.field == RATIONAL else 0.0
        return max(abs(x) for r in self.data for x in r)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    # -- algebra --------------------------------------------------------

    def _check_compatible(self, other: "Matrix") -> None:
        check_same_field(self.field, other.field)
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_compatible(other)
        return Matrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
            self.field,
            _raw=True,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_compatible(other)
        return Matrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
            self.field,
            _raw=True,
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.data], self.field, _raw=True)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            check_same_field(self.field, other.field)
            if self.cols != other.rows:
                raise DimensionMismatch(
                    f"cannot multiply {self.shape} by {other.shape}"
                )
            if self.cols == 0:
                return Matrix.zeros(self.rows, other.cols, self.field)
            bt = list(zip(*other.data))
            return Matrix(
                [
                    [sum(x * y for x, y in zip(row, col)) for col in bt]
                    for row in self.data
                ],
                self.field,
            )
        scalar = coerce_scalar(other, self.field)
        return Matrix([[scalar * a for a in r] for r in self.data], self.field, _raw=True)

    def __rmul__(self, other):
        scalar = coerce_scalar(other, self.field)
        return Matrix([[scalar * a for a in r] for r in self.data], self.field, _raw=True)

    def __pow__(self, n: int) -> "Matrix":
        if not self.is_square:
            raise DimensionMismatch("power of a non-square matrix")
        if not isinstance(n, int) or n < 0:
            raise NegativePower("exponent must be a nonnegative integer")
        result = Matrix.identity(self.rows, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def transpose(self) -> "Matrix":
        if self.rows == 0 or self.cols == 0:
            return Matrix.zeros(self.cols, self.rows, self.field)
        return Matrix(list(zip(*self.data)), self.field, _raw=True)

    def hstack(self, other: "Matrix") -> "Matrix":
        check_same_field(self.field, other.field)
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ in hstack")
        return Matrix(
            [ra + rb for ra, rb in zip(self.data, other.data)], self.field, _raw=True
        )

    def trace(self) -> Scalar:
        if not self.is_square:
            raise DimensionMismatch("trace of a non-square matrix")
        total = sum(self.data[i][i] for i in range(self.rows))
        return coerce_scalar(total, self.field)

    def det(self) -> Scalar:
        """Exact determinant over Q (Bareiss); float falls back to numpy."""
        if not self.is_square:
            raise DimensionMismatch("determinant of a non-square matrix")
        if self.rows == 0:
            return Fraction(1) if self.field == RATIONAL else 1.0
        if self.field == FLOAT:
            return float(np.linalg.det(self.to_numpy()))
        int_rows, scales = _integer_rows(self)
        rows, piv_cols, sign = _bareiss_echelon(int_rows, self.cols)
        if len(piv_cols) < self.rows:
            return Fraction(0)
        denom = math.prod(scales)
        return Fraction(sign * rows[self.rows - 1][self.cols - 1], denom)

    def inverse(self) -> "Matrix":
        if not self.is_square:
            raise DimensionMismatch("inverse of a non-square matrix")
        if self.field == FLOAT:
            try:
                inv = np.linalg.inv(self.to_numpy())
            except np.linalg.LinAlgError as exc:
                raise ProjpairError("matrix is not invertible") from exc
            return Matrix(inv.tolist(), FLOAT)
        # for singular A the system A X = I is inconsistent, so None suffices
        result = solve_exact(self, Matrix.identity(self.rows, self.field))
        if result is None:
            raise ProjpairError("matrix is not invertible")
        return result

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.field, self.data))

    def approx_equal(self, other: "Matrix", tol: float) -> bool:
        if not isinstance(other, Matrix) or self.shape != other.shape:
            return False
        return all(
            abs(float(a) - float(b)) <= tol
            for ra, rb in zip(self.data, other.data)
            for a, b in zip(ra, rb)
        )

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.field})"


# ---------------------------------------------------------------------------
# Exact elimination (fraction-free Bareiss core)
# ---------------------------------------------------------------------------


def _integer_rows(m: Matrix) -> tuple[list[list[int]], list[int]]:
    """Scale each row by the lcm of its denominators; returns (rows, scales).

    Row scaling by nonzero integers preserves rank, row space and kernel.
    """
    int_rows: list[list[int]] = []
    scales: list[int] = []
    for row in m.data:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        int_rows.append([x.numerator * (lcm // x.denominator) for x in row])
        scales.append(lcm)
    return int_rows, scales


def _bareiss_echelon(
    rows: list[list[int]], ncols: int
) -> tuple[list[list[int]], list[int], int]:
    """In-place fraction-free row echelon; returns (rows, pivot_cols, sign).

    One-step Bareiss: every interior division is exact, which keeps the
    intermediate entries at the size of minors instead of exploding.
    """
    nrows = len(rows)
    prev = 1
    sign = 1
    piv_cols: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        pivot = rows[r][c]
        row_r = rows[r]
        for i in range(r + 1, nrows):
            row_i = rows[i]
            factor = row_i[c]
            if factor == 0 and pivot == prev:
                continue
            for j in range(c + 1, ncols):
                row_i[j] = (pivot * row_i[j] - factor * row_r[j]) // prev
            row_i[c] = 0
        prev = pivot
        piv_cols.append(c)
        r += 1
    return rows, piv_cols, sign


def _rref_exact(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q: Bareiss descent, Fraction ascent."""
    int_rows, _ = _integer_rows(m)
    rows, piv_cols, _ = _bareiss_echelon(int_rows, m.cols)
    rank_ = len(piv_cols)
    frows = [[Fraction(x) for x in rows[i]] for i in range(rank_)]
    for i in range(rank_ - 1, -1, -1):
        c = piv_cols[i]
        pivot = frows[i][c]
        frows[i] = [x / pivot for x in frows[i]]
        for k in range(i):
            f = frows[k][c]
            if f:
                frows[k] = [a - f * b for a, b in zip(frows[k], frows[i])]
    return frows, piv_cols


def _exact_rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    int_rows, _ = _integer_rows(m)
    _, piv_cols, _ = _bareiss_echelon(int_rows, m.cols)
    return len(piv_cols)


def solve_exact(a: Matrix, b: Matrix) -> Matrix | None:
    """Solve a X = b exactly over Q; None when the system is inconsistent.

    Free variables, if any, are set to zero.
    """
    check_same_field(a.field, b.field)
    if a.field != RATIONAL:
        raise FieldMismatch("solve_exact requires the rational field")
    if a.rows != b.rows:
        raise DimensionMismatch("row counts differ in solve")
    if a.cols == 0:
        return Matrix.zeros(0, b.cols, a.field) if b.is_zero() else None
    aug = a.hstack(b)
    frows, piv_cols = _rref_exact(aug)
    for c in piv_cols:
        if c >= a.cols:
            return None
    zero = Fraction(0)
    sol = [[zero] * b.cols for _ in range(a.cols)]
    for i, c in enumerate(piv_cols):
        for j in range(b.cols):
            sol[c][j] = frows[i][a.cols + j]
    return Matrix(sol, a.field, _raw=True)


# ---------------------------------------------------------------------------
# Float backend
# ---------------------------------------------------------------------------


def _float_rank(m: Matrix, pol: TolerancePolicy, floor: float = 0.0) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    s = np.linalg.svd(m.to_numpy(), compute_uv=False)
    if s.size == 0 or float(s[0]) <= floor * pol.rank_rel_tol:
        return 0
    threshold = pol.rank_rel_tol * max(float(s[0]), floor) * max(m.rows, m.cols)
    return int(np.sum(s > threshold))


def _float_kernel(m: Matrix, pol: TolerancePolicy, floor: float = 0.0) -> Matrix:
    if m.cols == 0:
        return Matrix.zeros(0, 0, FLOAT)
    if m.rows == 0:
        return Matrix.identity(m.cols, FLOAT)
    _, s, vh = np.linalg.svd(m.to_numpy(), full_matrices=True)
    if s.size == 0 or float(s[0]) <= floor * pol.rank_rel_tol:
        rank_ = 0
    else:
        threshold = pol.rank_rel_tol * max(float(s[0]), floor) * max(m.rows, m.cols)
        rank_ = int(np.sum(s > threshold))
    basis = vh[rank_:].T
    return Matrix(basis.tolist(), FLOAT) if basis.size else Matrix.zeros(m.cols, 0, FLOAT)


def _rref_float(
    m: Matrix, pol: TolerancePolicy
) -> tuple[list[list[float]], list[int]]:
    """Gauss-Jordan with partial pivoting; entries below threshold are zero."""
    rows = [list(map(float, r)) for r in m.data]
    nrows, ncols = m.rows, m.cols
    scale = max(1.0, float(m.max_norm()))
    threshold = pol.compare_abs_tol * scale
    piv_cols: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = max(range(r, nrows), key=lambda i: abs(rows[i][c]))
        if abs(rows[piv][c]) <= threshold:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pivot = rows[r][c]
        rows[r] = [x / pivot for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0.0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    return rows[: len(piv_cols)], piv_cols


# ---------------------------------------------------------------------------
# Field-dispatching operations
# ---------------------------------------------------------------------------


def rank(m: Matrix, pol: TolerancePolicy = DEFAULT_POLICY, floor: float = 0.0) -> int:
    """Matrix rank: exact elimination over Q, SVD thresholding over floats.

    floor sets an ambient scale for the float cutoff: singular values are
    compared against rank_rel_tol times max(sigma_max, floor).  Without it
    the test is purely relative, and a matrix that should be zero but
    holds 1e-16 noise would count as full rank.  Callers that know the
    inputs have entries of order one (everything built from projections
    does) should pass floor=1.0.  Ignored over the rationals.
    """
    if m.field == RATIONAL:
        return _exact_rank(m)
    return _float_rank(m, pol, floor)


def _exact_kernel_matrix(m: Matrix) -> Matrix:
    frows, piv_cols = _rref_exact(m)
    free_cols = [c for c in range(m.cols) if c not in piv_cols]
    zero, one = Fraction(0), Fraction(1)
    columns = []
    for f in free_cols:
        v = [zero] * m.cols
        v[f] = one
        for i, c in enumerate(piv_cols):
            v[c] = -frows[i][f]
        columns.append(v)
    return Matrix.from_columns(columns, m.field, rows=m.cols)


def kernel_basis(
    m: Matrix, pol: TolerancePolicy = DEFAULT_POLICY, floor: float = 0.0
) -> "Subspace":
    """Basis of the null space of m, as a Subspace of dimension cols - rank.

    floor plays the same role as in :func:`rank`: with floor=1.0 a
    numerically-zero float matrix gets the full kernel instead of the
    empty one its noise singular values would suggest.
    """
    if m.cols == 0:
        raise DimensionMismatch("kernel needs at least one column")
    if m.field == RATIONAL:
        return Subspace._make(m.cols, _exact_kernel_matrix(m), m.field, pol)
    return Subspace._make(m.cols, _float_kernel(m, pol, floor), m.field, pol)


def _column_echelon(m: Matrix, pol: TolerancePolicy) -> Matrix:
    """Reduced column echelon form with zero columns dropped.

    Computed as the transpose of the reduced row echelon form of the
    transpose; pivot entries are normalized to one.
    """
    if m.cols == 0:
        return m
    mt = m.transpose()
    if m.field == RATIONAL:
        frows, _ = _rref_exact(mt)
    else:
        frows, _ = _rref_float(mt, pol)
    if not frows:
        return Matrix.zeros(m.rows, 0, m.field)
    return Matrix(frows, m.field).transpose()


class Subspace:
    """A linear subspace of Q^n or R^n given by a column basis.

    ``canonical`` is the reduced column-echelon form of the span, so two
    subspaces are equal iff their canonical matrices agree (entrywise over
    Q, within tolerance over floats).
    """

    __slots__ = ("ambient_dim", "basis", "canonical", "field", "pol")

    def __init__(self, ambient_dim, basis, canonical, field, pol):
        if ambient_dim < 1:
            raise DimensionMismatch("ambient dimension must be at least 1")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "canonical", canonical)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "pol", pol)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Subspace is immutable")

    @classmethod
    def _make(cls, ambient_dim: int, basis: Matrix, field: str, pol: TolerancePolicy) -> "Subspace":
        canonical = _column_echelon(basis, pol)
        if canonical.cols != basis.cols:
            # dependent columns were supplied; fall back to the canonical set
            basis = canonical
        return cls(ambient_dim, basis, canonical, field, pol)

    @classmethod
    def from_span(
        cls, span: Matrix, pol: TolerancePolicy = DEFAULT_POLICY
    ) -> "Subspace":
        """Subspace spanned by the columns of ``span`` (dependencies allowed)."""
        canonical = _column_echelon(span, pol)
        return cls(span.rows, canonical, canonical, span.field, pol)

    @classmethod
    def zero(cls, ambient_dim: int, field: str, pol: TolerancePolicy = DEFAULT_POLICY) -> "Subspace":
        empty = Matrix.zeros(ambient_dim, 0, field)
        return cls(ambient_dim, empty, empty, field, pol)

    @classmethod
    def full(cls, ambient_dim: int, field: str, pol: TolerancePolicy = DEFAULT_POLICY) -> "Subspace":
        eye = Matrix.identity(ambient_dim, field)
        return cls(ambient_dim, eye, eye, field, pol)

    @property
    def dim(self) -> int:
        return self.basis.cols

    def contains_vector(self, v: Matrix) -> bool:
        if v.rows != self.ambient_dim or v.cols != 1:
            raise DimensionMismatch("vector shape mismatch")
        if self.dim == 0:
            if self.field == RATIONAL:
                return v.is_zero()
            return float(v.max_norm()) <= self.pol.compare_abs_tol
        return rank(self.basis.hstack(v), self.pol) == self.dim

    def contains(self, other: "Subspace") -> bool:
        """Whether other is a subset of self."""
        self._check_ambient(other)
        if other.dim == 0:
            return True
        return rank(self.basis.hstack(other.basis), self.pol) == self.dim

    def _check_ambient(self, other: "Subspace") -> None:
        check_same_field(self.field, other.field)
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.field != other.field or self.ambient_dim != other.ambient_dim:
            return False
        if self.field == RATIONAL:
            return self.canonical == other.canonical
        tol = max(self.pol.compare_abs_tol, other.pol.compare_abs_tol)
        return self.canonical.approx_equal(other.canonical, tol)

    def __hash__(self) -> int:
        if self.field == RATIONAL:
            return hash((self.ambient_dim, self.canonical))
        return hash((self.ambient_dim, self.canonical.shape))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of {self.field}^{self.ambient_dim})"


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    """Span of the union: column space of the concatenated bases."""
    a._check_ambient(b)
    pol = a.pol
    return Subspace.from_span(a.basis.hstack(b.basis), pol)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the kernel of the stacked system [A | -B]."""
    a._check_ambient(b)
    pol = a.pol
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.field, pol)
    stacked = a.basis.hstack(-b.basis)
    coeffs = kernel_basis(stacked, pol)
    if coeffs.dim == 0:
        return Subspace.zero(a.ambient_dim, a.field, pol)
    top = Matrix(coeffs.basis.data[: a.dim], a.field, _raw=True)
    return Subspace.from_span(a.basis * top, pol)


def restrict_operator(
    t: Matrix, w: Subspace, pol: TolerancePolicy = DEFAULT_POLICY
) -> Matrix:
    """Matrix of t acting on w, in the basis of w.

    Solves basis * result = t * basis.  Raises :class:`NotInvariant` when
    t does not map w into itself (exactly over Q, beyond tolerance over
    floats), which signals a logic error upstream.
    """
    if not t.is_square:
        raise DimensionMismatch("operator must be square")
    if w.ambient_dim != t.rows:
        raise DimensionMismatch("subspace ambient dimension does not match operator")
    if w.dim == 0:
        return Matrix.zeros(0, 0, t.field)
    image = t * w.basis
    if t.field == RATIONAL:
        solution = solve_exact(w.basis, image)
        if solution is None:
            raise NotInvariant("operator does not preserve the subspace")
        return solution
    a = w.basis.to_numpy()
    b = image.to_numpy()
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = np.max(np.abs(a @ solution - b)) if b.size else 0.0
    allowed = pol.compare_abs_tol * (1.0 + float(t.max_norm())) * (
        1.0 + float(w.basis.max_norm())
    )
    if residual > allowed:
        raise NotInvariant(
            f"operator does not preserve the subspace (residual {residual:.3e})"
        )
    return Matrix(solution.tolist(), FLOAT)


def trace(m: Matrix) -> Scalar:
    """Sum of the diagonal entries; exact over the rationals."""
    return m.trace()

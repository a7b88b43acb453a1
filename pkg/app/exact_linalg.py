"""
Exact rational linear algebra.

Every rank, kernel and image computed by the engine goes through this module.
Entries are ``fractions.Fraction`` values; binary floats are refused at the
door so that no Betti number can depend on rounding.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import sympy

from app.errors import DimensionMismatchError

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value):
    """Convert an int, Fraction or exact numeric string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"inexact or non-numeric entry: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text.lower() for ch in ("e", "n", "i")):
            raise ValueError(f"not an exact rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"unsupported entry type: {type(value).__name__}")


def as_vector(values):
    return tuple(as_fraction(v) for v in values)


def _to_sympy(value):
    return sympy.Rational(value.numerator, value.denominator)


def _from_sympy(value):
    return Fraction(int(value.p), int(value.q))


def _reduce(vectors, width):
    """Reduced row-echelon form of ``vectors``; returns (rows, pivot columns)."""
    if not vectors or width == 0:
        return [], []
    matrix = sympy.Matrix(
        len(vectors), width, [_to_sympy(x) for v in vectors for x in v]
    )
    reduced, pivots = matrix.rref()
    rows = [
        tuple(_from_sympy(reduced[i, j]) for j in range(width)) for i in range(len(pivots))
    ]
    return rows, list(pivots)


def _reduce_from_right(vectors, width):
    """Echelon form whose pivots are taken from the last coordinate backwards."""
    flipped, pivots = _reduce([tuple(reversed(v)) for v in vectors], width)
    return [tuple(reversed(row)) for row in flipped], [width - 1 - p for p in pivots]


@dataclass(frozen=True)
class RationalMatrix:
    """Dense matrix of exact rationals, stored row by row."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows or any(
            len(row) != self.cols for row in self.entries
        ):
            raise DimensionMismatchError(
                f"entries do not form a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [as_vector(row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_columns(cls, columns, rows):
        columns = [as_vector(col) for col in columns]
        for col in columns:
            if len(col) != rows:
                raise DimensionMismatchError(
                    f"column of length {len(col)} in a matrix with {rows} rows"
                )
        entries = tuple(tuple(col[i] for col in columns) for i in range(rows))
        return cls(rows, len(columns), entries)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, tuple((ZERO,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n):
        return cls(
            n, n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))
        )

    def column(self, j):
        return tuple(row[j] for row in self.entries)

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return RationalMatrix(self.cols, self.rows, tuple(self.columns()))

    def apply(self, vector):
        vector = as_vector(vector)
        if len(vector) != self.cols:
            raise DimensionMismatchError(
                f"vector of length {len(vector)} applied to a {self.rows}x{self.cols} matrix"
            )
        return tuple(sum((a * b for a, b in zip(row, vector)), ZERO) for row in self.entries)

    def __matmul__(self, other):
        if not isinstance(other, RationalMatrix):
            return self.apply(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}"
            )
        columns = [self.apply(col) for col in other.columns()]
        return RationalMatrix.from_columns(columns, self.rows)

    def stack(self, other):
        """Block matrix with ``self`` on top of ``other``."""
        if self.cols != other.cols:
            raise DimensionMismatchError("stacked blocks need the same column count")
        return RationalMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def is_zero(self):
        return all(x == 0 for row in self.entries for x in row)


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim held by its reduced row-echelon basis.

    The echelon basis is canonical, so two equal subspaces compare equal
    structurally.
    """

    ambient_dim: int
    basis: tuple

    @classmethod
    def span(cls, vectors, ambient_dim):
        vectors = [as_vector(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatchError(
                    f"vector of length {len(v)} in a space of dimension {ambient_dim}"
                )
        reduced, _ = _reduce(vectors, ambient_dim)
        return cls(ambient_dim, tuple(reduced))

    @classmethod
    def zero(cls, ambient_dim):
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim):
        return cls(ambient_dim, RationalMatrix.identity(ambient_dim).entries)

    @property
    def dim(self):
        return len(self.basis)

    def pivots(self):
        return [next(i for i, x in enumerate(row) if x != 0) for row in self.basis]

    def reduce(self, vector):
        """Remainder of ``vector`` after clearing the pivot coordinates."""
        remainder = list(as_vector(vector))
        for pivot, row in zip(self.pivots(), self.basis):
            factor = remainder[pivot]
            if factor != 0:
                remainder = [a - factor * b for a, b in zip(remainder, row)]
        return tuple(remainder)

    def contains(self, vector):
        return member(self, vector)

    def join(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError("subspaces live in different ambient spaces")
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.basis)


def rank(matrix):
    reduced, _ = _reduce(matrix.entries, matrix.cols)
    return len(reduced)


def kernel_basis(matrix):
    reduced, pivots = _reduce(matrix.entries, matrix.cols)
    free = [c for c in range(matrix.cols) if c not in pivots]
    vectors = []
    for f in free:
        v = [ZERO] * matrix.cols
        v[f] = ONE
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        vectors.append(v)
    return Subspace.span(vectors, matrix.cols)


def image_basis(matrix):
    return Subspace.span(matrix.columns(), matrix.rows)


def cokernel(matrix, prefer_first=False):
    """Complement representatives of im(matrix) and the projection onto them.

    Representatives are standard basis vectors at the non-pivot coordinates of
    the image's echelon basis. With ``prefer_first`` the pivots are taken from
    the right, so earlier coordinates are kept as representatives.
    The projection sends v to its coordinates modulo the image.
    """
    width = matrix.rows
    if prefer_first:
        basis, pivots = _reduce_from_right(matrix.columns(), width)
    else:
        basis, pivots = _reduce(matrix.columns(), width)
    kept = [k for k in range(width) if k not in pivots]
    projection_rows = []
    for k in kept:
        row = [ZERO] * width
        row[k] = ONE
        for b, p in zip(basis, pivots):
            row[p] -= b[k]
        projection_rows.append(tuple(row))
    representatives = Subspace.span(
        [tuple(ONE if i == k else ZERO for i in range(width)) for k in kept], width
    )
    projection = RationalMatrix(len(kept), width, tuple(projection_rows))
    return representatives, projection


def unit_positions(subspace):
    """Coordinates of the unit vectors spanning a cokernel representative space."""
    return subspace.pivots()


def member(subspace, vector):
    vector = as_vector(vector)
    if len(vector) != subspace.ambient_dim:
        raise DimensionMismatchError(
            f"vector of length {len(vector)} tested against a subspace of "
            f"Q^{subspace.ambient_dim}"
        )
    return all(x == 0 for x in subspace.reduce(vector))


def solve(matrix, target):
    """One solution x of matrix @ x = target, or None when inconsistent."""
    target = as_vector(target)
    if len(target) != matrix.rows:
        raise DimensionMismatchError("right-hand side does not match the row count")
    augmented = [row + (t,) for row, t in zip(matrix.entries, target)]
    reduced, pivots = _reduce(augmented, matrix.cols + 1)
    if matrix.cols in pivots:
        return None
    solution = [ZERO] * matrix.cols
    for row, p in zip(reduced, pivots):
        solution[p] = row[-1]
    return tuple(solution)

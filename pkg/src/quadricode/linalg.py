"""Dense exact matrices over a :class:`~quadricode.finite_field.Field`."""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .finite_field import Field, FieldError, extension_basis


class Matrix:
    """Immutable row-major matrix of field encodings."""

    __slots__ = ("field", "data")

    def __init__(self, field: Field, data, cols: int | None = None):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, cols or 0)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= field.order):
            raise FieldError("matrix entry outside the field")
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> Matrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: Field, n: int) -> Matrix:
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Matrix) and other.field == self.field
                and other.shape == self.shape and bool(np.array_equal(other.data, self.data)))

    def __hash__(self):
        return hash((self.field, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.field!r}, {self.rows}x{self.cols})"

    @property
    def T(self) -> Matrix:
        return Matrix(self.field, self.data.T)

    def __matmul__(self, other: Matrix) -> Matrix:
        _same_field(self, other)
        if self.cols != other.rows:
            raise ValueError("inner dimensions differ")
        f = self.field
        if self.cols == 0:
            return Matrix.zeros(f, self.rows, other.cols)
        prods = f.mul(self.data[:, :, None], other.data[None, :, :])
        return Matrix(f, f.sum(np.asarray(prods), axis=1).reshape(self.rows, other.cols))

    def apply(self, vec: Sequence[int]) -> np.ndarray:
        """Matrix times column vector."""
        f = self.field
        return np.atleast_1d(f.dot(self.data, np.asarray(vec, dtype=np.int64)[None, :]))

    def take_columns(self, cols: Sequence[int]) -> Matrix:
        return Matrix(self.field, self.data[:, list(cols)], cols=len(cols))

    def delete_columns(self, cols) -> Matrix:
        keep = [j for j in range(self.cols) if j not in set(cols)]
        return self.take_columns(keep)

    def vstack(self, other: Matrix) -> Matrix:
        _same_field(self, other)
        return Matrix(self.field, np.vstack([self.data, other.data]))

    def to_text(self) -> str:
        return "\n".join(" ".join(str(int(x)) for x in row) for row in self.data)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "rows": self.data.tolist()}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _same_field(a: Matrix, b: Matrix) -> None:
    if a.field != b.field:
        raise FieldError("matrices over different fields")


def _rref_array(f: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = a.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = f.mul(f.inv(int(a[r, c])), a[r])
        factors = a[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            a[hit] = f.sub(a[hit], f.mul(factors[hit, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: Matrix) -> tuple[Matrix, int, tuple[int, ...]]:
    """Reduced row echelon form, rank, and pivot columns.

    Pivots are the first nonzero entry scanning columns left to right and rows
    top to bottom, so the result is reproducible byte for byte.
    """
    a, pivots = _rref_array(m.field, m.data)
    return Matrix(m.field, a), len(pivots), tuple(pivots)


def rref_with_transform(m: Matrix) -> tuple[Matrix, Matrix, tuple[int, ...]]:
    """Return ``(R, T, pivots)`` with ``T @ m == R`` and R in reduced echelon form."""
    f = m.field
    aug = np.hstack([m.data, np.eye(m.rows, dtype=np.int64)])
    a, _ = _rref_array(f, aug)
    _, _, pivots = rref(m)
    return Matrix(f, a[:, :m.cols], cols=m.cols), Matrix(f, a[:, m.cols:], cols=m.rows), pivots


def rank(m: Matrix) -> int:
    return rref(m)[1]


def row_basis(m: Matrix) -> Matrix:
    """Nonzero rows of the RREF."""
    r, k, _ = rref(m)
    return Matrix(m.field, r.data[:k], cols=m.cols)


def kernel(m: Matrix) -> Matrix:
    """Basis (as rows) of the right kernel {x : m x = 0}, one row per free column."""
    f = m.field
    r, k, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    out = np.zeros((len(free), m.cols), dtype=np.int64)
    for i, c in enumerate(free):
        out[i, c] = 1
        for row, pc in enumerate(pivots):
            out[i, pc] = f.neg(int(r.data[row, c]))
    return Matrix(f, out, cols=m.cols)


def row_space_equal(a: Matrix, b: Matrix) -> bool:
    _same_field(a, b)
    if a.cols != b.cols:
        raise ValueError("column counts differ")
    return row_basis(a) == row_basis(b)


def in_row_space(m: Matrix, vec: Sequence[int]) -> bool:
    ext = m.vstack(Matrix(m.field, [list(vec)]))
    return rank(ext) == rank(m)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("only square matrices are invertible")
    r, t, pivots = rref_with_transform(m)
    if len(pivots) != m.rows:
        raise ZeroDivisionError("matrix is singular")
    return t


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    """Tensor product; block (i, j) equals ``a[i, j] * b``."""
    _same_field(a, b)
    f = a.field
    blocks = f.mul(a.data[:, None, :, None], b.data[None, :, None, :])
    blocks = np.asarray(blocks).reshape(a.rows * b.rows, a.cols * b.cols)
    return Matrix(f, blocks, cols=a.cols * b.cols)


def expand_over_subfield(m: Matrix, basis: Sequence[int]) -> Matrix:
    """Replace each row by ``d`` rows holding the subfield coordinates of its entries."""
    big = m.field
    coords = big.coordinates(basis)
    d = len(basis)
    if m.rows == 0:
        return Matrix(big.subfield, np.zeros((0, m.cols), dtype=np.int64), cols=m.cols)
    exp = coords[m.data]  # rows x cols x d
    exp = np.transpose(exp, (0, 2, 1)).reshape(m.rows * d, m.cols)
    return Matrix(big.subfield, exp, cols=m.cols)


def subfield_subcode(gen: Matrix, sub: Field, basis: Sequence[int] | None = None) -> Matrix:
    """Generator over ``sub`` of {c in sub^n : c in rowspace(gen)}.

    The parity checks of ``gen`` are expanded over a basis of the extension,
    giving d*(n-k) checks over ``sub``; their kernel is the subfield subcode.
    """
    big = gen.field
    if big.subfield is None or big.subfield != sub:
        raise FieldError(f"{sub!r} is not the designated subfield of {big!r}")
    if basis is None:
        basis = extension_basis(big, sub)
    checks = kernel(gen)
    if checks.rows == 0:
        return Matrix.identity(sub, gen.cols)
    return kernel(expand_over_subfield(checks, basis))


def embed_matrix(m: Matrix, big: Field) -> Matrix:
    """View a matrix over the designated subfield of ``big`` as one over ``big``."""
    if big.subfield != m.field:
        raise FieldError("matrix field is not the designated subfield")
    return Matrix(big, np.asarray(big.embed(m.data)).reshape(m.shape), cols=m.cols)


def restrict_matrix(m: Matrix) -> Matrix:
    """Inverse of :func:`embed_matrix`; raises if an entry leaves the subfield."""
    f = m.field
    return Matrix(f.subfield, np.asarray(f.restrict(m.data)).reshape(m.shape), cols=m.cols)

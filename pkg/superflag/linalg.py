"""
Exact linear algebra over the rationals.

Vectors are tuples of ``Fraction``; the heavy lifting (RREF, nullspace,
inverse) is delegated to sympy's ``DomainMatrix`` over ``QQ`` in sparse
format. ``Subspace`` keeps its basis in reduced row echelon form, so two
subspaces are equal exactly when their stored bases are.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

__all__ = [
    "SingularMatrixError",
    "Subspace",
    "Span",
    "inverse",
    "nullspace",
    "rank",
    "rref",
]

Vector = tuple[Fraction, ...]
SparseVector = Mapping[int, Fraction]


class SingularMatrixError(ValueError):
    """Raised when a rational matrix that must be inverted is singular."""


def _to_qq(value) -> object:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def _domain_matrix(rows: Sequence[Sequence | SparseVector], ncols: int) -> DomainMatrix:
    dod: dict[int, dict[int, object]] = {}
    for i, row in enumerate(rows):
        items = row.items() if isinstance(row, Mapping) else enumerate(row)
        entries = {j: _to_qq(v) for j, v in items if v}
        if entries:
            dod[i] = entries
    return DomainMatrix(dod, (len(rows), ncols), QQ)


def _rows_of(matrix: DomainMatrix) -> list[Vector]:
    return [tuple(_to_fraction(v) for v in row) for row in matrix.to_list()]


def rref(rows: Sequence[Sequence | SparseVector], ncols: int) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    """Return the nonzero rows of the reduced row echelon form and the pivot columns."""
    if not rows:
        return (), ()
    reduced, pivots = _domain_matrix(rows, ncols).rref()
    return tuple(_rows_of(reduced)[: len(pivots)]), tuple(pivots)


def rank(rows: Sequence[Sequence | SparseVector], ncols: int) -> int:
    if not rows:
        return 0
    return _domain_matrix(rows, ncols).rank()


def nullspace(rows: Sequence[Sequence | SparseVector], ncols: int) -> list[Vector]:
    """Basis of ``{x : row . x = 0 for every row}``."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    if ncols == 0:
        return []
    kernel = _domain_matrix(rows, ncols).nullspace()
    return [row for row in _rows_of(kernel) if any(row)]


def inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse of a square numpy object array of rationals."""
    size = matrix.shape[0]
    if matrix.shape != (size, size):
        raise ValueError(f"Cannot invert a non-square matrix of shape {matrix.shape}")
    out = np.empty((size, size), dtype=object)
    if size == 0:
        return out
    try:
        inv = _domain_matrix([list(row) for row in matrix], size).to_dense().inv()
    except DMNonInvertibleMatrixError as exc:
        raise SingularMatrixError("Matrix is singular") from exc
    for i, row in enumerate(_rows_of(inv)):
        out[i, :] = row
    return out


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient stored by its canonical RREF basis."""

    ambient: int
    basis: tuple[Vector, ...]
    pivots: tuple[int, ...]

    @classmethod
    def from_vectors(cls, ambient: int, vectors: Iterable[Sequence | SparseVector]) -> Subspace:
        rows = list(vectors)
        basis, pivots = rref(rows, ambient)
        return cls(ambient, basis, pivots)

    @classmethod
    def zero(cls, ambient: int) -> Subspace:
        return cls(ambient, (), ())

    @classmethod
    def full(cls, ambient: int) -> Subspace:
        return cls.spanned_by_units(ambient, range(ambient))

    @classmethod
    def spanned_by_units(cls, ambient: int, indices: Iterable[int]) -> Subspace:
        chosen = sorted(set(indices))
        basis = tuple(tuple(Fraction(int(j == i)) for j in range(ambient)) for i in chosen)
        return cls(ambient, basis, tuple(chosen))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return self.dim

    def contains(self, vector: Sequence | SparseVector) -> bool:
        residual = _reduce(self, _dense(vector, self.ambient))
        return not any(residual)

    def issubspace(self, other: Subspace) -> bool:
        self._check_ambient(other)
        return all(other.contains(v) for v in self.basis)

    def join(self, other: Subspace | Iterable[Sequence | SparseVector]) -> Subspace:
        extra = other.basis if isinstance(other, Subspace) else list(other)
        if isinstance(other, Subspace):
            self._check_ambient(other)
        return Subspace.from_vectors(self.ambient, [*self.basis, *extra])

    def annihilator(self) -> Subspace:
        """The subspace of the dual (same coordinates) vanishing on ``self``."""
        if not self.basis:
            return Subspace.full(self.ambient)
        return Subspace.from_vectors(self.ambient, nullspace(self.basis, self.ambient))

    def meet(self, other: Subspace) -> Subspace:
        self._check_ambient(other)
        return self.annihilator().join(other.annihilator()).annihilator()

    def _check_ambient(self, other: Subspace) -> None:
        if other.ambient != self.ambient:
            raise ValueError(f"Ambient dimensions differ: {self.ambient} != {other.ambient}")


def _dense(vector: Sequence | SparseVector, ambient: int) -> list[Fraction]:
    if isinstance(vector, Mapping):
        dense = [Fraction(0)] * ambient
        for i, v in vector.items():
            dense[i] = Fraction(v)
        return dense
    if len(vector) != ambient:
        raise ValueError(f"Vector of length {len(vector)} does not live in Q^{ambient}")
    return [Fraction(v) for v in vector]


def _reduce(space: Subspace, vector: list[Fraction]) -> list[Fraction]:
    for row, pivot in zip(space.basis, space.pivots):
        coef = vector[pivot]
        if coef:
            vector = [a - coef * b for a, b in zip(vector, row)]
    return vector


class Span:
    """Incrementally grown span of sparse vectors.

    Each stored vector has a pivot that is zero in every vector stored after
    it, so reducing against the stored vectors in insertion order leaves zero
    exactly on the members of the span.
    """

    def __init__(self, ambient: int):
        self.ambient = ambient
        self._rows: list[tuple[int, dict[int, Fraction]]] = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vector: SparseVector) -> dict[int, Fraction]:
        residual = {i: Fraction(v) for i, v in vector.items() if v}
        for pivot, row in self._rows:
            coef = residual.get(pivot)
            if not coef:
                continue
            for i, v in row.items():
                value = residual.get(i, 0) - coef * v
                if value:
                    residual[i] = value
                else:
                    residual.pop(i, None)
        return residual

    def add(self, vector: SparseVector) -> dict[int, Fraction] | None:
        """Add ``vector``; return its normalized reduction if it was new, else None."""
        residual = self.reduce(vector)
        if not residual:
            return None
        pivot = min(residual)
        lead = residual[pivot]
        row = {i: v / lead for i, v in residual.items()}
        self._rows.append((pivot, row))
        return row

    def vectors(self) -> list[dict[int, Fraction]]:
        return [dict(row) for _, row in self._rows]

    def to_subspace(self) -> Subspace:
        return Subspace.from_vectors(self.ambient, self.vectors())

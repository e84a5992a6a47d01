"""
Exact super-commutative arithmetic.

``GrassmannElement`` is an element of the exterior algebra Λ_N over the
rationals on odd generators ξ_1 … ξ_N; ``SuperMatrix`` is a block matrix over
Λ_N with an (even|odd) partition of its rows and columns.

Monomials are stored as bitmasks (bit i-1 stands for ξ_i). Publicly they are
strictly increasing index tuples, e.g. ``(1, 3)`` for ξ_1ξ_3.

Usage:
    from grassmann import GrassmannElement, gr_mul
    x1 = GrassmannElement.generator(2, 1)
    x2 = GrassmannElement.generator(2, 2)
    gr_mul(x2, x1)  # -xi1 xi2
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from linalg import SingularMatrixError, inverse

__all__ = [
    "GeneratorMismatchError",
    "GrassmannElement",
    "ParityError",
    "SingularBodyError",
    "SuperMatrix",
    "grade_project",
    "gr_mul",
    "odd_derivative",
    "smat_exp_nilpotent",
    "smat_inverse_even",
    "smat_mul",
    "smat_supertranspose",
]

Scalar = int | Fraction


class GeneratorMismatchError(ValueError):
    """Operands live in exterior algebras with different generator counts."""


class ParityError(ValueError):
    """A supermatrix entry has the wrong parity for its block."""


class SingularBodyError(ValueError):
    """The grade-0 part of an even supermatrix is not invertible."""


def _mask_of(indices: Iterable[int], generators: int) -> int:
    mask = 0
    previous = 0
    for i in indices:
        if not previous < i <= generators:
            raise ValueError(f"Index sequence must be strictly increasing within 1..{generators}: {tuple(indices)}")
        mask |= 1 << (i - 1)
        previous = i
    return mask


def _indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _merge_sign(left: int, right: int) -> int:
    """Sign of sorting the concatenation of two disjoint monomials."""
    swaps = 0
    rest = right
    while rest:
        low = rest & -rest
        # generators of ``left`` with a larger index than this one must hop over it
        swaps += (left & ~((low << 1) - 1)).bit_count()
        rest ^= low
    return -1 if swaps & 1 else 1


class GrassmannElement:
    """Immutable element of Λ_N with rational coefficients."""

    __slots__ = ("_generators", "_terms")

    def __init__(self, generators: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        if generators < 0:
            raise ValueError(f"Generator count must be nonnegative, got {generators}")
        self._generators = generators
        self._terms: dict[int, Fraction] = {}
        for indices, coef in (terms or {}).items():
            coef = Fraction(coef)
            if coef:
                mask = _mask_of(indices, generators)
                self._terms[mask] = self._terms.get(mask, 0) + coef
                if not self._terms[mask]:
                    del self._terms[mask]

    @classmethod
    def _from_masks(cls, generators: int, terms: dict[int, Fraction]) -> GrassmannElement:
        element = cls.__new__(cls)
        element._generators = generators
        element._terms = {mask: coef for mask, coef in terms.items() if coef}
        return element

    @classmethod
    def scalar(cls, generators: int, value: Scalar) -> GrassmannElement:
        return cls._from_masks(generators, {0: Fraction(value)})

    @classmethod
    def zero(cls, generators: int) -> GrassmannElement:
        return cls._from_masks(generators, {})

    @classmethod
    def generator(cls, generators: int, index: int) -> GrassmannElement:
        if not 1 <= index <= generators:
            raise ValueError(f"Generator index {index} out of range 1..{generators}")
        return cls._from_masks(generators, {1 << (index - 1): Fraction(1)})

    @property
    def generators(self) -> int:
        return self._generators

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        ordered = sorted(self._terms.items(), key=lambda item: (item[0].bit_count(), _indices_of(item[0])))
        return {_indices_of(mask): coef for mask, coef in ordered}

    @property
    def body(self) -> Fraction:
        return self._terms.get(0, Fraction(0))

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements (zero counts as even), None otherwise."""
        parities = {mask.bit_count() & 1 for mask in self._terms}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def degrees(self) -> set[int]:
        return {mask.bit_count() for mask in self._terms}

    def embed(self, generators: int) -> GrassmannElement:
        if generators < self._generators:
            raise GeneratorMismatchError(f"Cannot embed Λ_{self._generators} into Λ_{generators}")
        return GrassmannElement._from_masks(generators, dict(self._terms))

    def _coerce(self, other) -> GrassmannElement:
        if isinstance(other, GrassmannElement):
            if other._generators != self._generators:
                raise GeneratorMismatchError(
                    f"Generator counts differ: {self._generators} != {other._generators}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return GrassmannElement.scalar(self._generators, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for mask, coef in other._terms.items():
            terms[mask] = terms.get(mask, 0) + coef
        return GrassmannElement._from_masks(self._generators, terms)

    __radd__ = __add__

    def __neg__(self) -> GrassmannElement:
        return GrassmannElement._from_masks(self._generators, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return gr_mul(self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return gr_mul(other, self)

    def __pow__(self, exponent: int) -> GrassmannElement:
        if exponent < 0:
            raise ValueError(f"Negative exponent {exponent} for a Grassmann element")
        result = GrassmannElement.scalar(self._generators, 1)
        for _ in range(exponent):
            result = gr_mul(result, self)
        return result

    def __truediv__(self, other: Scalar) -> GrassmannElement:
        divisor = Fraction(other)
        return GrassmannElement._from_masks(self._generators, {m: c / divisor for m, c in self._terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, GrassmannElement):
            return self._generators == other._generators and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == GrassmannElement.scalar(self._generators, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        # scalars compare equal to their body, so they must hash like it
        if set(self._terms) <= {0}:
            return hash(self.body)
        return hash((self._generators, frozenset(self._terms.items())))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for indices, coef in self.terms.items():
            monomial = " ".join(f"xi{i}" for i in indices)
            if not monomial:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(monomial)
            elif coef == -1:
                parts.append(f"-{monomial}")
            else:
                parts.append(f"{coef} {monomial}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_records(self) -> list[list]:
        """Serialize as ``[index-list, numerator, denominator]`` triples."""
        return [[list(indices), coef.numerator, coef.denominator] for indices, coef in self.terms.items()]

    @classmethod
    def from_records(cls, generators: int, records: Iterable[Sequence]) -> GrassmannElement:
        terms: dict[tuple[int, ...], Fraction] = {}
        for indices, numerator, denominator in records:
            key = tuple(indices)
            terms[key] = terms.get(key, 0) + Fraction(numerator, denominator)
        return cls(generators, terms)

    def dumps(self) -> str:
        return json.dumps({"generators": self._generators, "terms": self.to_records()})

    @classmethod
    def loads(cls, text: str) -> GrassmannElement:
        data = json.loads(text)
        return cls.from_records(data["generators"], data["terms"])


def gr_mul(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Wedge product; terms with a repeated generator vanish."""
    if a.generators != b.generators:
        raise GeneratorMismatchError(f"Generator counts differ: {a.generators} != {b.generators}")
    terms: dict[int, Fraction] = {}
    for left, x in a._terms.items():
        for right, y in b._terms.items():
            if left & right:
                continue
            mask = left | right
            value = terms.get(mask, 0) + _merge_sign(left, right) * x * y
            if value:
                terms[mask] = value
            else:
                terms.pop(mask, None)
    return GrassmannElement._from_masks(a.generators, terms)


def odd_derivative(i: int, a: GrassmannElement) -> GrassmannElement:
    """Left derivative ∂/∂ξ_i."""
    if not 1 <= i <= a.generators:
        raise ValueError(f"Generator index {i} out of range 1..{a.generators}")
    bit = 1 << (i - 1)
    terms: dict[int, Fraction] = {}
    for mask, coef in a._terms.items():
        if mask & bit:
            # moving ξ_i to the front passes every smaller generator
            sign = -1 if (mask & (bit - 1)).bit_count() & 1 else 1
            terms[mask ^ bit] = sign * coef
    return GrassmannElement._from_masks(a.generators, terms)


def grade_project(a: GrassmannElement, p: int) -> GrassmannElement:
    if p < 0:
        raise ValueError(f"Degree must be nonnegative, got {p}")
    return GrassmannElement._from_masks(
        a.generators, {mask: coef for mask, coef in a._terms.items() if mask.bit_count() == p}
    )


def _block(index: int, partition: tuple[int, int]) -> int:
    return 0 if index < partition[0] else 1


class SuperMatrix:
    """Block matrix over Λ_N.

    ``parity`` is the parity of the supermatrix as a whole: an entry in block
    (row block, column block) must have parity row block + column block +
    parity mod 2. Zero entries are allowed everywhere.
    """

    __slots__ = ("row_partition", "col_partition", "generators", "parity", "_entries")

    def __init__(
        self,
        row_partition: tuple[int, int],
        col_partition: tuple[int, int],
        entries,
        generators: int,
        parity: int = 0,
    ):
        self.row_partition = (int(row_partition[0]), int(row_partition[1]))
        self.col_partition = (int(col_partition[0]), int(col_partition[1]))
        self.generators = generators
        self.parity = parity & 1
        rows, cols = sum(self.row_partition), sum(self.col_partition)
        array = np.empty((rows, cols), dtype=object)
        if rows and cols:
            source = np.asarray(entries, dtype=object)
            if source.shape != (rows, cols):
                raise ValueError(f"Entries of shape {source.shape} do not fit partitions {rows}x{cols}")
            for i in range(rows):
                for j in range(cols):
                    array[i, j] = self._coerce(source[i, j], i, j)
        array.flags.writeable = False
        self._entries = array

    def _coerce(self, value, i: int, j: int) -> GrassmannElement:
        if isinstance(value, GrassmannElement):
            if value.generators != self.generators:
                raise GeneratorMismatchError(
                    f"Entry ({i}, {j}) has {value.generators} generators, expected {self.generators}"
                )
        else:
            value = GrassmannElement.scalar(self.generators, value)
        expected = (_block(i, self.row_partition) + _block(j, self.col_partition) + self.parity) & 1
        parity = value.parity()
        if value and parity != expected:
            raise ParityError(f"Entry ({i}, {j}) = {value!r} must have parity {expected}")
        return value

    @classmethod
    def from_rational(cls, matrix, row_partition, col_partition, generators: int, parity: int = 0) -> SuperMatrix:
        return cls(row_partition, col_partition, matrix, generators, parity)

    @classmethod
    def zeros(cls, row_partition, col_partition, generators: int) -> SuperMatrix:
        shape = (sum(row_partition), sum(col_partition))
        return cls(row_partition, col_partition, np.zeros(shape, dtype=object), generators)

    @classmethod
    def identity(cls, partition, generators: int) -> SuperMatrix:
        size = sum(partition)
        eye = np.empty((size, size), dtype=object)
        for i in range(size):
            for j in range(size):
                eye[i, j] = int(i == j)
        return cls(partition, partition, eye, generators)

    @property
    def shape(self) -> tuple[int, int]:
        return self._entries.shape

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    def __getitem__(self, key):
        return self._entries[key]

    def _same_frame(self, other: SuperMatrix) -> None:
        if (self.row_partition, self.col_partition) != (other.row_partition, other.col_partition):
            raise ValueError(
                f"Partition mismatch: {self.row_partition}x{self.col_partition} "
                f"vs {other.row_partition}x{other.col_partition}"
            )
        if self.generators != other.generators:
            raise GeneratorMismatchError(f"Generator counts differ: {self.generators} != {other.generators}")

    def _rebuild(self, entries, parity: int | None = None) -> SuperMatrix:
        return SuperMatrix(
            self.row_partition, self.col_partition, entries, self.generators, self.parity if parity is None else parity
        )

    def __add__(self, other: SuperMatrix) -> SuperMatrix:
        self._same_frame(other)
        return self._rebuild(self._entries + other._entries)

    def __sub__(self, other: SuperMatrix) -> SuperMatrix:
        self._same_frame(other)
        return self._rebuild(self._entries - other._entries)

    def __neg__(self) -> SuperMatrix:
        return self._rebuild(-self._entries)

    def __mul__(self, scalar) -> SuperMatrix:
        """Entrywise left multiplication by a rational or a homogeneous Grassmann element."""
        if isinstance(scalar, GrassmannElement):
            parity = scalar.parity()
            if parity is None:
                raise ParityError("Cannot scale a supermatrix by an inhomogeneous element")
            scaled = np.vectorize(lambda entry: gr_mul(scalar, entry), otypes=[object])(self._entries)
            return self._rebuild(scaled if self._entries.size else self._entries, self.parity ^ parity)
        return self._rebuild(self._entries * Fraction(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: SuperMatrix) -> SuperMatrix:
        return smat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return (
            self.row_partition == other.row_partition
            and self.col_partition == other.col_partition
            and self.generators == other.generators
            and bool(np.all(self._entries == other._entries))
        )

    def __hash__(self) -> int:
        return hash((self.row_partition, self.col_partition, self.generators, tuple(self._entries.flat)))

    def __repr__(self) -> str:
        rows = ["[" + ", ".join(repr(e) for e in row) + "]" for row in self._entries]
        return f"SuperMatrix({self.row_partition}x{self.col_partition}, [{', '.join(rows)}])"

    def is_zero(self) -> bool:
        return not any(bool(e) for e in self._entries.flat)

    def body(self) -> np.ndarray:
        """The grade-0 part as a rational matrix."""
        out = np.empty(self.shape, dtype=object)
        for index, entry in np.ndenumerate(self._entries):
            out[index] = entry.body
        return out

    def grade_project(self, p: int) -> SuperMatrix:
        projected = np.empty(self.shape, dtype=object)
        for index, entry in np.ndenumerate(self._entries):
            projected[index] = grade_project(entry, p)
        return self._rebuild(projected)

    def embed(self, generators: int) -> SuperMatrix:
        if generators == self.generators:
            return self
        lifted = np.empty(self.shape, dtype=object)
        for index, entry in np.ndenumerate(self._entries):
            lifted[index] = entry.embed(generators)
        return SuperMatrix(self.row_partition, self.col_partition, lifted, generators, self.parity)

    def rows(self, even_rows: Sequence[int], odd_rows: Sequence[int]) -> SuperMatrix:
        """Submatrix of the given even rows and odd rows (0-based within each block)."""
        p = self.row_partition[0]
        picked = [*even_rows, *(p + i for i in odd_rows)]
        return SuperMatrix(
            (len(even_rows), len(odd_rows)), self.col_partition, self._entries[picked, :], self.generators, self.parity
        )

    def to_records(self) -> dict:
        return {
            "rows": list(self.row_partition),
            "cols": list(self.col_partition),
            "parity": self.parity,
            "generators": self.generators,
            "entries": [[entry.to_records() for entry in row] for row in self._entries],
        }


def smat_mul(a: SuperMatrix, b: SuperMatrix) -> SuperMatrix:
    if a.col_partition != b.row_partition:
        raise ValueError(f"Shape mismatch: columns {a.col_partition} vs rows {b.row_partition}")
    if a.generators != b.generators:
        raise GeneratorMismatchError(f"Generator counts differ: {a.generators} != {b.generators}")
    rows, cols = sum(a.row_partition), sum(b.col_partition)
    if rows and cols and sum(a.col_partition):
        product = a.entries @ b.entries
    else:
        product = np.zeros((rows, cols), dtype=object)
    return SuperMatrix(a.row_partition, b.col_partition, product, a.generators, a.parity ^ b.parity)


def smat_supertranspose(a: SuperMatrix) -> SuperMatrix:
    """(X Ξ; H Y) -> (Xᵀ Hᵀ; −Ξᵀ Yᵀ)."""
    p, _ = a.row_partition
    r, _ = a.col_partition
    entries = a.entries
    out = np.empty((entries.shape[1], entries.shape[0]), dtype=object)
    for i in range(entries.shape[0]):
        for j in range(entries.shape[1]):
            value = entries[i, j]
            # Ξ sits in even rows and odd columns
            out[j, i] = -value if (i < p and j >= r) else value
    return SuperMatrix(a.col_partition, a.row_partition, out, a.generators, a.parity)


def smat_inverse_even(c: SuperMatrix) -> SuperMatrix:
    """Two-sided inverse C₀⁻¹ Σ_k (−N C₀⁻¹)^k of an even supermatrix with invertible body."""
    if c.row_partition != c.col_partition:
        raise ValueError(f"Cannot invert a non-square supermatrix {c.row_partition}x{c.col_partition}")
    if c.parity:
        raise ParityError("Only even supermatrices are inverted")
    try:
        body_inverse = inverse(c.body())
    except SingularMatrixError as exc:
        raise SingularBodyError("Grade-0 part is singular") from exc
    c0_inv = SuperMatrix.from_rational(body_inverse, c.row_partition, c.col_partition, c.generators)
    nilpotent = c - SuperMatrix.from_rational(c.body(), c.row_partition, c.col_partition, c.generators)
    step = -(nilpotent @ c0_inv)
    term = SuperMatrix.identity(c.row_partition, c.generators)
    total = term
    for _ in range(c.generators):
        term = term @ step
        if term.is_zero():
            break
        total = total + term
    return c0_inv @ total


def smat_exp_nilpotent(x: SuperMatrix) -> SuperMatrix:
    """exp(X) for an even supermatrix whose power series terminates."""
    if x.row_partition != x.col_partition or x.parity:
        raise ValueError("Exponential needs a square even supermatrix")
    bound = sum(x.row_partition) * (x.generators + 1) + 1
    term = SuperMatrix.identity(x.row_partition, x.generators)
    total = term
    for k in range(1, bound + 1):
        term = (term @ x) * Fraction(1, k)
        if term.is_zero():
            return total
        total = total + term
    raise ValueError("Exponential series does not terminate: matrix is not nilpotent")

"""
The four classical matrix Lie superalgebras gl_{m|n}, osp_{m|n}, πsp_{n|n}
and q_{n|n} over the rationals.

The ambient superspace has basis e_1 … e_m (even) followed by f_1 … f_n
(odd); matrix positions are 0-based ambient indices. For osp with m odd the
extra even vector e_0 comes first. For q the block shape (A B; B A) is inferred
from its Cartan subalgebra diag(x_1, …, x_n, x_1, …, x_n) and root list: the
series is defined abstractly as the centralizer of an odd involution.

Basis elements are ordered even first, then odd, so a coordinate vector splits
into ``dim_even`` even and ``dim_odd`` odd coordinates.
"""

from __future__ import annotations

import dataclasses
import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from grassmann import SuperMatrix, smat_supertranspose
from linalg import Subspace, inverse, rref

logger = logging.getLogger(__name__)

__all__ = [
    "LieSuperAlgebra",
    "OddSummand",
    "OutsideSpanError",
    "Root",
    "RootSpace",
    "RootSystem",
    "Series",
    "bracket",
    "build_superalgebra",
    "form_residual",
    "gr_superalgebra",
    "invariant_form",
    "jacobi_residual",
    "odd_adjoint",
    "odd_summands",
    "root_decomposition",
    "torus_element",
]

SparseMatrix = dict[tuple[int, int], Fraction]
SparseVector = dict[int, Fraction]


class OutsideSpanError(ArithmeticError):
    """A computed matrix is not in the span of the basis, or not a weight vector."""


class Series(str, Enum):
    GL = "gl"
    OSP = "osp"
    PISP = "pisp"
    Q = "q"

    def __str__(self) -> str:
        return self.value


def _unit(*entries: tuple[int, int, int]) -> SparseMatrix:
    out: SparseMatrix = {}
    for r, c, v in entries:
        out[(r, c)] = out.get((r, c), 0) + Fraction(v)
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class _Generator:
    matrix: SparseMatrix
    parity: int
    block: str
    label: str
    cartan: bool = False


def _gl_basis(m: int, n: int) -> list[_Generator]:
    size = m + n
    even, odd = [], []
    for i in range(size):
        for j in range(size):
            block = ("A" if i < m else "C") if j < m else ("B" if i < m else "D")
            bi, bj = (i if i < m else i - m) + 1, (j if j < m else j - m) + 1
            gen = _Generator(_unit((i, j, 1)), int(block in "BC"), block, f"{block}[{bi},{bj}]", i == j)
            (odd if gen.parity else even).append(gen)
    even.sort(key=lambda g: g.block != "A")
    return even + odd


def _osp_basis(m: int, n: int) -> list[_Generator]:
    p, tail = divmod(m, 2)
    q = n // 2

    def e(i: int) -> int:
        return i - 1 + tail

    def f(j: int) -> int:
        return m + j - 1

    def sym(r_base, c_base, i, j):
        return _unit((r_base(i), c_base(j), 1), (r_base(j), c_base(i), 1)) if i != j else _unit(
            (r_base(i), c_base(i), 1)
        )

    even: list[_Generator] = []
    for i in range(1, p + 1):
        for j in range(1, p + 1):
            even.append(
                _Generator(_unit((e(i), e(j), 1), (e(p + j), e(p + i), -1)), 0, "A", f"A[{i},{j}]", i == j)
            )
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            even.append(_Generator(_unit((e(i), e(p + j), 1), (e(j), e(p + i), -1)), 0, "B", f"B[{i},{j}]"))
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            even.append(_Generator(_unit((e(p + i), e(j), 1), (e(p + j), e(i), -1)), 0, "C", f"C[{i},{j}]"))
    if tail:
        for i in range(1, p + 1):
            even.append(_Generator(_unit((e(i), 0, 1), (0, e(p + i), -1)), 0, "u", f"u[{i}]"))
        for i in range(1, p + 1):
            even.append(_Generator(_unit((e(p + i), 0, 1), (0, e(i), -1)), 0, "v", f"v[{i}]"))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            even.append(
                _Generator(_unit((f(i), f(j), 1), (f(q + j), f(q + i), -1)), 0, "Y", f"Y[{i},{j}]", i == j)
            )
    for i in range(1, q + 1):
        for j in range(i, q + 1):
            even.append(_Generator(sym(f, lambda k: f(q + k), i, j), 0, "Z", f"Z[{i},{j}]"))
    for i in range(1, q + 1):
        for j in range(i, q + 1):
            even.append(_Generator(sym(lambda k: f(q + k), f, i, j), 0, "T", f"T[{i},{j}]"))

    odd: list[_Generator] = []
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            odd.append(_Generator(_unit((e(i), f(j), 1), (f(q + j), e(p + i), -1)), 1, "U", f"U[{i},{j}]"))
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            odd.append(_Generator(_unit((e(i), f(q + j), 1), (f(j), e(p + i), 1)), 1, "U1", f"U1[{i},{j}]"))
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            odd.append(_Generator(_unit((e(p + i), f(j), 1), (f(q + j), e(i), -1)), 1, "W", f"W[{i},{j}]"))
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            odd.append(_Generator(_unit((e(p + i), f(q + j), 1), (f(j), e(i), 1)), 1, "W1", f"W1[{i},{j}]"))
    if tail:
        for j in range(1, q + 1):
            odd.append(_Generator(_unit((0, f(j), 1), (f(q + j), 0, -1)), 1, "w", f"w[{j}]"))
        for j in range(1, q + 1):
            odd.append(_Generator(_unit((0, f(q + j), 1), (f(j), 0, 1)), 1, "w1", f"w1[{j}]"))
    return even + odd


def _pisp_basis(n: int) -> list[_Generator]:
    even = [
        _Generator(_unit((i, j, 1), (n + j, n + i, -1)), 0, "X", f"X[{i + 1},{j + 1}]", i == j)
        for i in range(n)
        for j in range(n)
    ]
    odd = [
        _Generator(_unit((i, n + j, 1), (j, n + i, -1)), 1, "Y", f"Y[{i + 1},{j + 1}]")
        for i in range(n)
        for j in range(i + 1, n)
    ]
    odd += [
        _Generator(
            _unit((n + i, j, 1), (n + j, i, 1)) if i != j else _unit((n + i, i, 1)), 1, "Z", f"Z[{i + 1},{j + 1}]"
        )
        for i in range(n)
        for j in range(i, n)
    ]
    return even + odd


def _q_basis(n: int) -> list[_Generator]:
    even = [
        _Generator(_unit((i, j, 1), (n + i, n + j, 1)), 0, "A", f"A[{i + 1},{j + 1}]", i == j)
        for i in range(n)
        for j in range(n)
    ]
    odd = [
        _Generator(_unit((i, n + j, 1), (n + i, j, 1)), 1, "B", f"B[{i + 1},{j + 1}]")
        for i in range(n)
        for j in range(n)
    ]
    return even + odd


def _sparse_product(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    rows_of_b: dict[int, list[tuple[int, Fraction]]] = defaultdict(list)
    for (k, c), w in b.items():
        rows_of_b[k].append((c, w))
    out: SparseMatrix = {}
    for (r, k), v in a.items():
        for c, w in rows_of_b.get(k, ()):
            out[(r, c)] = out.get((r, c), 0) + v * w
    return {pos: v for pos, v in out.items() if v}


def _supercommutator(a: SparseMatrix, pa: int, b: SparseMatrix, pb: int) -> SparseMatrix:
    sign = -1 if pa and pb else 1
    out = dict(_sparse_product(a, b))
    for pos, v in _sparse_product(b, a).items():
        out[pos] = out.get(pos, 0) - sign * v
    return {pos: v for pos, v in out.items() if v}


@dataclass(frozen=True, eq=False)
class LieSuperAlgebra:
    """A Lie superalgebra realized by ambient matrices, or by a bracket table.

    When ``table`` is set the bracket comes from it instead of matrix
    supercommutators; the basis matrices then only describe the underlying
    graded vector space.
    """

    series: Series
    m: int
    n: int
    basis: tuple[SparseMatrix, ...]
    parity: tuple[int, ...]
    blocks: tuple[str, ...]
    labels: tuple[str, ...]
    cartan: tuple[int, ...]
    table: Mapping[tuple[int, int], SparseVector] | None = None

    @property
    def name(self) -> str:
        prefix = "gr " if self.table is not None else ""
        return f"{prefix}{self.series.value}({self.m}|{self.n})"

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def dim_even(self) -> int:
        return self.parity.count(0)

    @property
    def dim_odd(self) -> int:
        return self.parity.count(1)

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_even, self.dim_odd

    @property
    def even_indices(self) -> range:
        return range(self.dim_even)

    @property
    def odd_indices(self) -> range:
        return range(self.dim_even, self.dim)

    def matrix(self, index: int) -> np.ndarray:
        return self.element_matrix({index: Fraction(1)})

    def element_matrix(self, coords: Sequence | Mapping[int, Fraction]) -> np.ndarray:
        out = np.full((self.size, self.size), Fraction(0), dtype=object)
        for t, c in _items(coords):
            for (r, col), v in self.basis[t].items():
                out[r, col] += c * v
        return out

    @cached_property
    def _solver(self) -> tuple[tuple[tuple[int, int], ...], dict[tuple[int, int], SparseVector]]:
        positions = sorted({pos for matrix in self.basis for pos in matrix})
        where = {pos: i for i, pos in enumerate(positions)}
        rows = [{where[pos]: v for pos, v in matrix.items()} for matrix in self.basis]
        _, pivots = rref(rows, len(positions))
        if len(pivots) != self.dim:
            raise ValueError(f"Basis of {self.name} is linearly dependent")
        chosen = [positions[i] for i in pivots]
        square = np.empty((self.dim, self.dim), dtype=object)
        for row, pos in enumerate(chosen):
            for t, matrix in enumerate(self.basis):
                square[row, t] = matrix.get(pos, Fraction(0))
        inv = inverse(square)
        columns = {
            pos: {t: inv[t, row] for t in range(self.dim) if inv[t, row]} for row, pos in enumerate(chosen)
        }
        return tuple(chosen), columns

    def coordinates(self, matrix: Mapping[tuple[int, int], Fraction] | np.ndarray) -> tuple[Fraction, ...]:
        """Expand an ambient matrix in the basis."""
        sparse = _as_sparse(matrix)
        _, columns = self._solver
        coords: SparseVector = {}
        for pos, value in sparse.items():
            for t, w in columns.get(pos, {}).items():
                coords[t] = coords.get(t, 0) + value * w
        rebuilt: SparseMatrix = {}
        for t, c in coords.items():
            for pos, v in self.basis[t].items():
                rebuilt[pos] = rebuilt.get(pos, 0) + c * v
        if {k: v for k, v in rebuilt.items() if v} != sparse:
            raise OutsideSpanError(f"Matrix is not in the span of the basis of {self.name}")
        return tuple(coords.get(t, Fraction(0)) for t in range(self.dim))

    @cached_property
    def structure_constants(self) -> dict[tuple[int, int], SparseVector]:
        """Nonzero brackets of basis pairs, expanded in the basis."""
        if self.table is not None:
            return {key: dict(value) for key, value in self.table.items() if value}
        out: dict[tuple[int, int], SparseVector] = {}
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                product = _supercommutator(a, self.parity[i], b, self.parity[j])
                if product:
                    coords = self.coordinates(product)
                    out[(i, j)] = {k: v for k, v in enumerate(coords) if v}
        logger.debug("%s: %d nonzero basis brackets", self.name, len(out))
        return out

    def basis_bracket(self, i: int, j: int) -> SparseVector:
        return dict(self.structure_constants.get((i, j), {}))

    def sparse_bracket(self, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> SparseVector:
        table = self.structure_constants
        out: SparseVector = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in table.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v}

    def element_parity(self, coords: Sequence | Mapping[int, Fraction]) -> int | None:
        parities = {self.parity[t] for t, c in _items(coords) if c}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None


def _items(coords: Sequence | Mapping[int, Fraction]) -> Iterable[tuple[int, Fraction]]:
    if isinstance(coords, Mapping):
        return coords.items()
    return enumerate(coords)


def _as_sparse(matrix: Mapping[tuple[int, int], Fraction] | np.ndarray) -> SparseMatrix:
    if isinstance(matrix, np.ndarray):
        return {(int(r), int(c)): Fraction(v) for (r, c), v in np.ndenumerate(matrix) if v}
    return {pos: Fraction(v) for pos, v in matrix.items() if v}


@lru_cache(maxsize=None)
def build_superalgebra(series: Series, m: int, n: int) -> LieSuperAlgebra:
    series = Series(series)
    if m < 0 or n < 0 or m + n == 0:
        raise ValueError(f"Invalid dimensions ({m}|{n}) for {series.value}")
    if series is Series.GL:
        generators = _gl_basis(m, n)
    elif series is Series.OSP:
        if n % 2:
            raise ValueError(f"osp needs an even odd dimension, got n = {n}")
        generators = _osp_basis(m, n)
    elif m != n:
        raise ValueError(f"{series.value} needs m = n, got ({m}|{n})")
    elif series is Series.PISP:
        generators = _pisp_basis(n)
    else:
        generators = _q_basis(n)
    algebra = LieSuperAlgebra(
        series=series,
        m=m,
        n=n,
        basis=tuple(g.matrix for g in generators),
        parity=tuple(g.parity for g in generators),
        blocks=tuple(g.block for g in generators),
        labels=tuple(g.label for g in generators),
        cartan=tuple(i for i, g in enumerate(generators) if g.cartan),
    )
    logger.debug("Built %s with dims %s", algebra.name, algebra.dims)
    return algebra


def bracket(g: LieSuperAlgebra, x: Sequence | Mapping[int, Fraction], y: Sequence | Mapping[int, Fraction]):
    """Supercommutator of two homogeneous elements given by basis coordinates."""
    if g.element_parity(x) is None or g.element_parity(y) is None:
        raise ValueError("bracket needs homogeneous elements")
    result = g.sparse_bracket(dict(_items(x)), dict(_items(y)))
    return tuple(result.get(t, Fraction(0)) for t in range(g.dim))


def jacobi_residual(g: LieSuperAlgebra, i: int, j: int, k: int) -> SparseVector:
    """[X,[Y,Z]] − [[X,Y],Z] − (−1)^{|X||Y|} [Y,[X,Z]] on basis elements."""
    x, y, z = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
    sign = -1 if g.parity[i] and g.parity[j] else 1
    out = g.sparse_bracket(x, g.sparse_bracket(y, z))
    for t, v in g.sparse_bracket(g.sparse_bracket(x, y), z).items():
        out[t] = out.get(t, 0) - v
    for t, v in g.sparse_bracket(y, g.sparse_bracket(x, z)).items():
        out[t] = out.get(t, 0) - sign * v
    return {t: v for t, v in out.items() if v}


def gr_superalgebra(g: LieSuperAlgebra) -> LieSuperAlgebra:
    """Same graded space; the bracket of two odd elements is set to zero."""
    table = {
        (i, j): dict(value)
        for (i, j), value in g.structure_constants.items()
        if not (g.parity[i] and g.parity[j])
    }
    return dataclasses.replace(g, table=table)


def invariant_form(series: Series, m: int, n: int, generators: int = 0) -> SuperMatrix | None:
    """Γ for osp (even form) and Υ for πsp (odd form); None for the other series."""
    series = Series(series)
    size = m + n
    form = np.zeros((size, size), dtype=object)
    if series is Series.OSP:
        p, tail = divmod(m, 2)
        q = n // 2
        if tail:
            form[0, 0] = 1
        for i in range(p):
            form[tail + i, tail + p + i] = form[tail + p + i, tail + i] = 1
        for j in range(q):
            form[m + j, m + q + j] = 1
            form[m + q + j, m + j] = -1
        return SuperMatrix.from_rational(form, (m, n), (m, n), generators)
    if series is Series.PISP:
        for i in range(n):
            form[i, n + i] = 1
            form[n + i, i] = -1
        return SuperMatrix.from_rational(form, (n, n), (n, n), generators, parity=1)
    return None


def form_residual(g: LieSuperAlgebra, index: int) -> SuperMatrix:
    """X^{ST}F + (−1)^{|X|}FX for osp, X^{ST}F + FX for πsp; zero on every basis element."""
    form = invariant_form(g.series, g.m, g.n)
    if form is None:
        raise ValueError(f"{g.series.value} does not preserve a bilinear form")
    element = SuperMatrix.from_rational(g.matrix(index), (g.m, g.n), (g.m, g.n), 0, parity=g.parity[index])
    left = smat_supertranspose(element) @ form
    right = form @ element
    if g.series is Series.OSP and g.parity[index]:
        return left - right
    return left + right


@dataclass(frozen=True)
class Root:
    """A linear functional on the Cartan coordinates with a parity."""

    coeffs: tuple[int, ...]
    parity: int

    def evaluate(self, point: Sequence[int | Fraction]) -> int | Fraction:
        if len(point) != len(self.coeffs):
            raise ValueError(f"Point of length {len(point)} for a root on {len(self.coeffs)} coordinates")
        return np.dot(np.array(self.coeffs, dtype=object), np.array(point, dtype=object))

    def label(self, names: Sequence[str]) -> str:
        parts = []
        for coef, name in zip(self.coeffs, names):
            if not coef:
                continue
            sign = "-" if coef < 0 else "+"
            size = abs(coef)
            parts.append(f"{sign}{'' if size == 1 else size}{name}")
        text = "".join(parts) or "0"
        return text[1:] if text.startswith("+") else text

    def __neg__(self) -> Root:
        return Root(tuple(-c for c in self.coeffs), self.parity)


@dataclass(frozen=True)
class RootSpace:
    root: Root
    indices: tuple[int, ...]


@dataclass(frozen=True)
class RootSystem:
    """Cartan, the odd zero-weight space and the nonzero root spaces."""

    coordinates: tuple[str, ...]
    cartan: tuple[int, ...]
    zero_odd: tuple[int, ...]
    spaces: tuple[RootSpace, ...]

    def roots(self, parity: int | None = None) -> list[Root]:
        return [s.root for s in self.spaces if parity is None or s.root.parity == parity]

    def labels(self, parity: int | None = None) -> list[str]:
        return [r.label(self.coordinates) for r in self.roots(parity)]

    def nonnegative_indices(self, point: Sequence[int | Fraction]) -> list[int]:
        chosen = [*self.cartan, *self.zero_odd]
        for space in self.spaces:
            if space.root.evaluate(point) >= 0:
                chosen.extend(space.indices)
        return sorted(chosen)


def coordinate_names(g: LieSuperAlgebra) -> tuple[str, ...]:
    if g.series is Series.GL:
        return tuple(f"x{i}" for i in range(1, g.m + 1)) + tuple(f"y{j}" for j in range(1, g.n + 1))
    if g.series is Series.OSP:
        return tuple(f"x{i}" for i in range(1, g.m // 2 + 1)) + tuple(f"y{j}" for j in range(1, g.n // 2 + 1))
    return tuple(f"x{i}" for i in range(1, g.n + 1))


@lru_cache(maxsize=None)
def root_decomposition(g: LieSuperAlgebra) -> RootSystem:
    """Simultaneous eigenspaces of ad(t) on the basis."""
    buckets: dict[Root, list[int]] = defaultdict(list)
    zero_odd = []
    for t in range(g.dim):
        weights = []
        for c in g.cartan:
            image = g.basis_bracket(c, t)
            if set(image) - {t}:
                raise OutsideSpanError(f"{g.labels[t]} is not a weight vector of {g.name}")
            value = image.get(t, Fraction(0))
            if value.denominator != 1:
                raise OutsideSpanError(f"Non-integral weight on {g.labels[t]}")
            weights.append(int(value))
        if t in g.cartan:
            if any(weights):
                raise OutsideSpanError(f"Cartan of {g.name} is not abelian")
            continue
        if not any(weights):
            if not g.parity[t]:
                raise OutsideSpanError(f"Even zero-weight vector {g.labels[t]} outside the Cartan")
            zero_odd.append(t)
            continue
        buckets[Root(tuple(weights), g.parity[t])].append(t)
    spaces = tuple(
        RootSpace(root, tuple(indices))
        for root, indices in sorted(buckets.items(), key=lambda item: (item[0].parity, item[1][0]))
    )
    return RootSystem(coordinate_names(g), tuple(g.cartan), tuple(zero_odd), spaces)


@dataclass(frozen=True)
class OddSummand:
    """A g_0̄-invariant summand of g_1̄, in odd coordinates."""

    name: str
    indices: tuple[int, ...]
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim


_SUMMAND_BLOCKS = {
    Series.GL: (("V1", {"B"}), ("V2", {"C"})),
    Series.PISP: (("V1", {"Z"}), ("V2", {"Y"})),
}


@lru_cache(maxsize=None)
def odd_summands(g: LieSuperAlgebra) -> tuple[OddSummand, ...]:
    """The invariant decomposition of g_1̄ used by the per-summand injectivity check."""
    if g.series is Series.OSP and g.m == 2:
        groups = (("V1", {"W", "W1"}), ("V2", {"U", "U1"}))
    else:
        groups = _SUMMAND_BLOCKS.get(g.series, (("V", None),))
    offset = g.dim_even
    summands = []
    for name, blocks in groups:
        indices = tuple(t - offset for t in g.odd_indices if blocks is None or g.blocks[t] in blocks)
        if indices:
            summands.append(OddSummand(name, indices, Subspace.spanned_by_units(g.dim_odd, indices)))
    return tuple(summands)


@lru_cache(maxsize=None)
def odd_adjoint(g: LieSuperAlgebra) -> tuple[dict[int, SparseVector], ...]:
    """For each even basis element X, ad(X) on g_1̄ as {column: {row: value}} in odd coordinates."""
    offset = g.dim_even
    maps = []
    for a in g.even_indices:
        columns = {}
        for t in g.odd_indices:
            image = g.basis_bracket(a, t)
            if image:
                columns[t - offset] = {k - offset: v for k, v in image.items()}
        maps.append(columns)
    return tuple(maps)


def torus_element(g: LieSuperAlgebra, values: Sequence[int | Fraction]) -> np.ndarray:
    """Diagonal group element exp(t) with e^{x_c} replaced by the rational ``values[c]``."""
    if len(values) != len(g.cartan):
        raise ValueError(f"Expected {len(g.cartan)} torus values, got {len(values)}")
    diagonal = [Fraction(1)] * g.size
    for value, c in zip(values, g.cartan):
        value = Fraction(value)
        if not value:
            raise ValueError("Torus values must be nonzero")
        for (r, col), exponent in g.basis[c].items():
            diagonal[r] *= value ** int(exponent)
    out = np.zeros((g.size, g.size), dtype=object)
    for r, v in enumerate(diagonal):
        out[r, r] = v
    return out

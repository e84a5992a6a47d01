"""
Flag types, weight tuples and the two descriptions of a flag stabilizer:
the parabolic subalgebra cut out by nonnegative roots, and the stabilizer of
the base point solved directly from X(V_i) ⊂ V_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from linalg import Subspace, nullspace
from superalgebra import LieSuperAlgebra, Series, build_superalgebra, root_decomposition

logger = logging.getLogger(__name__)

__all__ = [
    "FlagType",
    "Subalgebra",
    "WeightTuple",
    "base_point",
    "chart_dimension",
    "enumerate_flag_types",
    "in_parabolic_window",
    "parabolic_from_weights",
    "satisfies_chain",
    "stabilizer_direct",
    "supermanifold_dimension",
    "weight_tuple",
]

Flag = tuple[tuple[int, ...], ...]


@dataclass(frozen=True, order=True)
class FlagType:
    """Series, ambient (m|n) and the stage dimensions (k|l) of a flag."""

    series: Series
    m: int
    n: int
    k: tuple[int, ...]
    l: tuple[int, ...]  # noqa: E741

    def __post_init__(self):
        object.__setattr__(self, "series", Series(self.series))
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        object.__setattr__(self, "l", tuple(int(v) for v in self.l))
        self._validate()

    def _validate(self) -> None:
        m, n, k, l = self.m, self.n, self.k, self.l  # noqa: E741
        if not k or len(k) != len(l):
            raise ValueError(f"k and l must be nonempty tuples of equal length, got {k} and {l}")
        if self.series is Series.OSP and n % 2:
            raise ValueError(f"osp needs an even odd dimension, got n = {n}")
        if self.series in (Series.PISP, Series.Q) and m != n:
            raise ValueError(f"{self.series.value} needs m = n, got ({m}|{n})")
        if m < 0 or n < 0 or m + n == 0:
            raise ValueError(f"Invalid ambient dimensions ({m}|{n})")
        if any(a < b for a, b in zip(k, k[1:])) or not 0 <= k[-1] <= k[0] <= m:
            raise ValueError(f"k must satisfy 0 <= k_r <= ... <= k_1 <= {m}, got {k}")
        if any(a < b for a, b in zip(l, l[1:])) or not 0 <= l[-1] <= l[0] <= n:
            raise ValueError(f"l must satisfy 0 <= l_r <= ... <= l_1 <= {n}, got {l}")
        totals = [a + b for a, b in zip(k, l)]
        if any(a <= b for a, b in zip(totals, totals[1:])) or not 0 < totals[-1] <= totals[0] < m + n:
            raise ValueError(f"Stage dimensions must satisfy 0 < k_r + l_r < ... < k_1 + l_1 < {m + n}")
        if self.series is Series.OSP and (k[0] > m // 2 or l[0] > n // 2):
            raise ValueError(f"osp flags are isotropic: need k_1 <= {m // 2} and l_1 <= {n // 2}")
        if self.series is Series.PISP and k[0] + l[0] > n:
            raise ValueError(f"pisp flags are isotropic: need k_1 + l_1 <= {n}")
        if self.series is Series.Q and k != l:
            raise ValueError(f"q flags need k = l, got {k} and {l}")

    @property
    def r(self) -> int:
        return len(self.k)

    def stages(self) -> list[tuple[int, int]]:
        """(k_s, l_s) for s = 0 … r with (k_0, l_0) = (m, n)."""
        return [(self.m, self.n), *zip(self.k, self.l)]

    def refine(self, k: int, l: int) -> FlagType:  # noqa: E741
        return FlagType(self.series, self.m, self.n, (*self.k, k), (*self.l, l))

    @property
    def label(self) -> str:
        ks = ",".join(map(str, self.k))
        ls = ",".join(map(str, self.l))
        return f"{self.series.value}({self.m}|{self.n}) ({ks}|{ls})"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class WeightTuple:
    a: tuple[int, ...]
    b: tuple[int, ...] = ()

    @property
    def point(self) -> tuple[int, ...]:
        """The weights as a point in the Cartan coordinates (x…, y…)."""
        return (*self.a, *self.b)


def _stage_counts(values: Sequence[int], length: int) -> tuple[int, ...]:
    return tuple(sum(1 for v in values if i <= v) for i in range(1, length + 1))


def weight_tuple(ft: FlagType) -> WeightTuple:
    if ft.series is Series.GL:
        return WeightTuple(_stage_counts(ft.k, ft.m), _stage_counts(ft.l, ft.n))
    if ft.series is Series.OSP:
        return WeightTuple(_stage_counts(ft.k, ft.m // 2), _stage_counts(ft.l, ft.n // 2))
    if ft.series is Series.PISP:
        positive = _stage_counts(ft.k, ft.n)
        # f_{n-l_s+1} … f_n sit in stage s, counted from the end
        negative = tuple(reversed(_stage_counts(ft.l, ft.n)))
        return WeightTuple(tuple(p - q for p, q in zip(positive, negative)))
    return WeightTuple(_stage_counts(ft.k, ft.n))


def satisfies_chain(ft: FlagType, w: WeightTuple) -> bool:
    """Check the per-series chain of equalities and strict inequalities."""
    if ft.series is Series.PISP:
        return _pisp_chain(ft, w)
    if ft.series is Series.GL:
        lengths = (ft.m, ft.n)
    elif ft.series is Series.OSP:
        lengths = (ft.m // 2, ft.n // 2)
    else:
        lengths = (ft.n, 0)
        if w.b:
            return False
    if (len(w.a), len(w.b)) != lengths:
        return False
    groups: dict[int, set[int]] = {}
    for values, bounds in ((w.a, ft.k), (w.b, ft.l if ft.series is not Series.Q else ())):
        for i, value in enumerate(values, start=1):
            stage = sum(1 for bound in bounds if i <= bound)
            groups.setdefault(stage, set()).add(value)
    if any(len(values) != 1 for values in groups.values()):
        return False
    ordered = [groups[s].pop() for s in sorted(groups)]
    if any(a >= b for a, b in zip(ordered, ordered[1:])):
        return False
    if ft.series is Series.OSP and 0 in groups:
        return ordered[0] == 0
    return True


def _pisp_chain(ft: FlagType, w: WeightTuple) -> bool:
    n = ft.n
    if len(w.a) != n or w.b:
        return False
    groups: dict[int, set[int]] = {}
    for i, value in enumerate(w.a, start=1):
        positive = sum(1 for bound in ft.k if i <= bound)
        negative = sum(1 for bound in ft.l if i >= n - bound + 1)
        if positive and value <= 0 or negative and value >= 0:
            return False
        groups.setdefault(positive or negative, set()).add(abs(value))
    if any(len(values) != 1 for values in groups.values()):
        return False
    ordered = [groups[s].pop() for s in sorted(groups)]
    if 0 in groups and ordered[0] != 0:
        return False
    return all(a < b for a, b in zip(ordered, ordered[1:]))


def base_point(ft: FlagType) -> Flag:
    """Ambient index sets of V_1, …, V_r at the origin of the distinguished chart."""
    m, n = ft.m, ft.n
    flag = []
    for k, l in zip(ft.k, ft.l):  # noqa: E741
        if ft.series is Series.OSP:
            even = range(m % 2, m % 2 + k)
        else:
            even = range(k)
        if ft.series is Series.PISP:
            odd = range(m + n - l, m + n)
        else:
            odd = range(m, m + l)
        flag.append(tuple(even) + tuple(odd))
    return tuple(flag)


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """Even and odd parts of a subspace of ``parent``, in its even / odd coordinates."""

    parent: LieSuperAlgebra
    even: Subspace
    odd: Subspace
    origin: str = field(default="")

    @property
    def dims(self) -> tuple[int, int]:
        return self.even.dim, self.odd.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subalgebra):
            return NotImplemented
        return self.parent is other.parent and self.even == other.even and self.odd == other.odd

    __hash__ = None

    def issubspace(self, other: Subalgebra) -> bool:
        return self.even.issubspace(other.even) and self.odd.issubspace(other.odd)

    def basis_vectors(self) -> list[dict[int, Fraction]]:
        """Basis in the parent's full coordinates."""
        offset = self.parent.dim_even
        vectors = [{i: v for i, v in enumerate(row) if v} for row in self.even.basis]
        vectors += [{offset + i: v for i, v in enumerate(row) if v} for row in self.odd.basis]
        return vectors

    def contains(self, coords: dict[int, Fraction]) -> bool:
        offset = self.parent.dim_even
        even = {i: v for i, v in coords.items() if i < offset}
        odd = {i - offset: v for i, v in coords.items() if i >= offset}
        return self.even.contains(even) and self.odd.contains(odd)

    def contains_cartan(self) -> bool:
        return all(self.even.contains({c: Fraction(1)}) for c in self.parent.cartan)

    def is_closed(self) -> bool:
        vectors = self.basis_vectors()
        for i, x in enumerate(vectors):
            for y in vectors[i:]:
                if not self.contains(self.parent.sparse_bracket(x, y)):
                    return False
        return True


def _split_units(g: LieSuperAlgebra, indices: Sequence[int]) -> tuple[Subspace, Subspace]:
    offset = g.dim_even
    even = Subspace.spanned_by_units(g.dim_even, [t for t in indices if t < offset])
    odd = Subspace.spanned_by_units(g.dim_odd, [t - offset for t in indices if t >= offset])
    return even, odd


def parabolic_from_weights(g: LieSuperAlgebra, w: WeightTuple) -> Subalgebra:
    """Cartan plus every root space with nonnegative value at the weights."""
    indices = root_decomposition(g).nonnegative_indices(w.point)
    even, odd = _split_units(g, indices)
    return Subalgebra(g, even, odd, origin="weights")


@lru_cache(maxsize=None)
def _position_index(g: LieSuperAlgebra) -> dict[tuple[int, int], list[tuple[int, Fraction]]]:
    index: dict[tuple[int, int], list[tuple[int, Fraction]]] = {}
    for t, matrix in enumerate(g.basis):
        for pos, value in matrix.items():
            index.setdefault(pos, []).append((t, value))
    return index


def stabilizer_direct(g: LieSuperAlgebra, flag: Flag) -> Subalgebra:
    """Solve X(V_i) ⊂ V_i for X in the span of the basis."""
    forbidden = set()
    for subspace in flag:
        inside = set(subspace)
        outside = [r for r in range(g.size) if r not in inside]
        forbidden.update((r, c) for c in inside for r in outside)
    index = _position_index(g)
    offset = g.dim_even
    equations: tuple[list, list] = ([], [])
    for pos in sorted(forbidden):
        entries = index.get(pos)
        if not entries:
            continue
        parity = g.parity[entries[0][0]]
        shift = offset if parity else 0
        equations[parity].append({t - shift: v for t, v in entries})
    even = Subspace.from_vectors(g.dim_even, nullspace(equations[0], g.dim_even))
    odd = Subspace.from_vectors(g.dim_odd, nullspace(equations[1], g.dim_odd))
    logger.debug("Stabilizer in %s: %d equations, dims (%d|%d)", g.name, len(forbidden), even.dim, odd.dim)
    return Subalgebra(g, even, odd, origin="stabilizer")


def in_parabolic_window(ft: FlagType) -> bool:
    """Whether the weight description is known to agree with the stabilizer."""
    if ft.series is Series.OSP:
        return ft.m >= 1 and ft.n >= 2
    if ft.series is Series.PISP:
        return ft.n >= 2
    return True


def supermanifold_dimension(ft: FlagType) -> tuple[int, int]:
    """(dim g_0̄ − dim h_0̄ | dim g_1̄ − dim h_1̄) for the stabilizer h of the base point."""
    g = build_superalgebra(ft.series, ft.m, ft.n)
    h = stabilizer_direct(g, base_point(ft))
    return g.dim_even - h.even.dim, g.dim_odd - h.odd.dim


def chart_dimension(ft: FlagType) -> tuple[int, int]:
    """Even and odd coordinate counts of one chart of the ambient gl flag supermanifold."""
    even = odd = 0
    stages = ft.stages()
    for (k_prev, l_prev), (k, l) in zip(stages, stages[1:]):  # noqa: E741
        even += (k_prev - k) * k + (l_prev - l) * l
        odd += (k_prev - k) * l + (l_prev - l) * k
    return even, odd


def _stage_pairs(series: Series, m: int, n: int) -> list[tuple[int, int]]:
    pairs = []
    for k, l in product(range(m + 1), range(n + 1)):  # noqa: E741
        if not 0 < k + l < m + n:
            continue
        if series is Series.OSP and (k > m // 2 or l > n // 2):
            continue
        if series is Series.PISP and k + l > n:
            continue
        if series is Series.Q and k != l:
            continue
        pairs.append((k, l))
    return pairs


def _chains(pairs: list[tuple[int, int]], prefix: list[tuple[int, int]], max_r: int) -> Iterator[list]:
    if prefix:
        yield list(prefix)
    if len(prefix) == max_r:
        return
    for k, l in pairs:  # noqa: E741
        if prefix:
            pk, pl = prefix[-1]
            if k > pk or l > pl or k + l >= pk + pl:
                continue
        prefix.append((k, l))
        yield from _chains(pairs, prefix, max_r)
        prefix.pop()


def _dimensions(series: Series, max_m: int, max_n: int) -> list[tuple[int, int]]:
    if series is Series.GL:
        return [(m, n) for m in range(1, max_m + 1) for n in range(1, max_n + 1)]
    if series is Series.OSP:
        return [(m, n) for m in range(1, max_m + 1) for n in range(2, max_n + 1, 2)]
    return [(n, n) for n in range(1, min(max_m, max_n) + 1)]


def enumerate_flag_types(series: Series, max_m: int, max_n: int, max_r: int) -> list[FlagType]:
    """Every valid flag type within the bounds, sorted by (m, n, k, l)."""
    series = Series(series)
    found = []
    for m, n in _dimensions(series, max_m, max_n):
        for chain in _chains(_stage_pairs(series, m, n), [], max_r):
            k = tuple(c[0] for c in chain)
            l = tuple(c[1] for c in chain)  # noqa: E741
            found.append(FlagType(series, m, n, k, l))
    return sorted(found)

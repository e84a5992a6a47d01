"""
H^0 of the structure sheaf of a flag supermanifold, computed two ways.

The generic route takes the odd part h_1 of the base-point stabilizer, its
annihilator S = Ann(h_1) inside the dual of g_1, and the largest
g_0-invariant subspace W of S; the answer is the exterior algebra on W. The
closed-form route reads the answer off the weight tuple, one rule per series.
Both land in an ``H0Result`` holding d = dim W.

Usage::

    record = classify_record(FlagType(Series.GL, 2, 1, (2,), (0,)))
    record.generator_dim, record.closed_form_dim   # (2, 2)
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from linalg import Span, Subspace
from parabolic import (
    FlagType,
    Subalgebra,
    base_point,
    enumerate_flag_types,
    stabilizer_direct,
    weight_tuple,
)
from superalgebra import LieSuperAlgebra, Series, build_superalgebra, odd_adjoint, odd_summands

logger = logging.getLogger(__name__)

__all__ = [
    "ClassificationRecord",
    "DualModule",
    "H0Result",
    "HypothesisError",
    "InjectivityReport",
    "annihilator",
    "classify_h0",
    "classify_record",
    "closed_form_h0",
    "gl_split_shape",
    "in_closed_form_window",
    "is_invariant",
    "summand_injectivity",
    "max_invariant_submodule",
    "odd_part",
    "sweep",
]


class HypothesisError(ValueError):
    """The closed-form rule does not cover this flag type."""


@dataclass(frozen=True)
class H0Result:
    """H^0 ≅ ⋀(d); d = 0 means the constants."""

    generator_dim: int
    case: str = "generic"

    @property
    def dimension(self) -> int:
        return 2**self.generator_dim


@dataclass(frozen=True)
class DualModule:
    """A subspace of the dual of g_1, in the dual basis of the odd coordinates."""

    parent: LieSuperAlgebra
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def act(self, a: int, w: Iterable[Fraction] | dict[int, Fraction]) -> dict[int, Fraction]:
        """(X_a · w)(v) = −w([X_a, v]) for the a-th even basis element."""
        w = w if isinstance(w, dict) else {i: c for i, c in enumerate(w) if c}
        out: dict[int, Fraction] = {}
        for col, column in odd_adjoint(self.parent)[a].items():
            value = -sum((w.get(row, 0) * v for row, v in column.items()), Fraction(0))
            if value:
                out[col] = value
        return out


def odd_part(s: Subalgebra) -> Subspace:
    return s.odd


def annihilator(g: LieSuperAlgebra, h1: Subspace) -> DualModule:
    if h1.ambient != g.dim_odd:
        raise ValueError(f"Expected a subspace of the {g.dim_odd}-dimensional odd part, got ambient {h1.ambient}")
    return DualModule(g, h1.annihilator())


def _invariant_closure(g: LieSuperAlgebra, seed: Iterable) -> tuple[Span, list[int]]:
    """Smallest ad(g_0)-invariant subspace of g_1 containing ``seed``, with its growth per level."""
    adjoint = odd_adjoint(g)
    span = Span(g.dim_odd)
    frontier = []
    for vector in seed:
        sparse = vector if isinstance(vector, dict) else {i: c for i, c in enumerate(vector) if c}
        row = span.add(sparse)
        if row is not None:
            frontier.append(row)
    levels = [len(span)]
    while frontier:
        fresh = []
        for vector in frontier:
            for columns in adjoint:
                image: dict[int, Fraction] = {}
                for col, c in vector.items():
                    for row, v in columns.get(col, {}).items():
                        image[row] = image.get(row, 0) + c * v
                row = span.add({i: v for i, v in image.items() if v})
                if row is not None:
                    fresh.append(row)
        frontier = fresh
        if fresh:
            levels.append(len(span))
    return span, levels


def max_invariant_submodule(g: LieSuperAlgebra, S: DualModule) -> DualModule:
    """Largest g_0-invariant subspace of S.

    W is coadjoint-invariant exactly when Ann(W) ⊂ g_1 is ad-invariant, so W
    is the annihilator of the invariant closure of Ann(S). The closure grows
    level by level, U_{i+1} = U_i + g_0·U_i, which is the descending chain
    W_{i+1} = {w ∈ W_i : g_0·w ⊂ W_i} read through the annihilator.
    """
    span, levels = _invariant_closure(g, S.space.annihilator().basis)
    logger.debug("%s: invariant chain dims %s", g.name, [g.dim_odd - u for u in levels])
    return DualModule(g, span.to_subspace().annihilator())


def is_invariant(g: LieSuperAlgebra, W: DualModule) -> bool:
    return all(W.space.contains(W.act(a, w)) for w in W.space.basis for a in g.even_indices)


def _stabilizer(ft: FlagType) -> tuple[LieSuperAlgebra, Subalgebra]:
    g = build_superalgebra(ft.series, ft.m, ft.n)
    return g, stabilizer_direct(g, base_point(ft))


def classify_h0(ft: FlagType) -> H0Result:
    g, h = _stabilizer(ft)
    W = max_invariant_submodule(g, annihilator(g, odd_part(h)))
    return H0Result(W.dim)


def in_closed_form_window(ft: FlagType) -> bool:
    if ft.series is Series.OSP:
        return ft.m >= 1 and ft.n >= 2
    return True


def closed_form_h0(ft: FlagType) -> H0Result:
    """The per-series weight rule."""
    if not in_closed_form_window(ft):
        raise HypothesisError(f"No closed form for {ft.label}: osp needs m >= 1 and n >= 2")
    w = weight_tuple(ft)
    if ft.series is Series.GL:
        if ft.m * ft.n == 0:
            return H0Result(0, "gl: purely even or purely odd")
        if min(w.a) > max(w.b):
            return H0Result(ft.m * ft.n, "gl: a > b")
        if min(w.b) > max(w.a):
            return H0Result(ft.m * ft.n, "gl: b > a")
        return H0Result(0, "gl: C")
    if ft.series is Series.OSP:
        if ft.m == 2 and w.a[0] > max(w.b) and min(w.b) >= 0:
            return H0Result(ft.n, "osp(2|n): a_1 > b")
        return H0Result(0, "osp: C")
    if ft.series is Series.PISP:
        n, a = ft.n, w.a
        prefix = "pisp(1|1)" if n == 1 else "pisp"
        if all(a[i] + a[j] > 0 for i in range(n) for j in range(i, n)):
            return H0Result(n * (n + 1) // 2, f"{prefix}: a_i + a_j > 0")
        if all(a[i] + a[j] < 0 for i in range(n) for j in range(i + 1, n)):
            return H0Result(n * (n - 1) // 2, f"{prefix}: a_i + a_j < 0")
        return H0Result(0, f"{prefix}: C")
    return H0Result(0, "q: C")


def gl_split_shape(ft: FlagType) -> bool:
    """Some stage equals (m|0) or (0|n)."""
    if ft.series is not Series.GL:
        raise ValueError(f"gl_split_shape applies to gl flags only, got {ft.series.value}")
    return any((k, l) in ((ft.m, 0), (0, ft.n)) for k, l in zip(ft.k, ft.l))  # noqa: E741


@dataclass(frozen=True)
class InjectivityReport:
    summands: tuple[tuple[str, int, bool], ...]
    generator_dim: int

    @property
    def injective(self) -> tuple[str, ...]:
        return tuple(name for name, _, ok in self.summands if ok)

    @property
    def consistent(self) -> bool:
        """No injective summand forces d = 0."""
        return bool(self.injective) or self.generator_dim == 0


def _injectivity(g: LieSuperAlgebra, h1: Subspace, generator_dim: int) -> InjectivityReport:
    rows = []
    for summand in odd_summands(g):
        meet = h1.dim + summand.dim - h1.join(summand.space).dim
        rows.append((summand.name, summand.dim, meet == 0))
    return InjectivityReport(tuple(rows), generator_dim)


def summand_injectivity(ft: FlagType) -> InjectivityReport:
    """Which odd summands meet h_1 trivially."""
    g, h = _stabilizer(ft)
    W = max_invariant_submodule(g, annihilator(g, h.odd))
    report = _injectivity(g, h.odd, W.dim)
    if not report.consistent:
        logger.warning("%s: no injective summand but d = %d", ft.label, W.dim)
    return report


@dataclass(frozen=True)
class ClassificationRecord:
    flag: FlagType
    generator_dim: int
    closed_form_dim: int | None
    case: str
    stabilizer_dims: tuple[int, int]
    supermanifold_dim: tuple[int, int]
    h1_in_w_perp: bool
    injectivity: InjectivityReport
    free_odd_check: bool

    @property
    def agree(self) -> bool:
        return self.closed_form_dim is None or self.closed_form_dim == self.generator_dim

    @property
    def ok(self) -> bool:
        return self.agree and self.injectivity.consistent and self.free_odd_check and self.h1_in_w_perp

    def as_dict(self) -> dict:
        """Fields in their fixed output order."""
        ft = self.flag
        return {
            "series": ft.series.value,
            "m": ft.m,
            "n": ft.n,
            "k": list(ft.k),
            "l": list(ft.l),
            "generator_dim": self.generator_dim,
            "dimension": 2**self.generator_dim,
            "closed_form_dim": self.closed_form_dim,
            "case": self.case,
            "agree": self.agree,
            "stabilizer_dim": list(self.stabilizer_dims),
            "supermanifold_dim": list(self.supermanifold_dim),
            "h1_in_w_perp": self.h1_in_w_perp,
            "injective_summands": list(self.injectivity.injective),
            "injectivity_consistent": self.injectivity.consistent,
            "free_odd_check": self.free_odd_check,
        }


def classify_record(ft: FlagType) -> ClassificationRecord:
    g, h = _stabilizer(ft)
    S = annihilator(g, h.odd)
    W = max_invariant_submodule(g, S)
    try:
        closed = closed_form_h0(ft)
        closed_dim, case = closed.generator_dim, closed.case
    except HypothesisError:
        closed_dim, case = None, "outside closed-form window"
    # h_1 ⊂ W^⊥ with W ⊂ Ann(h_1)
    in_w_perp = h.odd.issubspace(W.space.annihilator())
    free_odd_check = h.odd.dim != 0 or W.dim == g.dim_odd
    record = ClassificationRecord(
        flag=ft,
        generator_dim=W.dim,
        closed_form_dim=closed_dim,
        case=case,
        stabilizer_dims=h.dims,
        supermanifold_dim=(g.dim_even - h.even.dim, g.dim_odd - h.odd.dim),
        h1_in_w_perp=in_w_perp,
        injectivity=_injectivity(g, h.odd, W.dim),
        free_odd_check=free_odd_check,
    )
    if not record.agree:
        logger.warning("%s: generic d = %d, closed form d = %d", ft.label, W.dim, closed_dim)
    if not record.injectivity.consistent:
        logger.warning("%s: no injective summand but d = %d", ft.label, W.dim)
    return record


def sweep(series: Series, max_m: int, max_n: int, max_r: int, jobs: int = 1) -> list[ClassificationRecord]:
    """Classify every flag type inside the bounds; output order does not depend on ``jobs``."""
    flags = enumerate_flag_types(series, max_m, max_n, max_r)
    logger.info("Classifying %d %s flag types", len(flags), Series(series).value)
    if jobs > 1 and len(flags) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(classify_record, flags, chunksize=max(1, len(flags) // (4 * jobs))))
    else:
        records = [classify_record(ft) for ft in flags]
    bad = sum(1 for r in records if not r.ok)
    if bad:
        logger.warning("%d of %d %s records disagree", bad, len(records), Series(series).value)
    return sorted(records, key=lambda r: r.flag)


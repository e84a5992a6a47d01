"""
Chart atlases of the ambient gl flag supermanifolds, evaluated on Grassmann-valued points.

A chart is fixed by one choice of rows per stage. Its point is a sequence of
supermatrices Z_1, …, Z_r: Z_s has the partition (k_{s-1}|l_{s-1}) x
(k_s|l_s) and carries the identity in the chosen rows. Even coordinates are
rationals, odd coordinates are Grassmann elements, so every gluing identity
is checked by exact comparison.

The osp, pisp and q flag supermanifolds live inside these charts as the zero
set of ``isotropy_residual``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from grassmann import (
    GeneratorMismatchError,
    GrassmannElement,
    SingularBodyError,
    SuperMatrix,
    smat_exp_nilpotent,
    smat_inverse_even,
    smat_supertranspose,
)
from linalg import SingularMatrixError, inverse
from parabolic import FlagType
from superalgebra import Series, build_superalgebra, invariant_form, root_decomposition, torus_element

logger = logging.getLogger(__name__)

__all__ = [
    "AtlasReport",
    "ChartIndex",
    "ChartPoint",
    "GroupElement",
    "IsotropyReport",
    "UnreachableOverlapError",
    "admissible_charts",
    "base_chart",
    "chart_generators",
    "enumerate_charts",
    "group_action",
    "group_residual",
    "isotropy_residual",
    "origin",
    "point_residuals",
    "random_group_element",
    "sample_point",
    "transition",
    "verify_action_composition",
    "verify_action_identity",
    "verify_atlas",
    "verify_cocycle",
    "verify_isotropy",
    "verify_round_trip",
]

RETRIES = 1000
BOUND = 5
FRESH = 2


class UnreachableOverlapError(RuntimeError):
    """No sampled point landed in the requested overlap within the retry budget."""


@dataclass(frozen=True, order=True)
class ChartIndex:
    """Rows carrying the identity, per stage, as (even rows, odd rows), 0-based within the previous stage."""

    stages: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def label(self) -> str:
        parts = []
        for even, odd in self.stages:
            left = ",".join(str(i + 1) for i in even)
            right = ",".join(str(i + 1) for i in odd)
            parts.append(f"({left}|{right})")
        return " ".join(parts)

    def is_symmetric(self) -> bool:
        return all(even == odd for even, odd in self.stages)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class ChartPoint:
    chart: ChartIndex
    matrices: tuple[SuperMatrix, ...]

    @property
    def generators(self) -> int:
        return self.matrices[0].generators

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChartPoint):
            return NotImplemented
        return self.chart == other.chart and self.matrices == other.matrices

    __hash__ = None

    def embed(self, generators: int) -> ChartPoint:
        if generators < self.generators:
            raise GeneratorMismatchError(f"Cannot embed a point over Λ_{self.generators} into Λ_{generators}")
        return ChartPoint(self.chart, tuple(z.embed(generators) for z in self.matrices))

    def has_identity_rows(self) -> bool:
        for z, (even, odd) in zip(self.matrices, self.chart.stages):
            picked = z.rows(even, odd)
            if picked != SuperMatrix.identity(picked.col_partition, z.generators):
                return False
        return True

    def to_records(self) -> dict:
        return {
            "chart": [[list(even), list(odd)] for even, odd in self.chart.stages],
            "generators": self.generators,
            "matrices": [z.to_records() for z in self.matrices],
        }


@dataclass(frozen=True)
class GroupElement:
    """An even (m|n) x (m|n) supermatrix with invertible grade-0 part."""

    matrix: SuperMatrix

    def __post_init__(self):
        if self.matrix.row_partition != self.matrix.col_partition or self.matrix.parity:
            raise ValueError("A group element is a square even supermatrix")
        try:
            inverse(self.matrix.body())
        except SingularMatrixError as exc:
            raise SingularBodyError("Group element has a singular grade-0 part") from exc

    @classmethod
    def identity(cls, ft: FlagType, generators: int) -> GroupElement:
        return cls(SuperMatrix.identity((ft.m, ft.n), generators))

    @property
    def generators(self) -> int:
        return self.matrix.generators

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(self.matrix @ other.matrix)


def _frames(ft: FlagType) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    stages = ft.stages()
    return list(zip(stages, stages[1:]))


def enumerate_charts(ft: FlagType) -> list[ChartIndex]:
    per_stage = []
    for (k_prev, l_prev), (k, l) in _frames(ft):  # noqa: E741
        per_stage.append(list(product(combinations(range(k_prev), k), combinations(range(l_prev), l))))
    return [ChartIndex(tuple(choice)) for choice in product(*per_stage)]


def admissible_charts(ft: FlagType) -> list[ChartIndex]:
    """Charts that can hold points of the series' flag supermanifold; q needs matching even and odd rows."""
    charts = enumerate_charts(ft)
    if ft.series is Series.Q:
        return [chart for chart in charts if chart.is_symmetric()]
    return charts


def chart_generators(ft: FlagType) -> int:
    """Number of free odd coordinates of one chart."""
    return sum((k_prev - k) * l + (l_prev - l) * k for (k_prev, l_prev), (k, l) in _frames(ft))  # noqa: E741


def base_chart(ft: FlagType) -> ChartIndex:
    """The chart whose origin is the base point of ``parabolic.base_point``."""
    stages = []
    tail = ft.m % 2 if ft.series is Series.OSP else 0
    for s, ((k_prev, l_prev), (k, l)) in enumerate(_frames(ft)):  # noqa: E741
        start = tail if s == 0 else 0
        even = tuple(range(start, start + k))
        odd = tuple(range(l_prev - l, l_prev)) if ft.series is Series.PISP else tuple(range(l))
        stages.append((even, odd))
    return ChartIndex(tuple(stages))


def _chart_matrix(frame, rows, fill_even, fill_odd, generators: int) -> SuperMatrix:
    (k_prev, l_prev), (k, l) = frame  # noqa: E741
    even_rows, odd_rows = rows
    identity_rows = {r: i for i, r in enumerate(even_rows)}
    identity_rows.update({k_prev + r: k + i for i, r in enumerate(odd_rows)})
    entries = np.empty((k_prev + l_prev, k + l), dtype=object)
    for r in range(k_prev + l_prev):
        for c in range(k + l):
            if r in identity_rows:
                entries[r, c] = int(identity_rows[r] == c)
            elif (r < k_prev) == (c < k):
                entries[r, c] = fill_even()
            else:
                entries[r, c] = fill_odd()
    return SuperMatrix(frame[0], frame[1], entries, generators)


def origin(ft: FlagType, generators: int = 0) -> ChartPoint:
    chart = base_chart(ft)
    zero = GrassmannElement.zero(generators)
    matrices = tuple(
        _chart_matrix(frame, rows, lambda: 0, lambda: zero, generators)
        for frame, rows in zip(_frames(ft), chart.stages)
    )
    return ChartPoint(chart, matrices)


def _reglue(point: ChartPoint, target: ChartIndex, first: SuperMatrix | None) -> ChartPoint:
    carry = first
    out = []
    for z, (even_rows, odd_rows) in zip(point.matrices, target.stages):
        moved = z if carry is None else carry @ z
        c = moved.rows(even_rows, odd_rows)
        out.append(moved @ smat_inverse_even(c))
        carry = c
    return ChartPoint(target, tuple(out))


def transition(ft: FlagType, source: ChartIndex, target: ChartIndex, point: ChartPoint) -> ChartPoint:
    """Re-express ``point`` in the chart ``target``; raises SingularBodyError off the overlap."""
    if point.chart != source:
        raise ValueError(f"Point lives in chart {point.chart.label}, not {source.label}")
    if len(target.stages) != ft.r:
        raise ValueError(f"Chart {target.label} has {len(target.stages)} stages, flag has {ft.r}")
    return _reglue(point, target, None)


def group_action(
    ft: FlagType, element: GroupElement, source: ChartIndex, point: ChartPoint, target: ChartIndex
) -> ChartPoint:
    """Move ``point`` by ``element`` and read it off in the chart ``target``."""
    if point.chart != source:
        raise ValueError(f"Point lives in chart {point.chart.label}, not {source.label}")
    if element.matrix.row_partition != (ft.m, ft.n):
        raise ValueError(f"Group element of partition {element.matrix.row_partition} acting on ({ft.m}|{ft.n})")
    return _reglue(point.embed(element.generators), target, element.matrix)


def _swap_blocks(z: SuperMatrix) -> SuperMatrix:
    (a, b), (c, d) = z.row_partition, z.col_partition
    if a != b or c != d:
        raise ValueError(f"Block swap needs square blocks, got {z.row_partition}x{z.col_partition}")
    rows = [*range(a, 2 * a), *range(a)]
    cols = [*range(c, 2 * c), *range(c)]
    return SuperMatrix(z.row_partition, z.col_partition, z.entries[np.ix_(rows, cols)], z.generators, z.parity)


def isotropy_residual(series: Series, z: SuperMatrix) -> SuperMatrix:
    """Z^ST Γ Z for osp, Z^ST Υ Z for pisp, Z − π(Z) for q; zero exactly on the subvariety."""
    series = Series(series)
    if series is Series.Q:
        return z - _swap_blocks(z)
    if series not in (Series.OSP, Series.PISP):
        raise ValueError(f"{series.value} has no isotropy condition")
    m, n = z.row_partition
    form = invariant_form(series, m, n, z.generators)
    return smat_supertranspose(z) @ form @ z


def point_residuals(ft: FlagType, point: ChartPoint) -> list[SuperMatrix]:
    if ft.series is Series.GL:
        return []
    if ft.series is Series.Q:
        return [isotropy_residual(ft.series, z) for z in point.matrices]
    return [isotropy_residual(ft.series, point.matrices[0])]


def group_residual(ft: FlagType, element: GroupElement) -> SuperMatrix:
    """L^ST F L − F for osp / pisp, L − π(L) for q."""
    if ft.series is Series.Q:
        return element.matrix - _swap_blocks(element.matrix)
    form = invariant_form(ft.series, ft.m, ft.n, element.generators)
    if form is None:
        raise ValueError(f"{ft.series.value} has no invariant form")
    return smat_supertranspose(element.matrix) @ form @ element.matrix - form


def _rational(rng: np.random.Generator, bound: int) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def _nonzero_rational(rng: np.random.Generator, bound: int) -> Fraction:
    value = Fraction(0)
    while not value:
        value = _rational(rng, bound)
    return value


def _random_point(ft: FlagType, chart: ChartIndex, rng: np.random.Generator, bound: int) -> ChartPoint:
    generators = chart_generators(ft)
    counter = iter(range(1, generators + 1))
    matrices = tuple(
        _chart_matrix(
            frame,
            rows,
            lambda: _rational(rng, bound),
            lambda: GrassmannElement.generator(generators, next(counter)),
            generators,
        )
        for frame, rows in zip(_frames(ft), chart.stages)
    )
    return ChartPoint(chart, matrices)


def _images(ft: FlagType, point: ChartPoint, charts: Iterable[ChartIndex]) -> dict[ChartIndex, ChartPoint] | None:
    images = {}
    for chart in charts:
        try:
            images[chart] = transition(ft, point.chart, chart, point)
        except SingularBodyError:
            return None
    return images


def _sample(
    ft: FlagType, chart: ChartIndex, seed: int, overlap: Sequence[ChartIndex], bound: int, retries: int
) -> tuple[ChartPoint, dict[ChartIndex, ChartPoint], int]:
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        point = _random_point(ft, chart, rng, bound)
        images = _images(ft, point, overlap)
        if images is not None:
            return point, images, attempt
    raise UnreachableOverlapError(f"{ft.label}: no point of chart {chart.label} in the overlap after {retries} tries")


def sample_point(
    ft: FlagType,
    chart: ChartIndex,
    seed: int,
    overlap: Sequence[ChartIndex] = (),
    bound: int = BOUND,
    retries: int = RETRIES,
) -> ChartPoint:
    """Deterministic point of ``chart``: small rationals for even coordinates, one generator per odd coordinate."""
    point, _, _ = _sample(ft, chart, seed, overlap, bound, retries)
    return point


def _envelope_matrix(ft: FlagType, rng: np.random.Generator, generators: int, first: int, bound: int) -> SuperMatrix:
    """A nilpotent element of the Grassmann envelope: odd basis times odd parameters, even basis times even ones."""
    g = build_superalgebra(ft.series, ft.m, ft.n)
    xi = [GrassmannElement.generator(generators, first + i) for i in range(FRESH)]
    pair = xi[0] * xi[1]
    # odd parameters enter the lower-left block with a sign for the form-preserving series
    sign = -1 if ft.series in (Series.OSP, Series.PISP) else 1
    entries = np.empty((g.size, g.size), dtype=object)
    for index in np.ndindex(entries.shape):
        entries[index] = GrassmannElement.zero(generators)
    for t in range(g.dim):
        if g.parity[t]:
            coefficient = sum((_rational(rng, bound) * x for x in xi), GrassmannElement.zero(generators))
        else:
            coefficient = pair * _rational(rng, bound)
        for (r, c), v in g.basis[t].items():
            flip = sign if g.parity[t] and r >= ft.m else 1
            entries[r, c] = entries[r, c] + coefficient * (flip * v)
    return SuperMatrix((ft.m, ft.n), (ft.m, ft.n), entries, generators)


def _gl_body(ft: FlagType, rng: np.random.Generator, bound: int) -> np.ndarray:
    size = ft.m + ft.n
    while True:
        body = np.zeros((size, size), dtype=object)
        for r in range(size):
            for c in range(size):
                if (r < ft.m) == (c < ft.m):
                    body[r, c] = _rational(rng, bound)
        try:
            inverse(body)
            return body
        except SingularMatrixError:
            continue


@lru_cache(maxsize=None)
def _even_root_vectors(series: Series, m: int, n: int) -> tuple[int, ...]:
    system = root_decomposition(build_superalgebra(series, m, n))
    return tuple(t for space in system.spaces if not space.root.parity for t in space.indices)


def random_group_element(ft: FlagType, seed: int, generators: int, first: int, bound: int = BOUND) -> GroupElement:
    """Group element over Λ_generators using the fresh generators first, first + 1.

    gl: a random invertible even body with Grassmann corrections. osp, pisp, q:
    torus · exp(rational root vectors) · exp(envelope element), which stays in
    the subgroup preserving the series' structure.
    """
    if first + FRESH - 1 > generators:
        raise ValueError(f"Need generators {first}..{first + FRESH - 1} inside Λ_{generators}")
    rng = np.random.default_rng(seed)
    partition = (ft.m, ft.n)
    if ft.series is Series.GL:
        body = SuperMatrix.from_rational(_gl_body(ft, rng, bound), partition, partition, generators)
        return GroupElement(body @ smat_exp_nilpotent(_envelope_matrix(ft, rng, generators, first, bound)))
    g = build_superalgebra(ft.series, ft.m, ft.n)
    values = [_nonzero_rational(rng, bound) for _ in g.cartan]
    result = SuperMatrix.from_rational(torus_element(g, values), partition, partition, generators)
    roots = _even_root_vectors(ft.series, ft.m, ft.n)
    for _ in range(min(3, len(roots))):
        t = roots[int(rng.integers(len(roots)))]
        step = SuperMatrix.from_rational(g.matrix(t), partition, partition, generators) * _rational(rng, bound)
        result = result @ smat_exp_nilpotent(step)
    result = result @ smat_exp_nilpotent(_envelope_matrix(ft, rng, generators, first, bound))
    return GroupElement(result)


def verify_cocycle(ft: FlagType, i: ChartIndex, j: ChartIndex, k: ChartIndex, point: ChartPoint) -> bool:
    via = transition(ft, j, k, transition(ft, i, j, point))
    return via == transition(ft, i, k, point)


def verify_round_trip(ft: FlagType, i: ChartIndex, j: ChartIndex, point: ChartPoint) -> bool:
    return transition(ft, j, i, transition(ft, i, j, point)) == point


def verify_action_identity(ft: FlagType, i: ChartIndex, j: ChartIndex, point: ChartPoint) -> bool:
    unit = GroupElement.identity(ft, point.generators)
    return group_action(ft, unit, i, point, j) == transition(ft, i, j, point)


def verify_action_composition(
    ft: FlagType,
    first: GroupElement,
    second: GroupElement,
    i: ChartIndex,
    point: ChartPoint,
    j: ChartIndex,
    k: ChartIndex,
) -> bool:
    """Acting by ``first`` then ``second`` equals acting by their product."""
    moved = group_action(ft, second, j, group_action(ft, first, i, point, j), k)
    return moved == group_action(ft, second @ first, i, point, k)


@dataclass
class AtlasReport:
    flag: FlagType
    charts: int
    seeds: int
    triples: int = 0
    cocycle_failures: int = 0
    round_trips: int = 0
    round_trip_failures: int = 0
    action_checks: int = 0
    action_failures: int = 0
    rejections: int = 0
    unreachable: int = 0
    failed_at: list[str] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return self.cocycle_failures + self.round_trip_failures + self.action_failures

    @property
    def ok(self) -> bool:
        """No identity failed and every start chart reached the full overlap."""
        return self.failures == 0 and self.unreachable == 0

    def as_dict(self) -> dict:
        ft = self.flag
        return {
            "series": ft.series.value,
            "m": ft.m,
            "n": ft.n,
            "k": list(ft.k),
            "l": list(ft.l),
            "charts": self.charts,
            "seeds": self.seeds,
            "triples": self.triples,
            "cocycle_failures": self.cocycle_failures,
            "round_trips": self.round_trips,
            "round_trip_failures": self.round_trip_failures,
            "action_checks": self.action_checks,
            "action_failures": self.action_failures,
            "rejections": self.rejections,
            "unreachable": self.unreachable,
        }


def _check_actions(ft: FlagType, report: AtlasReport, point: ChartPoint, images, seed: int, bound: int) -> None:
    charts = list(images)
    start = point.chart
    j = charts[seed % len(charts)]
    k = charts[(seed // len(charts)) % len(charts)]
    report.action_checks += 1
    if not verify_action_identity(ft, start, j, point):
        report.action_failures += 1
        report.failed_at.append(f"identity action {start.label} -> {j.label}, seed {seed}")
    total = point.generators + 2 * FRESH
    first = random_group_element(_as_gl(ft), seed, total, point.generators + 1, bound)
    second = random_group_element(_as_gl(ft), seed + 1, total, point.generators + FRESH + 1, bound)
    try:
        same = verify_action_composition(ft, first, second, start, point, j, k)
    except SingularBodyError:
        report.rejections += 1
        return
    report.action_checks += 1
    if not same:
        report.action_failures += 1
        report.failed_at.append(f"composition {start.label} -> {j.label} -> {k.label}, seed {seed}")


def _as_gl(ft: FlagType) -> FlagType:
    if ft.series is Series.GL:
        return ft
    return FlagType(Series.GL, ft.m, ft.n, ft.k, ft.l)


def verify_atlas(
    ft: FlagType, seeds: Iterable[int], bound: int = BOUND, retries: int = RETRIES, actions: bool = True
) -> AtlasReport:
    """Cocycle, round-trip and action identities at sampled points of every chart overlap.

    For each start chart and seed a point meeting every chart is drawn; its
    images p_J in all charts are computed once, and transition(J, K, p_J) = p_K
    is checked for every ordered pair (J, K).
    """
    charts = enumerate_charts(ft)
    seeds = list(seeds)
    report = AtlasReport(ft, len(charts), len(seeds))
    for start in charts:
        for seed in seeds:
            try:
                point, images, rejected = _sample(ft, start, seed, charts, bound, retries)
            except UnreachableOverlapError as exc:
                logger.warning("%s", exc)
                report.unreachable += 1
                continue
            report.rejections += rejected
            for j, p_j in images.items():
                for k, p_k in images.items():
                    report.triples += 1
                    if transition(ft, j, k, p_j) != p_k:
                        report.cocycle_failures += 1
                        report.failed_at.append(f"cocycle {start.label}, {j.label}, {k.label}, seed {seed}")
                report.round_trips += 1
                if transition(ft, j, start, p_j) != point:
                    report.round_trip_failures += 1
                    report.failed_at.append(f"round trip {start.label} -> {j.label}, seed {seed}")
            if actions:
                _check_actions(ft, report, point, images, seed, bound)
            logger.debug("%s: chart %s seed %d done", ft.label, start.label, seed)
    logger.info(
        "%s: %d triples, %d round trips, %d action checks, %d failures, %d rejections",
        ft.label,
        report.triples,
        report.round_trips,
        report.action_checks,
        report.failures,
        report.rejections,
    )
    return report


@dataclass
class IsotropyReport:
    flag: FlagType
    checks: int = 0
    failures: int = 0
    rejections: int = 0

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def as_dict(self) -> dict:
        ft = self.flag
        return {
            "series": ft.series.value,
            "m": ft.m,
            "n": ft.n,
            "k": list(ft.k),
            "l": list(ft.l),
            "isotropy_checks": self.checks,
            "isotropy_failures": self.failures,
            "isotropy_rejections": self.rejections,
        }


def _on_subvariety(ft: FlagType, point: ChartPoint) -> bool:
    return all(residual.is_zero() for residual in point_residuals(ft, point))


def verify_isotropy(ft: FlagType, seeds: Iterable[int], bound: int = BOUND) -> IsotropyReport:
    """Move the base point by subgroup elements and check the residual stays zero in every chart."""
    if ft.series is Series.GL:
        raise ValueError("gl flags have no isotropy condition")
    charts = admissible_charts(ft)
    report = IsotropyReport(ft)
    generators = 2 * FRESH
    start = origin(ft, generators)
    for seed in seeds:
        first = random_group_element(ft, seed, generators, 1, bound)
        second = random_group_element(ft, seed + 1, generators, FRESH + 1, bound)
        for j in charts:
            try:
                moved = group_action(ft, first, start.chart, start, j)
            except SingularBodyError:
                report.rejections += 1
                continue
            candidates = [moved]
            for k in charts:
                try:
                    candidates.append(transition(ft, j, k, moved))
                    candidates.append(group_action(ft, second, j, moved, k))
                except SingularBodyError:
                    report.rejections += 1
            for candidate in candidates:
                report.checks += 1
                if not _on_subvariety(ft, candidate):
                    report.failures += 1
                    logger.warning("%s: residual nonzero in chart %s, seed %d", ft.label, candidate.chart.label, seed)
    logger.info("%s: %d isotropy checks, %d failures", ft.label, report.checks, report.failures)
    return report

"""
Tests for chart atlases, transition maps and the group action.
"""

from fractions import Fraction

import pytest

from atlas import (
    ChartIndex,
    ChartPoint,
    GroupElement,
    admissible_charts,
    base_chart,
    chart_generators,
    enumerate_charts,
    group_action,
    group_residual,
    isotropy_residual,
    origin,
    point_residuals,
    random_group_element,
    sample_point,
    transition,
    verify_action_composition,
    verify_action_identity,
    verify_atlas,
    verify_cocycle,
    verify_isotropy,
    verify_round_trip,
)
from grassmann import GrassmannElement, SingularBodyError, SuperMatrix
from main import load_configuration
from parabolic import FlagType, base_point, enumerate_flag_types
from superalgebra import Series

E1 = ChartIndex((((0,), ()),))
E2 = ChartIndex((((1,), ()),))
GL21_LINE = FlagType(Series.GL, 2, 1, (1,), (0,))


def configured_atlas_flags():
    _, atlas_cfg = load_configuration()
    total, max_r = atlas_cfg["sweep"]["max_total"], atlas_cfg["sweep"]["max_r"]
    return [ft for ft in enumerate_flag_types(Series.GL, total, total, max_r) if ft.m + ft.n <= total]


def grassmannian_point(x, generators=1):
    """(1, x, ξ) in the first chart of the (1|0) subspaces of Q^{2|1}."""
    xi = GrassmannElement.generator(generators, 1)
    return ChartPoint(E1, (SuperMatrix((2, 1), (1, 0), [[1], [x], [xi]], generators),))


def diagonal(values, partition, generators=1):
    size = sum(partition)
    entries = [[values[i] if i == j else 0 for j in range(size)] for i in range(size)]
    return GroupElement(SuperMatrix.from_rational(entries, partition, partition, generators))


class TestCharts:
    """Test cases for chart enumeration."""

    @pytest.mark.parametrize(
        "series,m,n,k,l,count",
        [
            ("gl", 2, 1, (1,), (0,), 2),
            ("gl", 2, 2, (1,), (1,), 4),
            ("gl", 3, 2, (1,), (1,), 6),
            ("gl", 3, 1, (2, 1), (0, 0), 6),
        ],
    )
    def test_counts(self, flag, series, m, n, k, l, count):  # noqa: E741
        assert len(enumerate_charts(flag(series, m, n, k, l))) == count

    def test_q_keeps_symmetric_charts(self):
        ft = FlagType(Series.Q, 2, 2, (1,), (1,))
        charts = admissible_charts(ft)
        assert len(enumerate_charts(ft)) == 4
        assert len(charts) == 2
        assert all(chart.is_symmetric() for chart in charts)

    def test_label(self):
        assert E1.label == "(1|)"
        assert ChartIndex((((0, 2), (1,)), ((1,), ()))).label == "(1,3|2) (2|)"

    @pytest.mark.parametrize(
        "series,m,n,k,l,expected",
        [("gl", 2, 1, (1,), (0,), 1), ("gl", 2, 2, (1,), (1,), 2), ("gl", 3, 1, (2, 1), (0, 0), 2)],
    )
    def test_chart_generators(self, flag, series, m, n, k, l, expected):  # noqa: E741
        assert chart_generators(flag(series, m, n, k, l)) == expected

    @pytest.mark.parametrize(
        "ft",
        [ft for series in Series for ft in enumerate_flag_types(series, 3, 2, 1)],
        ids=str,
    )
    def test_base_chart_matches_base_point(self, ft):
        even, odd = base_chart(ft).stages[0]
        assert (*even, *(ft.m + i for i in odd)) == base_point(ft)[0]

    def test_origin_has_identity_rows(self, flag):
        point = origin(flag("gl", 3, 2, (2, 1), (1, 1)), generators=2)
        assert point.has_identity_rows()
        assert point.generators == 2


class TestTransition:
    """Test cases for transition maps."""

    def test_worked_example(self):
        xi = GrassmannElement.generator(1, 1)
        image = transition(GL21_LINE, E1, E2, grassmannian_point(2))
        expected = SuperMatrix((2, 1), (1, 0), [[Fraction(1, 2)], [1], [xi / 2]], 1)
        assert image == ChartPoint(E2, (expected,))

    def test_off_overlap(self):
        with pytest.raises(SingularBodyError):
            transition(GL21_LINE, E1, E2, grassmannian_point(0))

    def test_wrong_source(self):
        with pytest.raises(ValueError):
            transition(GL21_LINE, E2, E1, grassmannian_point(2))

    def test_round_trip_and_cocycle(self, flag):
        ft = flag("gl", 2, 2, (1,), (1,))
        charts = enumerate_charts(ft)
        point = sample_point(ft, charts[0], seed=3, overlap=charts)
        for j in charts:
            assert verify_round_trip(ft, charts[0], j, point)
            for k in charts:
                assert verify_cocycle(ft, charts[0], j, k, point)

    def test_two_step_flag(self, flag):
        ft = flag("gl", 3, 1, (2, 1), (1, 0))
        charts = enumerate_charts(ft)
        point = sample_point(ft, charts[-1], seed=11, overlap=charts)
        assert point.has_identity_rows()
        for j in charts:
            image = transition(ft, point.chart, j, point)
            assert image.has_identity_rows()
            assert verify_round_trip(ft, point.chart, j, point)


class TestSampling:
    """Test cases for deterministic sampling."""

    def test_same_seed_same_point(self, flag):
        ft = flag("gl", 2, 2, (1,), (1,))
        chart = enumerate_charts(ft)[1]
        assert sample_point(ft, chart, seed=5) == sample_point(ft, chart, seed=5)

    def test_point_lives_in_chart(self, flag):
        ft = flag("gl", 3, 2, (1,), (1,))
        chart = enumerate_charts(ft)[4]
        point = sample_point(ft, chart, seed=2)
        assert point.chart == chart
        assert point.has_identity_rows()
        assert point.generators == chart_generators(ft)

    def test_overlap_is_reached(self, flag):
        ft = flag("gl", 2, 1, (1,), (0,))
        point = sample_point(ft, E1, seed=0, overlap=[E1, E2])
        assert point.matrices[0][1, 0].body != 0


class TestGroupAction:
    """Test cases for the group action on chart points."""

    def test_diagonal_action(self):
        image = group_action(GL21_LINE, diagonal((2, 3, 5), (2, 1)), E1, grassmannian_point(4), E1)
        xi = GrassmannElement.generator(1, 1)
        assert image.matrices[0] == SuperMatrix((2, 1), (1, 0), [[1], [6], [xi * Fraction(5, 2)]], 1)

    def test_identity_action(self, flag):
        ft = flag("gl", 2, 2, (1,), (1,))
        charts = enumerate_charts(ft)
        point = sample_point(ft, charts[0], seed=1, overlap=charts)
        assert all(verify_action_identity(ft, charts[0], j, point) for j in charts)

    def test_composition_of_diagonals(self):
        ft = GL21_LINE
        first, second = diagonal((2, 3, 5), (2, 1)), diagonal((1, 2, 3), (2, 1))
        assert verify_action_composition(ft, first, second, E1, grassmannian_point(4), E2, E1)

    def test_point_is_embedded(self):
        element = diagonal((1, 1, 1), (2, 1), generators=3)
        image = group_action(GL21_LINE, element, E1, grassmannian_point(4), E1)
        assert image.generators == 3

    def test_wrong_partition(self):
        with pytest.raises(ValueError):
            group_action(GL21_LINE, diagonal((1, 1), (1, 1)), E1, grassmannian_point(4), E1)

    def test_singular_group_element(self):
        with pytest.raises(SingularBodyError):
            GroupElement(SuperMatrix.zeros((1, 1), (1, 1), 0))

    def test_random_gl_element(self, flag):
        ft = flag("gl", 2, 2, (1,), (1,))
        element = random_group_element(ft, seed=4, generators=4, first=3)
        assert element.generators == 4
        assert element.matrix.parity == 0

    def test_not_enough_generators(self, flag):
        with pytest.raises(ValueError):
            random_group_element(flag("gl", 2, 2, (1,), (1,)), seed=0, generators=2, first=2)


class TestIsotropy:
    """Test cases for the osp, pisp and q subvarieties."""

    def test_origin_is_isotropic(self, flag):
        for ft in (flag("osp", 2, 2, (1,), (0,)), flag("pisp", 2, 2, (1,), (1,)), flag("q", 2, 2, (1,), (1,))):
            assert all(r.is_zero() for r in point_residuals(ft, origin(ft)))

    def test_non_isotropic_line(self):
        z = SuperMatrix.from_rational([[1], [1], [0], [0]], (2, 2), (1, 0), 0)
        residual = isotropy_residual(Series.OSP, z)
        assert residual[0, 0] == 2

    def test_gl_has_no_condition(self):
        with pytest.raises(ValueError):
            isotropy_residual(Series.GL, SuperMatrix.identity((1, 1), 0))

    def test_q_symmetric_point(self):
        z = SuperMatrix.from_rational([[1, 0], [3, 0], [0, 1], [0, 3]], (2, 2), (1, 1), 0)
        assert isotropy_residual(Series.Q, z).is_zero()

    @pytest.mark.parametrize(
        "series,m,n,k,l",
        [
            ("osp", 2, 2, (1,), (0,)),
            ("osp", 3, 2, (1,), (1,)),
            ("pisp", 2, 2, (1,), (1,)),
            ("q", 2, 2, (1,), (1,)),
        ],
    )
    def test_subgroup_elements_preserve_structure(self, flag, series, m, n, k, l):  # noqa: E741
        ft = flag(series, m, n, k, l)
        for seed in range(3):
            element = random_group_element(ft, seed, generators=4, first=1)
            assert group_residual(ft, element).is_zero()

    @pytest.mark.parametrize(
        "series,m,n,k,l",
        [("osp", 2, 2, (1,), (0,)), ("pisp", 2, 2, (1,), (1,)), ("q", 2, 2, (1,), (1,))],
    )
    def test_verify_isotropy(self, flag, series, m, n, k, l):  # noqa: E741
        report = verify_isotropy(flag(series, m, n, k, l), range(2))
        assert report.ok
        assert report.checks > 0
        assert list(report.as_dict())[-3:] == ["isotropy_checks", "isotropy_failures", "isotropy_rejections"]

    def test_verify_isotropy_rejects_gl(self, flag):
        with pytest.raises(ValueError):
            verify_isotropy(flag("gl", 2, 2, (1,), (1,)), range(1))


class TestVerifyAtlas:
    """Test cases for the full atlas check."""

    def test_small(self, flag):
        report = verify_atlas(flag("gl", 2, 1, (1,), (0,)), range(3))
        assert report.ok
        assert report.unreachable == 0
        assert report.triples == 2 * 3 * 4
        assert report.round_trips == 2 * 3 * 2
        assert report.action_checks > 0

    def test_without_actions(self, flag):
        report = verify_atlas(flag("gl", 2, 2, (1,), (1,)), range(2), actions=False)
        assert report.ok
        assert report.action_checks == 0
        assert report.as_dict()["charts"] == 4

    def test_unreachable_overlap_fails(self, flag):
        report = verify_atlas(flag("gl", 2, 1, (1,), (0,)), range(1), retries=0)
        assert report.unreachable == 2
        assert report.failures == 0
        assert not report.ok

    @pytest.mark.slow
    @pytest.mark.parametrize("ft", configured_atlas_flags(), ids=str)
    def test_full(self, ft):
        _, atlas_cfg = load_configuration()
        report = verify_atlas(ft, range(1, atlas_cfg["seeds"] + 1), atlas_cfg["bound"], atlas_cfg["retries"])
        assert report.ok, report.failed_at[:5]

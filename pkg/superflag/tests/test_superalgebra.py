"""
Tests for the matrix Lie superalgebras, their roots and odd summands.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from superalgebra import (
    OutsideSpanError,
    Root,
    Series,
    bracket,
    build_superalgebra,
    form_residual,
    gr_superalgebra,
    jacobi_residual,
    odd_adjoint,
    odd_summands,
    root_decomposition,
    torus_element,
)

SMALL_ALGEBRAS = [
    (Series.GL, 1, 1),
    (Series.GL, 2, 1),
    (Series.GL, 1, 2),
    (Series.OSP, 1, 2),
    (Series.OSP, 2, 2),
    (Series.OSP, 3, 2),
    (Series.PISP, 1, 1),
    (Series.PISP, 2, 2),
    (Series.Q, 1, 1),
    (Series.Q, 2, 2),
]

FULL_ALGEBRAS = [
    *((Series.GL, m, n) for m in range(5) for n in range(5) if m + n),
    *((Series.OSP, m, n) for m in range(1, 5) for n in (2, 4)),
    *((Series.PISP, n, n) for n in range(1, 5)),
    *((Series.Q, n, n) for n in range(1, 5)),
]


def expected_dims(series, m, n):
    if series is Series.GL:
        return m * m + n * n, 2 * m * n
    if series is Series.OSP:
        q = n // 2
        return m * (m - 1) // 2 + q * (2 * q + 1), m * n
    return n * n, n * n


def supercommutator(g, i, j):
    a, b = g.matrix(i), g.matrix(j)
    sign = -1 if g.parity[i] and g.parity[j] else 1
    return a.dot(b) - sign * b.dot(a)


def root_coverage(g):
    roots = root_decomposition(g)
    return [*roots.cartan, *roots.zero_odd, *(t for space in roots.spaces for t in space.indices)]


class TestBuild:
    """Test cases for basis construction."""

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_dimensions(self, series, m, n):
        assert build_superalgebra(series, m, n).dims == expected_dims(series, m, n)

    @pytest.mark.parametrize(
        "series,m,n", [(Series.GL, 0, 0), (Series.OSP, 2, 1), (Series.PISP, 2, 1), (Series.Q, 1, 2)]
    )
    def test_invalid_dimensions(self, series, m, n):
        with pytest.raises(ValueError):
            build_superalgebra(series, m, n)

    def test_cached(self):
        assert build_superalgebra(Series.GL, 2, 1) is build_superalgebra(Series.GL, 2, 1)

    def test_gl11_basis_order(self):
        g = build_superalgebra(Series.GL, 1, 1)
        assert g.labels == ("A[1,1]", "D[1,1]", "B[1,1]", "C[1,1]")
        assert g.parity == (0, 0, 1, 1)
        assert g.cartan == (0, 1)

    def test_name(self, osp22):
        assert osp22.name == "osp(2|2)"
        assert gr_superalgebra(osp22).name == "gr osp(2|2)"

    def test_even_basis_before_odd(self, pisp22):
        assert list(pisp22.even_indices) == [t for t in range(pisp22.dim) if pisp22.parity[t] == 0]


class TestBracket:
    """Test cases for the supercommutator and structure constants."""

    def test_odd_odd_in_gl11(self):
        g = build_superalgebra(Series.GL, 1, 1)
        assert bracket(g, {2: Fraction(1)}, {3: Fraction(1)}) == (1, 1, 0, 0)

    def test_inhomogeneous_rejected(self, gl21):
        with pytest.raises(ValueError):
            bracket(gl21, {0: Fraction(1), gl21.dim_even: Fraction(1)}, {0: Fraction(1)})

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_matches_matrix_supercommutator(self, series, m, n):
        g = build_superalgebra(series, m, n)
        for i, j in itertools.product(range(g.dim), repeat=2):
            expected = supercommutator(g, i, j)
            assert np.array_equal(g.element_matrix(g.basis_bracket(i, j)), expected)

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_jacobi(self, series, m, n):
        g = build_superalgebra(series, m, n)
        for i, j, k in itertools.product(range(g.dim), repeat=3):
            assert jacobi_residual(g, i, j, k) == {}

    def test_super_antisymmetry(self, q22):
        for i, j in itertools.product(range(q22.dim), repeat=2):
            sign = 1 if q22.parity[i] and q22.parity[j] else -1
            assert q22.basis_bracket(i, j) == {k: sign * v for k, v in q22.basis_bracket(j, i).items()}

    def test_outside_span(self, osp22):
        with pytest.raises(OutsideSpanError):
            osp22.coordinates({(0, 0): Fraction(1)})

    def test_coordinates_of_basis_element(self, pisp22):
        t = pisp22.dim_even
        coords = pisp22.coordinates(pisp22.matrix(t))
        assert coords == tuple(Fraction(int(s == t)) for s in range(pisp22.dim))


class TestGraded:
    """Test cases for the associated graded superalgebra."""

    def test_odd_brackets_vanish(self, gl21):
        gr = gr_superalgebra(gl21)
        for i, j in itertools.product(gl21.odd_indices, repeat=2):
            assert gr.basis_bracket(i, j) == {}

    def test_even_brackets_kept(self, gl21):
        gr = gr_superalgebra(gl21)
        for i, j in itertools.product(gl21.even_indices, range(gl21.dim)):
            assert gr.basis_bracket(i, j) == gl21.basis_bracket(i, j)

    def test_jacobi(self, osp22):
        gr = gr_superalgebra(osp22)
        for i, j, k in itertools.product(range(gr.dim), repeat=3):
            assert jacobi_residual(gr, i, j, k) == {}

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_idempotent(self, series, m, n):
        once = gr_superalgebra(build_superalgebra(series, m, n))
        twice = gr_superalgebra(once)
        assert twice.name == once.name
        assert twice.dims == once.dims
        assert twice.structure_constants == once.structure_constants


class TestInvariantForm:
    """Test cases for the preserved forms of osp and πsp."""

    @pytest.mark.parametrize("series,m,n", [s for s in SMALL_ALGEBRAS if s[0] in (Series.OSP, Series.PISP)])
    def test_every_basis_element_preserves_form(self, series, m, n):
        g = build_superalgebra(series, m, n)
        for t in range(g.dim):
            assert form_residual(g, t).is_zero(), g.labels[t]

    def test_gl_has_no_form(self, gl21):
        with pytest.raises(ValueError):
            form_residual(gl21, 0)


class TestRoots:
    """Test cases for root decompositions."""

    def test_gl21(self, gl21):
        roots = root_decomposition(gl21)
        assert roots.labels(0) == ["x1-x2", "-x1+x2"]
        assert roots.labels(1) == ["x1-y1", "x2-y1", "-x1+y1", "-x2+y1"]
        assert roots.zero_odd == ()

    def test_osp22(self, osp22):
        roots = root_decomposition(osp22)
        assert set(roots.labels(0)) == {"2y1", "-2y1"}
        assert set(roots.labels(1)) == {"x1+y1", "x1-y1", "-x1+y1", "-x1-y1"}

    def test_q22(self, q22):
        roots = root_decomposition(q22)
        assert set(roots.labels(0)) == {"x1-x2", "-x1+x2"}
        assert set(roots.labels(1)) == {"x1-x2", "-x1+x2"}
        assert len(roots.zero_odd) == 2

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_decomposition_is_complete(self, series, m, n):
        g = build_superalgebra(series, m, n)
        covered = root_coverage(g)
        assert len(covered) == g.dim
        assert set(covered) == set(range(g.dim))

    def test_roots_are_closed_under_negation(self, pisp22):
        roots = root_decomposition(pisp22).roots()
        assert all(-r in roots for r in roots if r.parity == 0)

    def test_nonnegative_indices_contain_cartan(self, gl21):
        roots = root_decomposition(gl21)
        chosen = roots.nonnegative_indices((1, 0, 0))
        assert set(gl21.cartan) <= set(chosen)
        assert chosen == sorted(chosen)

    def test_root_label(self):
        assert Root((1, -2), 1).label(("x1", "y1")) == "x1-2y1"
        assert Root((0, 0), 0).label(("x1", "y1")) == "0"
        assert (-Root((1, 0), 0)).coeffs == (-1, 0)

    def test_evaluate_length_mismatch(self):
        with pytest.raises(ValueError):
            Root((1, -1), 0).evaluate((1,))


class TestOddSummands:
    """Test cases for the invariant decomposition of the odd part."""

    @pytest.mark.parametrize(
        "series,m,n,expected",
        [
            (Series.GL, 2, 1, (("V1", 2), ("V2", 2))),
            (Series.OSP, 2, 2, (("V1", 2), ("V2", 2))),
            (Series.OSP, 3, 2, (("V", 6),)),
            (Series.PISP, 2, 2, (("V1", 3), ("V2", 1))),
            (Series.Q, 2, 2, (("V", 4),)),
        ],
    )
    def test_names_and_dimensions(self, series, m, n, expected):
        g = build_superalgebra(series, m, n)
        assert tuple((s.name, s.dim) for s in odd_summands(g)) == expected

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_summands_are_invariant(self, series, m, n):
        g = build_superalgebra(series, m, n)
        for summand in odd_summands(g):
            members = set(summand.indices)
            for columns in odd_adjoint(g):
                for c in members:
                    assert set(columns.get(c, {})) <= members

    @pytest.mark.parametrize("series,m,n", SMALL_ALGEBRAS)
    def test_summands_span_odd_part(self, series, m, n):
        g = build_superalgebra(series, m, n)
        assert sum(s.dim for s in odd_summands(g)) == g.dim_odd


class TestTorus:
    """Test cases for diagonal group elements."""

    def test_gl(self, gl21):
        assert np.array_equal(torus_element(gl21, (2, 3, 5)), np.diag([2, 3, 5]).astype(object))

    def test_osp(self, osp22):
        diagonal = [torus_element(osp22, (2, 3))[i, i] for i in range(4)]
        assert diagonal == [2, Fraction(1, 2), 3, Fraction(1, 3)]

    def test_zero_value(self, gl21):
        with pytest.raises(ValueError):
            torus_element(gl21, (1, 0, 1))

    def test_wrong_length(self, q22):
        with pytest.raises(ValueError):
            torus_element(q22, (1, 1, 1))


class TestFullBounds:
    """Structure checks for every series with m, n <= 4."""

    @pytest.mark.slow
    @pytest.mark.parametrize("series,m,n", FULL_ALGEBRAS)
    def test_dimensions_and_closure(self, series, m, n):
        g = build_superalgebra(series, m, n)
        assert g.dims == expected_dims(series, m, n)
        for (i, j), value in g.structure_constants.items():
            assert np.array_equal(g.element_matrix(value), supercommutator(g, i, j))

    @pytest.mark.slow
    @pytest.mark.parametrize("series,m,n", FULL_ALGEBRAS)
    def test_jacobi(self, series, m, n):
        g = build_superalgebra(series, m, n)
        for i, j, k in itertools.product(range(g.dim), repeat=3):
            assert jacobi_residual(g, i, j, k) == {}

    @pytest.mark.slow
    @pytest.mark.parametrize("series,m,n", FULL_ALGEBRAS)
    def test_root_decomposition_is_complete(self, series, m, n):
        g = build_superalgebra(series, m, n)
        assert sorted(root_coverage(g)) == list(range(g.dim))

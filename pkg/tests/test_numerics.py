import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from szilard.exceptions import NumericsError
from szilard.numerics import (
    Grid,
    TridiagonalSymmetric,
    eig_tridiagonal,
    integrate,
    sum_series,
)


class TestGrid:
    def test_spacing_excludes_endpoints(self):
        g = Grid(n_points=9, x_min=0.0, x_max=1.0)
        assert g.spacing == pytest.approx(0.1, abs=0)
        assert g.points[0] == pytest.approx(0.1)
        assert g.points[-1] == pytest.approx(0.9)
        assert len(g.points) == 9

    def test_rejects_degenerate_domains(self):
        with pytest.raises(ValueError):
            Grid(n_points=2, x_min=0.0, x_max=1.0)
        with pytest.raises(ValueError):
            Grid(n_points=10, x_min=1.0, x_max=1.0)


class TestTridiagonal:
    def test_band_length_must_match(self):
        with pytest.raises(ValueError):
            TridiagonalSymmetric(np.ones(4), np.ones(4))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TridiagonalSymmetric(np.array([1.0, np.nan, 1.0]), np.ones(2))

    def test_matvec_matches_dense(self):
        m = TridiagonalSymmetric(np.array([2.0, 3.0, 4.0]), np.array([-1.0, 0.5]))
        dense = np.diag(m.diagonal) + np.diag(m.off_diagonal, 1) + np.diag(m.off_diagonal, -1)
        v = np.array([1.0, -2.0, 0.5])
        assert np.allclose(m.matvec(v), dense @ v, rtol=0, atol=1e-15)


class TestEigTridiagonal:
    def test_uniform_matrix_closed_form(self):
        # diag 2, off -1 on n=3: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2)
        m = TridiagonalSymmetric(np.full(3, 2.0), np.full(2, -1.0))
        pairs = eig_tridiagonal(m, 3)
        vals = [e for e, _ in pairs]
        expect = [2.0 - math.sqrt(2.0), 2.0, 2.0 + math.sqrt(2.0)]
        assert vals == pytest.approx(expect, rel=1e-14)

    def test_vectors_are_normalized_eigenvectors(self):
        m = TridiagonalSymmetric(np.arange(1.0, 7.0), -np.ones(5))
        for e, v in eig_tridiagonal(m, 4):
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-13)
            assert np.linalg.norm(m.matvec(v) - e * v) <= 1e-10 * m.scale

    def test_k_lowest_bounds(self):
        m = TridiagonalSymmetric(np.ones(3), np.zeros(2))
        with pytest.raises(ValueError):
            eig_tridiagonal(m, 0)
        with pytest.raises(ValueError):
            eig_tridiagonal(m, 4)

    @settings(max_examples=25, deadline=None, derandomize=True)
    @given(
        st.lists(st.floats(-50, 50), min_size=4, max_size=12),
        st.integers(min_value=1, max_value=1000),
    )
    def test_random_matrices_satisfy_residual_contract(self, diag, seed):
        rng = np.random.default_rng(seed)
        d = np.array(diag)
        off = rng.uniform(-10.0, 10.0, size=len(d) - 1)
        m = TridiagonalSymmetric(d, off)
        pairs = eig_tridiagonal(m, len(d))
        vals = np.array([e for e, _ in pairs])
        assert np.all(np.diff(vals) >= -1e-12 * max(m.scale, 1.0))
        vecs = np.column_stack([v for _, v in pairs])
        gram = vecs.T @ vecs
        assert np.max(np.abs(gram - np.eye(len(d)))) < 1e-8


class TestSumSeries:
    def test_geometric_series(self):
        q = 0.5

        def terms():
            n = 0
            while True:
                yield q**n
                n += 1

        res = sum_series(terms(), lambda n: q**n / (1 - q), rel_tol=1e-12)
        assert res.value == pytest.approx(2.0, rel=1e-12)
        assert res.terms_used < 60

    def test_finite_generator_sums_exactly(self):
        res = sum_series(iter([1.0, 2.0, 3.0]), lambda n: math.inf)
        assert res.value == 6.0
        assert res.terms_used == 3

    def test_batching_changes_only_the_stopping_point(self):
        q = 0.9

        def terms():
            n = 0
            while True:
                yield q**n
                n += 1

        a = sum_series(terms(), lambda n: q**n / (1 - q), rel_tol=1e-10, batch=1)
        b = sum_series(terms(), lambda n: q**n / (1 - q), rel_tol=1e-10, batch=7)
        assert a.value == pytest.approx(b.value, rel=1e-9)
        assert b.terms_used >= a.terms_used

    def test_unreachable_bound_raises(self):
        with pytest.raises(NumericsError):
            sum_series((1.0 for _ in iter(int, 1)), lambda n: 1.0, max_terms=100)

    def test_bad_batch(self):
        with pytest.raises(ValueError):
            sum_series(iter([1.0]), lambda n: 0.0, batch=0)


class TestIntegrate:
    def test_log_integral(self):
        assert integrate(lambda v: 1.0 / v, 1.0, 2.0) == pytest.approx(
            0.6931471805599454, rel=1e-12
        )

    def test_empty_interval(self):
        assert integrate(math.sin, 2.0, 2.0) == 0.0

    def test_gaussian_against_erf(self):
        val = integrate(lambda x: math.exp(-x * x), 0.0, 3.0)
        assert val == pytest.approx(math.sqrt(math.pi) / 2 * math.erf(3.0), rel=1e-10)

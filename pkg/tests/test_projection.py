"""Orthogonal projection onto the curve, checked against brute force."""

import numpy as np
import pytest

from rpcurve.bezier import BestEnd, RankingCurve, evaluate
from rpcurve.errors import DomainError
from rpcurve.projection import (
    DEFAULT_GRID_SIZE,
    project_point,
    project_points,
    score_from_t,
)


def curve(P, best_end=BestEnd.AT_T1):
    return RankingCurve(
        control_points=np.asarray(P, dtype=float), best_end=best_end
    )


def dense_min(c, x, m=200001):
    ts = np.linspace(0.0, 1.0, m)
    d2 = ((evaluate(c, ts) - x) ** 2).sum(axis=1)
    k = int(np.argmin(d2))
    return ts[k], d2[k]


class TestProjectPoint:
    def test_point_on_curve_projects_to_itself(self):
        c = curve([[0, 0], [0.3, 0.8], [0.7, 0.2], [1, 1]])
        for t0 in (0.0, 0.31, 0.5, 0.77, 1.0):
            x = evaluate(c, t0)
            r = project_point(c, x)
            assert r.distance < 1e-9
            assert abs(r.t - t0) < 1e-6

    def test_matches_dense_grid(self):
        rng = np.random.default_rng(20240518)
        for _ in range(50):
            d = int(rng.integers(2, 5))
            c = curve(rng.normal(size=(4, d)))
            x = rng.normal(size=d) * 2
            r = project_point(c, x)
            tg, dg = dense_min(c, x)
            # never worse than the best grid point
            assert r.distance**2 <= dg + 1e-12
            p = evaluate(c, r.t)
            assert abs(((p - x) ** 2).sum() - r.distance**2) < 1e-9

    def test_endpoint_clamping(self):
        c = curve([[0, 0], [1.0 / 3, 0], [2.0 / 3, 0], [1, 0]])
        far = np.array([2.0, 0.0])
        r = project_point(c, far)
        assert r.t == 1.0
        assert r.clamped
        near = np.array([0.5, 0.3])
        r2 = project_point(c, near)
        assert not r2.clamped
        assert abs(r2.t - 0.5) < 1e-9

    def test_tie_prefers_smaller_t(self):
        # symmetric arch: center point is equidistant from both lobes
        c = curve([[0, 0], [1.0 / 3, 1], [2.0 / 3, 1], [1, 0]])
        x = np.array([0.5, 0.0])
        r = project_point(c, x)
        assert r.t <= 0.5 + 1e-12

    def test_validation(self):
        c = curve([[0, 0], [0.3, 0.8], [0.7, 0.2], [1, 1]])
        with pytest.raises(DomainError):
            project_point(c, np.array([0.5, 0.5, 0.5]))
        with pytest.raises(DomainError):
            project_points(c, np.array([[np.inf, 0.0]]))
        with pytest.raises(DomainError):
            project_points(c, np.array([[0.5, 0.5]]), grid_size=2)


class TestProjectPoints:
    def test_batch_equals_loop(self):
        rng = np.random.default_rng(5)
        c = curve(rng.normal(size=(4, 3)))
        xs = rng.normal(size=(40, 3))
        ts, dist, clamped = project_points(c, xs)
        for i in range(40):
            r = project_point(c, xs[i])
            assert ts[i] == r.t
            assert dist[i] == r.distance
            assert clamped[i] == r.clamped

    def test_workers_bit_identical(self):
        rng = np.random.default_rng(6)
        c = curve(rng.normal(size=(4, 4)))
        xs = rng.normal(size=(101, 4))
        base = project_points(c, xs, workers=1)
        for w in (2, 3, 8):
            got = project_points(c, xs, workers=w)
            for a, b in zip(base, got):
                np.testing.assert_array_equal(a, b)

    def test_grid_size_refines(self):
        rng = np.random.default_rng(7)
        c = curve(rng.normal(size=(4, 2)))
        xs = rng.normal(size=(20, 2))
        _, d_coarse, _ = project_points(c, xs, grid_size=33)
        _, d_fine, _ = project_points(c, xs, grid_size=DEFAULT_GRID_SIZE)
        assert np.all(d_fine <= d_coarse + 1e-12)


class TestScore:
    def test_orientation_of_score(self):
        assert score_from_t(0.25, BestEnd.AT_T1) == 0.25
        assert score_from_t(0.25, BestEnd.AT_T0) == 0.75

    def test_vectorized(self):
        ts = np.array([0.0, 0.5, 1.0])
        np.testing.assert_array_equal(
            score_from_t(ts, BestEnd.AT_T0), [1.0, 0.5, 0.0]
        )

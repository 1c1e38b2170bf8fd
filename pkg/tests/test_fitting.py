import json

import numpy as np
import pytest
import scipy.stats

from rpcurve.bezier import BestEnd, Monotonicity, evaluate
from rpcurve.data import Orientation, normalize
from rpcurve.errors import TooFewItems, TransformMismatch
from rpcurve.fitting import (
    FitConfig,
    assign_orders,
    first_principal_axis,
    fit,
    fit_table,
    init_curve,
    load_curve,
    make_ranking,
    oriented_mean,
    rank,
    save_fit,
)
from rpcurve.projection import project_points


def line_table(make_table, n=30, d=3, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    t = np.sort(rng.uniform(size=n))
    base = np.outer(t, np.linspace(1.0, 2.0, d)) + rng.normal(
        scale=noise, size=(n, d)
    )
    base[0] = 0.0
    base[-1] = np.linspace(1.0, 2.0, d)
    return make_table(base)


class TestFitConfig:
    def test_defaults(self):
        c = FitConfig()
        assert c.max_iters == 200
        assert c.rel_tol == 1e-8
        assert c.grid_size == 1025
        assert c.workers == 1

    def test_validation(self):
        with pytest.raises(Exception):
            FitConfig(max_iters=0)
        with pytest.raises(Exception):
            FitConfig(rel_tol=-1.0)
        with pytest.raises(Exception):
            FitConfig(grid_size=2)


class TestAssignOrders:
    def test_competition_ranking(self):
        scores = np.array([0.9, 0.2, 0.9, 0.5])
        orders, tied = assign_orders(scores)
        assert orders.tolist() == [1, 4, 1, 3]
        assert tied.tolist() == [True, False, True, False]

    def test_matches_rankdata(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            scores = rng.integers(0, 6, size=12).astype(float) / 5.0
            orders, _ = assign_orders(scores)
            want = scipy.stats.rankdata(-scores, method="min")
            np.testing.assert_array_equal(orders, want.astype(int))

    def test_ranking_result_lookups(self):
        r = make_ranking(("a", "b", "c"), np.array([0.1, 0.9, 0.5]), "m")
        assert r.order_by_id()["b"] == 1
        assert r.order_by_id()["a"] == 3
        assert not r.has_ties
        rows = r.to_rows()
        assert [row["id"] for row in rows] == ["a", "b", "c"]


class TestPrincipalAxis:
    def test_matches_eigendecomposition(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            X = rng.normal(size=(40, 4)) @ rng.normal(size=(4, 4))
            v = first_principal_axis(X)
            C = np.cov((X - X.mean(axis=0)).T)
            w, V = np.linalg.eigh(C)
            top = V[:, -1]
            if top[np.argmax(np.abs(top))] < 0:
                top = -top
            assert abs(abs(v @ top) - 1.0) < 1e-9
            np.testing.assert_allclose(v, top, atol=1e-9)

    def test_unit_norm(self):
        rng = np.random.default_rng(32)
        X = rng.normal(size=(10, 3))
        assert abs(np.linalg.norm(first_principal_axis(X)) - 1.0) < 1e-12


class TestOrientedMean:
    def test_flips_negative(self):
        v = np.array([0.2, 0.8])
        both_pos = oriented_mean(
            v, (Orientation.POSITIVE, Orientation.POSITIVE)
        )
        mixed = oriented_mean(
            v, (Orientation.POSITIVE, Orientation.NEGATIVE)
        )
        assert both_pos == pytest.approx(0.5)
        assert mixed == pytest.approx(0.2)


class TestInitCurve:
    def test_too_few_items(self, make_table):
        t = make_table([[0, 0], [1, 1], [0.5, 0.5]])
        with pytest.raises(TooFewItems):
            init_curve(normalize(t), t.orientations)

    def test_segment_through_data(self, make_table):
        t = line_table(make_table, n=20, d=2, seed=3)
        nt = normalize(t)
        c = init_curve(nt, t.orientations)
        # a PC segment through collinear data is itself collinear
        mid = evaluate(c, 0.5)
        ends = 0.5 * (evaluate(c, 0.0) + evaluate(c, 1.0))
        np.testing.assert_allclose(mid, ends, atol=1e-9)
        assert c.best_end is BestEnd.AT_T1


class TestFit:
    def test_distances_non_increasing(self, make_table):
        t = line_table(make_table, n=40, d=3, noise=0.05, seed=8)
        curve, report = fit_table(t)
        d = np.array(report.distances)
        assert np.all(np.diff(d) <= 1e-9)

    def test_converges_on_clean_line(self, make_table):
        t = line_table(make_table, n=40, d=3, noise=0.0, seed=9)
        curve, report = fit_table(t)
        assert report.converged
        nt = normalize(t)
        _, dist, _ = project_points(curve, nt.values)
        assert float((dist**2).sum()) < 1e-10

    def test_deterministic(self, make_table):
        t = line_table(make_table, n=35, d=4, noise=0.1, seed=10)
        cfg = FitConfig(max_iters=40)
        c1, r1 = fit_table(t, cfg)
        c2, r2 = fit_table(t, cfg)
        np.testing.assert_array_equal(c1.control_points, c2.control_points)
        assert r1.distances == r2.distances

    def test_workers_do_not_change_result(self, make_table):
        t = line_table(make_table, n=35, d=4, noise=0.1, seed=11)
        c1, _ = fit_table(t, FitConfig(max_iters=40, workers=1))
        c8, _ = fit_table(t, FitConfig(max_iters=40, workers=8))
        np.testing.assert_array_equal(c1.control_points, c8.control_points)

    def test_report_monotonicity_entries(self, make_table):
        t = line_table(make_table, n=40, d=3, noise=0.0, seed=12)
        _, report = fit_table(t)
        assert len(report.monotonicity) == 3
        for v in report.monotonicity:
            assert isinstance(v, Monotonicity)

    def test_best_end_orientation(self, make_table):
        """The high-scoring end must carry the oriented-best profile."""
        t = line_table(make_table, n=30, d=2, noise=0.02, seed=13)
        curve, _ = fit_table(t)
        top = evaluate(curve, 1.0 if curve.best_end is BestEnd.AT_T1 else 0.0)
        bot = evaluate(curve, 0.0 if curve.best_end is BestEnd.AT_T1 else 1.0)
        om = lambda p: oriented_mean(p, t.orientations)
        assert om(top) > om(bot)


class TestRank:
    def test_orders_follow_scores(self, make_table):
        t = line_table(make_table, n=25, d=3, noise=0.02, seed=14)
        curve, _ = fit_table(t)
        r = rank(t, curve)
        s = np.array(r.scores)
        o = np.array(r.orders)
        assert o[np.argmax(s)] == 1
        # same permutation both ways
        np.testing.assert_array_equal(
            np.argsort(-s, kind="stable"), np.argsort(o, kind="stable")
        )

    def test_requires_matching_transform(self, make_table):
        t = line_table(make_table, n=25, d=2, noise=0.02, seed=15)
        curve, _ = fit_table(t)
        other = make_table(
            np.asarray(t.values), names=["foo", "bar"]
        )
        with pytest.raises(TransformMismatch):
            rank(other, curve)

    def test_rank_of_training_data_matches_projection(self, make_table):
        t = line_table(make_table, n=25, d=3, noise=0.05, seed=16)
        curve, _ = fit_table(t)
        r = rank(t, curve)
        nt = normalize(t)
        ts, _, _ = project_points(curve, nt.values)
        want = ts if curve.best_end is BestEnd.AT_T1 else 1.0 - ts
        np.testing.assert_array_equal(np.asarray(r.scores), want)


class TestPersistence:
    def test_save_and_load_roundtrip(self, make_table, tmp_path):
        t = line_table(make_table, n=30, d=3, noise=0.05, seed=17)
        curve, report = fit_table(t)
        ranking = rank(t, curve)
        path = tmp_path / "fit.json"
        save_fit(path, curve, report, ranking)
        loaded = load_curve(path)
        np.testing.assert_array_equal(
            loaded.control_points, curve.control_points
        )
        assert loaded.best_end is curve.best_end
        assert loaded.transform is not None
        np.testing.assert_array_equal(
            loaded.transform.mins, curve.transform.mins
        )
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert "curve" in payload and "ranking" in payload

    def test_rank_with_loaded_curve(self, make_table, tmp_path):
        t = line_table(make_table, n=30, d=3, noise=0.05, seed=18)
        curve, report = fit_table(t)
        path = tmp_path / "fit.json"
        save_fit(path, curve, report, rank(t, curve))
        loaded = load_curve(path)
        r1 = rank(t, curve)
        r2 = rank(t, loaded)
        np.testing.assert_array_equal(r1.orders, r2.orders)

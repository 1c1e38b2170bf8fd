"""Orthogonal projection of points onto a ranking curve.

For each point x the projector minimizes ||x - C(t)||^2 over t in [0, 1].
The squared distance is a degree-6 polynomial in t with at most five
stationary points, so the search is: sample a uniform grid (1025 points by
default), collect candidate cells (grid-local minima of the distance plus
descending sign changes of g(t) = <x - C(t), C'(t)>), refine each candidate
with bisection-safeguarded Newton iterations on g, then compare every
refined candidate against both endpoints.  Ties break toward smaller t.

All per-point work is elementwise, and multi-worker runs reassemble
per-item results in input order, so outputs are bit-identical for any
worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bezier import BestEnd, RankingCurve
from .errors import DomainError

DEFAULT_GRID_SIZE = 1025
_NEWTON_ROUNDS = 80


@dataclass(frozen=True)
class ProjectionResult:
    """Foot of the projection: parameter, Euclidean distance, clamp flag.

    ``clamped`` is set when the minimizer sits at an endpoint only because
    the parameter range ends there (the unconstrained minimizer would lie
    outside [0, 1]).
    """

    t: float
    distance: float
    clamped: bool


def _bernstein3(ts: np.ndarray) -> np.ndarray:
    s = 1.0 - ts
    return np.stack([s**3, 3.0 * ts * s**2, 3.0 * ts**2 * s, ts**3], axis=-1)


def _eval_many(pts: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """de Casteljau for a (k x d) control array at a batch of ts."""
    tt = ts[..., None]
    level = [p for p in pts]
    while len(level) > 1:
        level = [(1.0 - tt) * a + tt * b for a, b in zip(level[:-1], level[1:])]
    return level[0]


def _g_and_slope(curve_pts, hodo, hodo2, ts, xs):
    """g(t) = <x - C(t), C'(t)> and g'(t), vectorized over pairs."""
    c = _eval_many(curve_pts, ts)
    dc = _eval_many(hodo, ts)
    ddc = _eval_many(hodo2, ts)
    r = xs - c
    g = np.sum(r * dc, axis=-1)
    gp = -np.sum(dc * dc, axis=-1) + np.sum(r * ddc, axis=-1)
    return g, gp


def _g_only(curve_pts, hodo, ts, xs):
    c = _eval_many(curve_pts, ts)
    dc = _eval_many(hodo, ts)
    return np.sum((xs - c) * dc, axis=-1)


def _project_batch(curve: RankingCurve, pts: np.ndarray, grid_size: int):
    n, d = pts.shape
    cp = curve.control_points
    hodo = 3.0 * np.diff(cp, axis=0)
    hodo2 = 6.0 * (cp[2:] - 2.0 * cp[1:3] + cp[:2])

    ts_grid = np.linspace(0.0, 1.0, grid_size)
    grid_curve = _bernstein3(ts_grid) @ cp  # (m, d)
    diff = pts[:, None, :] - grid_curve[None, :, :]
    dist2 = np.einsum("nmd,nmd->nm", diff, diff)

    # candidate cells: distance local minima on the grid
    interior_min = (dist2[:, 1:-1] <= dist2[:, :-2]) & (
        dist2[:, 1:-1] <= dist2[:, 2:]
    )
    # plus descending sign changes of g on the grid (catches minima whose
    # basin is narrower than the distance stencil)
    grid_dc = _eval_many(hodo, ts_grid)
    g_grid = np.einsum(
        "nmd,md->nm", pts[:, None, :] - grid_curve[None, :, :], grid_dc
    )
    g_cross = (g_grid[:, :-1] >= 0.0) & (g_grid[:, 1:] < 0.0)  # cell k..k+1
    cell_mask = np.zeros((n, grid_size), dtype=bool)
    cell_mask[:, 1:-1] = interior_min
    cross_i, cross_k = np.nonzero(g_cross)
    # center the crossing cell on its right grid point (bracket covers it)
    kk = np.minimum(cross_k + 1, grid_size - 2)
    cell_mask[cross_i, kk] = True

    pair_i, pair_k = np.nonzero(cell_mask)
    cand_i = [np.arange(n), np.arange(n)]
    cand_t = [np.zeros(n), np.ones(n)]

    if pair_i.size:
        lo = ts_grid[pair_k - 1]
        hi = ts_grid[pair_k + 1]
        tc = ts_grid[pair_k]
        xs = pts[pair_i]
        glo = _g_only(cp, hodo, lo, xs)
        ghi = _g_only(cp, hodo, hi, xs)
        valid = (glo >= 0.0) & (ghi <= 0.0)
        lo = np.where(valid, lo, tc)
        hi = np.where(valid, hi, tc)
        with np.errstate(divide="ignore", invalid="ignore"):
            for _ in range(_NEWTON_ROUNDS):
                g, gp = _g_and_slope(cp, hodo, hodo2, tc, xs)
                step = tc - g / gp
                ok = np.isfinite(step) & (step > lo) & (step < hi)
                tn = np.where(ok, step, 0.5 * (lo + hi))
                gn = _g_only(cp, hodo, tn, xs)
                lo = np.where(gn > 0.0, tn, lo)
                hi = np.where(gn <= 0.0, tn, hi)
                tc = np.where(valid, tn, tc)
        cand_i.append(pair_i)
        cand_t.append(tc)

    all_i = np.concatenate(cand_i)
    all_t = np.concatenate(cand_t)
    cand_pts = _eval_many(cp, all_t)
    all_d2 = np.sum((pts[all_i] - cand_pts) ** 2, axis=-1)

    # per point: smallest distance, ties toward smaller t
    order = np.lexsort((all_t, all_d2, all_i))
    ordered_i = all_i[order]
    first = np.searchsorted(ordered_i, np.arange(n), side="left")
    best = order[first]
    t_best = all_t[best]
    d2_best = all_d2[best]

    g0 = _g_only(cp, hodo, np.zeros(n), pts)
    g1 = _g_only(cp, hodo, np.ones(n), pts)
    clamped = ((t_best == 0.0) & (g0 < 0.0)) | ((t_best == 1.0) & (g1 > 0.0))
    return t_best, np.sqrt(d2_best), clamped


def project_points(
    curve: RankingCurve,
    points: np.ndarray,
    grid_size: int = DEFAULT_GRID_SIZE,
    workers: int = 1,
):
    """Project many points; returns (t, distance, clamped) arrays."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != curve.dim:
        raise DomainError(
            f"points have dimension {pts.shape[1]}, curve has {curve.dim}"
        )
    if grid_size < 3:
        raise DomainError("grid_size must be at least 3")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points must be finite")
    if workers <= 1 or pts.shape[0] < 2:
        return _project_batch(curve, pts, grid_size)
    chunks = np.array_split(np.arange(pts.shape[0]), workers)
    chunks = [c for c in chunks if c.size]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(
            pool.map(lambda c: _project_batch(curve, pts[c], grid_size), chunks)
        )
    ts = np.concatenate([p[0] for p in parts])
    dist = np.concatenate([p[1] for p in parts])
    clamped = np.concatenate([p[2] for p in parts])
    return ts, dist, clamped


def project_point(
    curve: RankingCurve, x: np.ndarray, grid_size: int = DEFAULT_GRID_SIZE
) -> ProjectionResult:
    """Project a single point onto the curve."""
    ts, dist, clamped = project_points(curve, np.asarray(x, dtype=float)[None, :],
                                       grid_size=grid_size)
    return ProjectionResult(
        t=float(ts[0]), distance=float(dist[0]), clamped=bool(clamped[0])
    )


def score_from_t(t, best_end: BestEnd):
    """Score in [0, 1]: t itself when the best end is t=1, else 1 - t."""
    tt = np.asarray(t, dtype=float)
    out = tt if best_end is BestEnd.AT_T1 else 1.0 - tt
    return float(out) if out.ndim == 0 else out


def score(result: ProjectionResult, best_end: BestEnd) -> float:
    return float(score_from_t(result.t, best_end))

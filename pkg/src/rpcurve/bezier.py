"""Cubic Bezier ranking curves and their geometric diagnostics.

A ranking curve is a d-dimensional cubic Bezier segment,

    C(t) = sum_i B_{i,3}(t) * P_i,   t in [0, 1],

with exactly four control points, evaluated through the recursive
de Casteljau construction.  One end of the parameter interval is tagged as
the "best" end; projection parameters are turned into scores against that
tag.  The diagnostics below (monotonicity, nonlinearity index, shape class)
are all closed-form: the derivative of each coordinate is a quadratic in t
and the chord deviation is a low-degree polynomial, so no sampling is
needed for exact verdicts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly

from .data import NormalizationTransform
from .errors import (
    DegenerateChord,
    DegenerateCurve,
    DomainError,
    NotMonotoneInPair,
)


class BestEnd(enum.Enum):
    AT_T0 = "at_t0"
    AT_T1 = "at_t1"


class Monotonicity(enum.Enum):
    STRICTLY_INCREASING = "strictly-increasing"
    STRICTLY_DECREASING = "strictly-decreasing"
    NOT_MONOTONE = "not-monotone"


class ShapeClass(enum.Enum):
    LINEAR = "linear"
    C = "c"
    REVERSE_C = "reverse-c"
    S = "s"
    REVERSE_S = "reverse-s"


LINEAR_SHAPE_TOL = 1e-6


@dataclass(frozen=True)
class RankingCurve:
    """Four control points (rows of a 4 x d array) plus the best-end tag.

    The optional transform records the raw-unit scaling of the space the
    curve was fitted in, so control points can be reported in raw units and
    new tables can be normalized consistently before projection.
    """

    control_points: np.ndarray
    best_end: BestEnd = BestEnd.AT_T1
    transform: NormalizationTransform | None = None

    def __post_init__(self) -> None:
        pts = np.array(self.control_points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] != 4 or pts.shape[1] < 1:
            raise DegenerateCurve(
                f"control points must form a 4 x d array, got {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise DegenerateCurve("control points must all be finite")
        if np.array_equal(pts[0], pts[3]):
            raise DegenerateCurve("curve endpoints P0 and P3 coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "control_points", pts)

    @property
    def dim(self) -> int:
        return self.control_points.shape[1]

    def reversed(self) -> "RankingCurve":
        """Same geometry traversed backwards (t -> 1 - t)."""
        flipped = {BestEnd.AT_T0: BestEnd.AT_T1, BestEnd.AT_T1: BestEnd.AT_T0}
        return RankingCurve(
            control_points=self.control_points[::-1].copy(),
            best_end=flipped[self.best_end],
            transform=self.transform,
        )


def _check_t(t) -> np.ndarray:
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0.0) or np.any(tt > 1.0) or not np.all(np.isfinite(tt)):
        bad = tt if tt.ndim == 0 else tt[(tt < 0) | (tt > 1) | ~np.isfinite(tt)][0]
        raise DomainError(f"parameter t={float(bad)} outside [0, 1]")
    return tt


def _casteljau(points: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Repeated linear interpolation of ``points`` (k x d) at t (...)->(..., d)."""
    tt = t[..., None]
    level = [p for p in points]
    while len(level) > 1:
        level = [
            (1.0 - tt) * a + tt * b for a, b in zip(level[:-1], level[1:])
        ]
    return level[0]


def evaluate(curve: RankingCurve, t) -> np.ndarray:
    """C(t) by de Casteljau; t may be a scalar or an array in [0, 1]."""
    tt = _check_t(t)
    return _casteljau(curve.control_points, tt)


def derivative(curve: RankingCurve, t) -> np.ndarray:
    """C'(t) = 3 * sum_i B_{i,2}(t) (P_{i+1} - P_i)."""
    tt = _check_t(t)
    hodo = 3.0 * np.diff(curve.control_points, axis=0)
    return _casteljau(hodo, tt)


def second_derivative(curve: RankingCurve, t) -> np.ndarray:
    tt = _check_t(t)
    pts = curve.control_points
    hodo2 = 6.0 * (pts[2:] - 2.0 * pts[1:3] + pts[:2])
    return _casteljau(hodo2, tt)


def _coordinate_derivative_extremes(curve: RankingCurve, dim: int):
    """Values of the quadratic q(t) = C'_dim(t) at its extremes over [0, 1].

    The extremes of a quadratic on an interval sit at the interval ends or
    at the interior vertex, so the returned values bound q exactly.
    """
    p = curve.control_points[:, dim]
    d0, d1, d2 = p[1] - p[0], p[2] - p[1], p[3] - p[2]
    # q(t)/3 = (d0 - 2 d1 + d2) t^2 + 2 (d1 - d0) t + d0
    a = d0 - 2.0 * d1 + d2
    b = 2.0 * (d1 - d0)
    vals = [3.0 * d0, 3.0 * d2]
    if a != 0.0:
        tv = -b / (2.0 * a)
        if 0.0 < tv < 1.0:
            vals.append(3.0 * ((a * tv + b) * tv + d0))
    identically_zero = d0 == 0.0 and d1 == 0.0 and d2 == 0.0
    return vals, identically_zero


def is_monotone(curve: RankingCurve, dim: int) -> Monotonicity:
    """Exact sign analysis of the coordinate derivative on (0, 1).

    Strictly monotone iff the quadratic C'_dim keeps one sign on the open
    interval and is not identically zero; an isolated interior zero (double
    root) does not break strictness.
    """
    if not 0 <= dim < curve.dim:
        raise DomainError(f"dimension {dim} out of range for d={curve.dim}")
    vals, identically_zero = _coordinate_derivative_extremes(curve, dim)
    if identically_zero:
        return Monotonicity.NOT_MONOTONE
    lo, hi = min(vals), max(vals)
    if lo >= 0.0 and hi > 0.0:
        return Monotonicity.STRICTLY_INCREASING
    if hi <= 0.0 and lo < 0.0:
        return Monotonicity.STRICTLY_DECREASING
    return Monotonicity.NOT_MONOTONE


def _power_coefficients(points: np.ndarray) -> np.ndarray:
    """Power-basis coefficients (4 x d) of the cubic through control rows."""
    q0, q1, q2, q3 = points
    return np.stack(
        [
            q0,
            3.0 * (q1 - q0),
            3.0 * (q2 - 2.0 * q1 + q0),
            q3 - 3.0 * q2 + 3.0 * q1 - q0,
        ]
    )


def nonlinearity_index(curve: RankingCurve) -> float:
    """Peak orthogonal deviation from the P0-P3 chord over chord length.

    The squared deviation is a degree-6 polynomial in t, so the maximum is
    located exactly through the roots of its degree-5 derivative.  Zero iff
    the control points are collinear (with ordered parameterization);
    invariant under uniform scaling of the control points.
    """
    pts = curve.control_points
    chord = pts[3] - pts[0]
    length = float(np.linalg.norm(chord))
    if length == 0.0:
        raise DegenerateChord("chord P0-P3 has zero length")
    u = chord / length
    rel = pts - pts[0]
    coeffs = _power_coefficients(rel)  # cubic coefficients of C(t) - P0
    perp = coeffs - np.outer(coeffs @ u, u)
    sq = np.zeros(7)
    for j in range(perp.shape[1]):
        sq += np.convolve(perp[:, j], perp[:, j])
    deriv = npoly.polyder(sq)
    candidates = [0.0, 1.0]
    if np.any(deriv != 0.0):
        roots = npoly.polyroots(deriv)
        for r in roots:
            if abs(r.imag) < 1e-9 and 0.0 <= r.real <= 1.0:
                candidates.append(float(r.real))
    peak = max(float(npoly.polyval(t, sq)) for t in candidates)
    return math.sqrt(max(peak, 0.0)) / length


def classify_shape(
    curve: RankingCurve, dim_x: int, dim_y: int,
    linear_tol: float = LINEAR_SHAPE_TOL,
) -> ShapeClass:
    """Classify the (dim_x, dim_y) profile as one of the five shapes.

    Both dimensions must be strictly monotone.  The curve restricted to the
    pair is traversed with x increasing; its signed deviation from the
    chord factors as s(t) = 3 t (1-t) [(1-t) c1 + t c2] where c1, c2 are
    cross products of the interior control points against the chord.
    Convention: single-signed deviation above the chord is C, below is
    ReverseC; below-then-above (sigmoid-like) is S, above-then-below is
    ReverseS; deviation within ``linear_tol`` of the chord length is
    Linear.
    """
    mx = is_monotone(curve, dim_x)
    my = is_monotone(curve, dim_y)
    if Monotonicity.NOT_MONOTONE in (mx, my):
        raise NotMonotoneInPair(
            f"dimensions ({dim_x}, {dim_y}) have verdicts "
            f"({mx.value}, {my.value}); both must be strictly monotone"
        )
    q = curve.control_points[:, [dim_x, dim_y]]
    if q[3, 0] < q[0, 0]:
        q = q[::-1]
    chord = q[3] - q[0]
    length_sq = float(chord @ chord)
    if length_sq == 0.0:
        raise DegenerateChord("pair chord has zero length")

    def cross(v: np.ndarray) -> float:
        return float(chord[0] * v[1] - chord[1] * v[0])

    c1 = cross(q[1] - q[0])
    c2 = cross(q[2] - q[0])

    # max |3 t (1-t) ((1-t) c1 + t c2)| over [0, 1], exact via the quadratic
    # roots of the cubic's derivative
    cubic = np.array([0.0, 3.0 * c1, 3.0 * (c2 - 2.0 * c1), 3.0 * (c1 - c2)])
    deriv = npoly.polyder(cubic)
    candidates = [0.0, 1.0]
    if np.any(deriv != 0.0):
        for r in npoly.polyroots(deriv):
            if abs(r.imag) < 1e-9 and 0.0 <= r.real <= 1.0:
                candidates.append(float(r.real))
    peak = max(abs(float(npoly.polyval(t, cubic))) for t in candidates)
    if peak / length_sq <= linear_tol:
        return ShapeClass.LINEAR

    zero_tol = linear_tol * length_sq
    s1 = 0 if abs(c1) <= zero_tol else (1 if c1 > 0 else -1)
    s2 = 0 if abs(c2) <= zero_tol else (1 if c2 > 0 else -1)
    if s1 >= 0 and s2 >= 0:
        return ShapeClass.C
    if s1 <= 0 and s2 <= 0:
        return ShapeClass.REVERSE_C
    if s1 < 0 < s2:
        return ShapeClass.S
    return ShapeClass.REVERSE_S


def curve_to_dict(curve: RankingCurve) -> dict:
    """JSON-ready curve payload: normalized and raw-unit control points."""
    out: dict = {
        "dim": curve.dim,
        "control_points": curve.control_points.tolist(),
        "best_end": curve.best_end.value,
    }
    if curve.transform is not None:
        raw = curve.transform.mins + curve.control_points * (
            curve.transform.maxs - curve.transform.mins
        )
        out["control_points_raw"] = raw.tolist()
    return out


def curve_from_dict(
    d: Mapping, transform: NormalizationTransform | None = None
) -> RankingCurve:
    return RankingCurve(
        control_points=np.asarray(d["control_points"], dtype=float),
        best_end=BestEnd(d["best_end"]),
        transform=transform,
    )

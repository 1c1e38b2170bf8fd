"""Meta-criteria audit: does a ranking method behave objectively?

Eight criteria are checked for any ranking pipeline over a given table:

  ScaleInvariance        orders survive per-column positive rescaling
  TranslationInvariance  orders survive per-column shifts
  StrictMonotonicity     every curve dimension strictly monotone, directed
                         consistently with its orientation
  LinearCompatibility    collinear data is recovered as a straight curve
                         with the first-principal-component order
  Smoothness             analytic curve derivative matches central finite
                         differences
  NoFreeParameters       nothing user-tunable; parameters are a function of
                         the data and dimension count alone
  Reproducibility        re-running the pipeline is bit-identical
  OpenDataDeclared       the evaluated dataset declares its provenance

Perturbation trials use fixed, documented sequences (nothing random):
scaling trial 0 rescales dimension 0 alone by 6.8 and later trials rotate
(0.5, 2, 6.8, 1000) across all dimensions; translation trial 0 shifts
dimension min(1, d-1) by +100 and later trials rotate
(100, 10, -0.5, 3.75).  Every Fail carries a witness that replays through
the pipeline to the same order discrepancy.  Curve-specific criteria
report NotApplicable for score-table baselines without a curve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .baselines import (
    arithmetic_mean_rank,
    entropy_weight_rank,
    geometric_mean_rank,
    pca_rank,
)
from .bezier import (
    BestEnd,
    Monotonicity,
    RankingCurve,
    derivative,
    evaluate,
    is_monotone,
)
from .data import IndicatorTable, Orientation
from .errors import PipelineFailure, RankingError
from .fitting import FitConfig, FitReport, RankingResult, fit_table, rank

SCALE_FACTORS = (0.5, 2.0, 6.8, 1000.0)
SHIFT_AMOUNTS = (100.0, 10.0, -0.5, 3.75)


class Criterion(enum.Enum):
    SCALE_INVARIANCE = "ScaleInvariance"
    TRANSLATION_INVARIANCE = "TranslationInvariance"
    STRICT_MONOTONICITY = "StrictMonotonicity"
    LINEAR_COMPATIBILITY = "LinearCompatibility"
    SMOOTHNESS = "Smoothness"
    NO_FREE_PARAMETERS = "NoFreeParameters"
    REPRODUCIBILITY = "Reproducibility"
    OPEN_DATA_DECLARED = "OpenDataDeclared"


class Verdict(enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class CriterionResult:
    criterion: Criterion
    verdict: Verdict
    evidence: str
    witness: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "criterion": self.criterion.value,
            "verdict": self.verdict.value,
            "evidence": self.evidence,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class MetaCriteriaReport:
    """One result per criterion, in the canonical order above."""

    pipeline: str
    results: tuple[CriterionResult, ...]

    def __post_init__(self) -> None:
        got = [r.criterion for r in self.results]
        expected = list(Criterion)
        if got != expected:
            raise RankingError(
                "report must contain every criterion exactly once, in order"
            )

    def get(self, criterion: Criterion) -> CriterionResult:
        return self.results[list(Criterion).index(criterion)]

    @property
    def all_applicable_pass(self) -> bool:
        return all(
            r.verdict is not Verdict.FAIL for r in self.results
        )

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "criteria": [r.to_dict() for r in self.results],
            "all_applicable_pass": self.all_applicable_pass,
        }

    def render_text(self) -> str:
        lines = [f"meta-criteria audit: {self.pipeline}"]
        for r in self.results:
            lines.append(
                f"  {r.criterion.value:<22} {r.verdict.value:<14} {r.evidence}"
            )
        lines.append(
            "  result: "
            + ("all applicable criteria pass" if self.all_applicable_pass
               else "FAILURES present")
        )
        return "\n".join(lines)


@dataclass(frozen=True)
class RankingPipeline:
    """A deterministic ranking method under audit.

    ``run`` maps a table to a RankingResult.  Curve-based methods also
    expose ``fit_curve`` (table -> (curve, report)) and a parameter count
    as a function of the dimension; methods with user-tunable knobs list
    them in ``declared_free_parameters``.
    """

    name: str
    run: Callable[[IndicatorTable], RankingResult]
    fit_curve: Callable[[IndicatorTable], tuple[RankingCurve, FitReport]] | None = None
    parameter_count: Callable[[int], int] | None = None
    declared_free_parameters: tuple[str, ...] = ()
    provenance: str | None = None


def rpc_pipeline(config: FitConfig | None = None) -> RankingPipeline:
    cfg = config or FitConfig()

    def _fit(table: IndicatorTable):
        return fit_table(table, cfg)

    def _run(table: IndicatorTable) -> RankingResult:
        curve, _ = _fit(table)
        return rank(table, curve, grid_size=cfg.grid_size,
                    workers=cfg.workers)

    return RankingPipeline(
        name="rpc",
        run=_run,
        fit_curve=_fit,
        parameter_count=lambda d: 4 * d,
    )


def arithmetic_pipeline(weights=None, variant: str = "raw") -> RankingPipeline:
    name = "arithmetic" if variant == "raw" else "arithmetic-norm"
    return RankingPipeline(
        name=name,
        run=lambda table: arithmetic_mean_rank(table, weights, variant),
        declared_free_parameters=("weights",) if weights is not None else (),
    )


def geometric_pipeline(variant: str = "normalized") -> RankingPipeline:
    name = "geometric" if variant == "normalized" else "geometric-raw"
    return RankingPipeline(
        name=name,
        run=lambda table: geometric_mean_rank(table, variant),
    )


def pca_pipeline() -> RankingPipeline:
    return RankingPipeline(name="pca", run=pca_rank)


def entropy_pipeline() -> RankingPipeline:
    return RankingPipeline(name="entropy", run=entropy_weight_rank)


def scale_vectors(d: int, trials: int):
    """The documented deterministic per-dimension scaling sequence."""
    out = []
    for r in range(trials):
        if r == 0:
            vec = np.ones(d)
            vec[0] = 6.8
        else:
            vec = np.array(
                [SCALE_FACTORS[(j + r) % len(SCALE_FACTORS)] for j in range(d)]
            )
        out.append(vec)
    return out


def shift_vectors(d: int, trials: int):
    """The documented deterministic per-dimension shift sequence."""
    out = []
    for r in range(trials):
        if r == 0:
            vec = np.zeros(d)
            vec[min(1, d - 1)] = 100.0
        else:
            vec = np.array(
                [SHIFT_AMOUNTS[(j + r) % len(SHIFT_AMOUNTS)] for j in range(d)]
            )
        out.append(vec)
    return out


def _run_trial(pipeline: RankingPipeline, table: IndicatorTable,
               label: str) -> RankingResult:
    try:
        return pipeline.run(table)
    except Exception as exc:  # noqa: BLE001 - context added, then re-raised
        raise PipelineFailure(
            f"pipeline {pipeline.name!r} failed during {label}: {exc}"
        ) from exc


def _first_divergence(ids, base: np.ndarray, other: np.ndarray) -> str:
    for item, a, b in zip(ids, base, other):
        if a != b:
            return f"{item}: order {int(a)} -> {int(b)}"
    return "tie structure changed"


def _invariance_check(
    pipeline: RankingPipeline,
    table: IndicatorTable,
    criterion: Criterion,
    vectors,
    perturb: Callable[[np.ndarray, np.ndarray], np.ndarray],
    kind: str,
) -> CriterionResult:
    base = _run_trial(pipeline, table, f"{kind} base run")
    for r, vec in enumerate(vectors):
        perturbed = table.with_values(perturb(table.values, vec))
        res = _run_trial(pipeline, perturbed, f"{kind} trial {r}")
        if not np.array_equal(base.orders, res.orders):
            return CriterionResult(
                criterion=criterion,
                verdict=Verdict.FAIL,
                evidence=(
                    f"trial {r} ({kind} {np.asarray(vec).tolist()}) changed "
                    f"the order: {_first_divergence(table.item_ids, base.orders, res.orders)}"
                ),
                witness={
                    "kind": kind,
                    "trial": r,
                    "vector": np.asarray(vec).tolist(),
                    "base_orders": base.orders.tolist(),
                    "perturbed_orders": res.orders.tolist(),
                    "item_ids": list(table.item_ids),
                },
            )
    return CriterionResult(
        criterion=criterion,
        verdict=Verdict.PASS,
        evidence=f"orders bit-identical across {len(vectors)} {kind} trials",
    )


def check_scale_invariance(
    pipeline: RankingPipeline, table: IndicatorTable, trials: int = 4
) -> CriterionResult:
    return _invariance_check(
        pipeline,
        table,
        Criterion.SCALE_INVARIANCE,
        scale_vectors(table.n_indicators, trials),
        lambda values, vec: values * vec,
        "scale",
    )


def check_translation_invariance(
    pipeline: RankingPipeline, table: IndicatorTable, trials: int = 4
) -> CriterionResult:
    return _invariance_check(
        pipeline,
        table,
        Criterion.TRANSLATION_INVARIANCE,
        shift_vectors(table.n_indicators, trials),
        lambda values, vec: values + vec,
        "shift",
    )


def check_monotonicity(
    curve: RankingCurve, orientations
) -> CriterionResult:
    """Strict monotonicity per dimension, directed by orientation.

    With the best end at t=1, positive indicators must strictly increase
    along t and negative ones strictly decrease (mirrored for t=0).
    """
    expected_pos = (
        Monotonicity.STRICTLY_INCREASING
        if curve.best_end is BestEnd.AT_T1
        else Monotonicity.STRICTLY_DECREASING
    )
    expected_neg = (
        Monotonicity.STRICTLY_DECREASING
        if curve.best_end is BestEnd.AT_T1
        else Monotonicity.STRICTLY_INCREASING
    )
    verdicts = []
    bad = []
    for j, orientation in enumerate(orientations):
        v = is_monotone(curve, j)
        verdicts.append(v)
        want = (
            expected_pos if orientation is Orientation.POSITIVE else expected_neg
        )
        if v is not want:
            bad.append((j, orientation.value, v.value, want.value))
    if bad:
        return CriterionResult(
            criterion=Criterion.STRICT_MONOTONICITY,
            verdict=Verdict.FAIL,
            evidence="; ".join(
                f"dim {j} ({o}): {got}, expected {want}"
                for j, o, got, want in bad
            ),
            witness={
                "dimensions": [
                    {"dim": j, "orientation": o, "verdict": got,
                     "expected": want}
                    for j, o, got, want in bad
                ]
            },
        )
    return CriterionResult(
        criterion=Criterion.STRICT_MONOTONICITY,
        verdict=Verdict.PASS,
        evidence="all dimensions strictly monotone in the oriented direction",
    )


def collinear_table(n: int = 50, d: int = 4) -> IndicatorTable:
    """Noiseless collinear synthetic data (documented fixed generator)."""
    base = np.array([2.0, 10.0, 5.0, 100.0][:d])
    span = np.array([3.0, 40.0, 0.5, 900.0][:d])
    steps = np.arange(n) / (n - 1)
    values = base + steps[:, None] * span
    return IndicatorTable(
        item_ids=tuple(f"item-{i:02d}" for i in range(n)),
        indicator_names=tuple(f"ind{j}" for j in range(d)),
        orientations=(Orientation.POSITIVE,) * d,
        values=values,
        provenance="synthetic collinear benchmark",
    )


def check_linear_compatibility(
    fit_curve: Callable[[IndicatorTable], tuple],
    residual_tol: float = 1e-6,
) -> CriterionResult:
    """Fit noiseless collinear data; the curve must be straight (control
    points within ``residual_tol`` of the endpoint chord, relatively) and
    the induced order must equal the first-principal-component order."""
    table = collinear_table()
    curve, _ = fit_curve(table)
    pts = curve.control_points
    chord = pts[3] - pts[0]
    length = float(np.linalg.norm(chord))
    if length == 0.0:
        residual = float("inf")
    else:
        u = chord / length
        rel = pts[1:3] - pts[0]
        perp = rel - np.outer(rel @ u, u)
        residual = float(np.linalg.norm(perp, axis=1).max()) / length
    curve_orders = rank(table, curve).orders
    pca_orders = pca_rank(table).orders
    same_order = bool(np.array_equal(curve_orders, pca_orders))
    if residual <= residual_tol and same_order:
        return CriterionResult(
            criterion=Criterion.LINEAR_COMPATIBILITY,
            verdict=Verdict.PASS,
            evidence=(
                f"collinear recovery residual {residual:.3e} <= "
                f"{residual_tol:.0e}; order matches first-component order"
            ),
        )
    return CriterionResult(
        criterion=Criterion.LINEAR_COMPATIBILITY,
        verdict=Verdict.FAIL,
        evidence=(
            f"residual {residual:.3e} (tol {residual_tol:.0e}); order match: "
            f"{same_order}"
        ),
        witness={
            "residual": residual,
            "curve_orders": curve_orders.tolist(),
            "pca_orders": pca_orders.tolist(),
        },
    )


def check_smoothness(
    curve: RankingCurve, samples: int = 101, h: float = 1e-6,
    rel_tol: float = 1e-6,
) -> CriterionResult:
    """Analytic derivative vs central finite differences along the curve."""
    ts = np.linspace(h, 1.0 - h, samples)
    analytic = derivative(curve, ts)
    fd = (evaluate(curve, ts + h) - evaluate(curve, ts - h)) / (2.0 * h)
    num = np.linalg.norm(analytic - fd, axis=1)
    den = np.maximum(np.linalg.norm(analytic, axis=1), 1e-12)
    worst = float((num / den).max())
    if worst <= rel_tol:
        return CriterionResult(
            criterion=Criterion.SMOOTHNESS,
            verdict=Verdict.PASS,
            evidence=(
                f"max relative derivative mismatch {worst:.3e} <= "
                f"{rel_tol:.0e} over {samples} samples"
            ),
        )
    return CriterionResult(
        criterion=Criterion.SMOOTHNESS,
        verdict=Verdict.FAIL,
        evidence=f"derivative mismatch {worst:.3e} exceeds {rel_tol:.0e}",
        witness={"max_relative_error": worst, "h": h},
    )


def check_no_free_parameters(
    pipeline: RankingPipeline, table: IndicatorTable
) -> CriterionResult:
    if pipeline.declared_free_parameters:
        return CriterionResult(
            criterion=Criterion.NO_FREE_PARAMETERS,
            verdict=Verdict.FAIL,
            evidence=(
                "user-tunable parameters declared: "
                + ", ".join(pipeline.declared_free_parameters)
            ),
            witness={
                "declared_free_parameters": list(
                    pipeline.declared_free_parameters
                )
            },
        )
    first = _run_trial(pipeline, table, "free-parameter run 1")
    second = _run_trial(pipeline, table, "free-parameter run 2")
    identical = first.scores.tobytes() == second.scores.tobytes() and np.array_equal(
        first.orders, second.orders
    )
    notes = ["no declared user parameters"]
    if pipeline.fit_curve is not None and pipeline.parameter_count is not None:
        curve1, _ = pipeline.fit_curve(table)
        curve2, _ = pipeline.fit_curve(table)
        identical = identical and (
            curve1.control_points.tobytes() == curve2.control_points.tobytes()
        )
        count = curve1.control_points.size
        expected = pipeline.parameter_count(curve1.dim)
        if count != expected:
            return CriterionResult(
                criterion=Criterion.NO_FREE_PARAMETERS,
                verdict=Verdict.FAIL,
                evidence=(
                    f"parameter count {count} differs from the declared "
                    f"function of dimension ({expected})"
                ),
                witness={"count": count, "expected": expected},
            )
        notes.append(f"{count} fitted parameters = 4 x {curve1.dim}")
    if not identical:
        return CriterionResult(
            criterion=Criterion.NO_FREE_PARAMETERS,
            verdict=Verdict.FAIL,
            evidence="repeated runs are not bit-identical",
            witness={
                "orders_run1": first.orders.tolist(),
                "orders_run2": second.orders.tolist(),
            },
        )
    notes.append("repeated runs bit-identical")
    return CriterionResult(
        criterion=Criterion.NO_FREE_PARAMETERS,
        verdict=Verdict.PASS,
        evidence="; ".join(notes),
    )


def check_reproducibility(
    pipeline: RankingPipeline, table: IndicatorTable
) -> CriterionResult:
    first = _run_trial(pipeline, table, "reproducibility run 1")
    second = _run_trial(pipeline, table, "reproducibility run 2")
    if first.scores.tobytes() == second.scores.tobytes() and np.array_equal(
        first.orders, second.orders
    ):
        return CriterionResult(
            criterion=Criterion.REPRODUCIBILITY,
            verdict=Verdict.PASS,
            evidence="two runs produced bit-identical scores and orders",
        )
    return CriterionResult(
        criterion=Criterion.REPRODUCIBILITY,
        verdict=Verdict.FAIL,
        evidence="repeated runs differ",
        witness={
            "orders_run1": first.orders.tolist(),
            "orders_run2": second.orders.tolist(),
        },
    )


def check_open_data(
    pipeline: RankingPipeline, table: IndicatorTable
) -> CriterionResult:
    declared = table.provenance or pipeline.provenance
    if declared:
        return CriterionResult(
            criterion=Criterion.OPEN_DATA_DECLARED,
            verdict=Verdict.PASS,
            evidence=f"provenance declared: {declared[:80]}",
        )
    return CriterionResult(
        criterion=Criterion.OPEN_DATA_DECLARED,
        verdict=Verdict.FAIL,
        evidence="no dataset provenance declared",
        witness={"provenance": None},
    )


def _criterion_error(criterion: Criterion, exc: Exception) -> CriterionResult:
    return CriterionResult(
        criterion=criterion,
        verdict=Verdict.FAIL,
        evidence=f"pipeline error: {exc}",
        witness={"error": str(exc)},
    )


def audit(
    pipeline: RankingPipeline, table: IndicatorTable, trials: int = 4
) -> MetaCriteriaReport:
    """Run all eight criteria; per-criterion failures never abort the audit."""
    results: list[CriterionResult] = []

    try:
        results.append(check_scale_invariance(pipeline, table, trials))
    except PipelineFailure as exc:
        results.append(_criterion_error(Criterion.SCALE_INVARIANCE, exc))
    try:
        results.append(check_translation_invariance(pipeline, table, trials))
    except PipelineFailure as exc:
        results.append(_criterion_error(Criterion.TRANSLATION_INVARIANCE, exc))

    fitted = None
    fit_error: Exception | None = None
    if pipeline.fit_curve is not None:
        try:
            fitted, _ = pipeline.fit_curve(table)
        except Exception as exc:  # noqa: BLE001
            fit_error = exc

    if pipeline.fit_curve is None:
        results.append(
            CriterionResult(
                Criterion.STRICT_MONOTONICITY,
                Verdict.NOT_APPLICABLE,
                "method produces no evaluation curve",
            )
        )
        results.append(
            CriterionResult(
                Criterion.LINEAR_COMPATIBILITY,
                Verdict.NOT_APPLICABLE,
                "method produces no evaluation curve",
            )
        )
        results.append(
            CriterionResult(
                Criterion.SMOOTHNESS,
                Verdict.NOT_APPLICABLE,
                "method produces no evaluation curve",
            )
        )
    else:
        if fit_error is not None:
            results.append(
                _criterion_error(Criterion.STRICT_MONOTONICITY, fit_error)
            )
        else:
            results.append(check_monotonicity(fitted, table.orientations))
        try:
            results.append(check_linear_compatibility(pipeline.fit_curve))
        except Exception as exc:  # noqa: BLE001
            results.append(
                _criterion_error(Criterion.LINEAR_COMPATIBILITY, exc)
            )
        if fit_error is not None:
            results.append(_criterion_error(Criterion.SMOOTHNESS, fit_error))
        else:
            results.append(check_smoothness(fitted))

    try:
        results.append(check_no_free_parameters(pipeline, table))
    except PipelineFailure as exc:
        results.append(_criterion_error(Criterion.NO_FREE_PARAMETERS, exc))
    try:
        results.append(check_reproducibility(pipeline, table))
    except PipelineFailure as exc:
        results.append(_criterion_error(Criterion.REPRODUCIBILITY, exc))
    results.append(check_open_data(pipeline, table))

    return MetaCriteriaReport(pipeline=pipeline.name, results=tuple(results))


def replay_witness(
    pipeline: RankingPipeline,
    table: IndicatorTable,
    result: CriterionResult,
) -> bool:
    """Replay a scale/translation witness; True iff the recorded order
    discrepancy reproduces exactly."""
    if result.witness is None or "vector" not in result.witness:
        return False
    vec = np.asarray(result.witness["vector"], dtype=float)
    kind = result.witness["kind"]
    if kind == "scale":
        perturbed = table.with_values(table.values * vec)
    elif kind == "shift":
        perturbed = table.with_values(table.values + vec)
    else:
        return False
    base = pipeline.run(table)
    res = pipeline.run(perturbed)
    return (
        base.orders.tolist() == result.witness["base_orders"]
        and res.orders.tolist() == result.witness["perturbed_orders"]
        and not np.array_equal(base.orders, res.orders)
    )


def fleming_wallace_table() -> IndicatorTable:
    """Three items, two positively oriented indicators; rescaling one
    column flips the raw arithmetic-mean leader (classic benchmark-unit
    counterexample)."""
    return IndicatorTable(
        item_ids=("alpha", "beta", "gamma"),
        indicator_names=("ind1", "ind2"),
        orientations=(Orientation.POSITIVE, Orientation.POSITIVE),
        values=np.array([[10.0, 100.0], [50.0, 40.0], [30.0, 70.0]]),
        provenance="synthetic witness table (rescaling counterexample)",
    )


def ratio_scale_table() -> IndicatorTable:
    """Three items of strictly positive ratio-scale data; shifting flips a
    geometric-mean comparison while rescaling never does."""
    return IndicatorTable(
        item_ids=("a", "b", "c"),
        indicator_names=("ind1", "ind2"),
        orientations=(Orientation.POSITIVE, Orientation.POSITIVE),
        values=np.array([[1.0, 100.0], [12.0, 12.0], [5.0, 45.0]]),
        provenance="synthetic ratio-scale witness table",
    )

"""Command-line interface.

Subcommands: ``fit``, ``rank``, ``check``, ``compare``, ``plotdata``.
Exit codes: 0 success; 1 failed audit criteria (``check`` only);
2 validation problems (unreadable/malformed input, unknown method,
mismatched dimensions, unwritable output); 3 fit failures.  Outputs are
deterministic: identical invocations write byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import baselines, evaluation
from .bezier import RankingCurve, evaluate
from .data import (
    BUNDLED_PROVENANCE,
    IndicatorTable,
    apply_transform,
    bundled_data_path,
    load_schema,
    load_table,
)
from .errors import (
    DegenerateCurve,
    DegenerateParameterSpread,
    LoadError,
    PipelineFailure,
    RankingError,
    TooFewItems,
    TransformMismatch,
)
from .fitting import FitConfig, fit_table, load_curve, rank, save_fit

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_FIT_FAILURE = 3

PIPELINE_TOKENS = (
    "rpc",
    "arithmetic",
    "arithmetic-norm",
    "geometric",
    "geometric-raw",
    "pca",
    "entropy",
)
REFERENCE_TOKEN = "elmap-reference"


def _pipeline_for(token: str, config: FitConfig) -> evaluation.RankingPipeline:
    if token == "rpc":
        return evaluation.rpc_pipeline(config)
    if token == "arithmetic":
        return evaluation.arithmetic_pipeline(variant="raw")
    if token == "arithmetic-norm":
        return evaluation.arithmetic_pipeline(variant="normalized")
    if token == "geometric":
        return evaluation.geometric_pipeline(variant="normalized")
    if token == "geometric-raw":
        return evaluation.geometric_pipeline(variant="raw")
    if token == "pca":
        return evaluation.pca_pipeline()
    if token == "entropy":
        return evaluation.entropy_pipeline()
    raise RankingError(f"unknown method {token!r}")


def _load_inputs(data_path: str, schema_path: str) -> IndicatorTable:
    schema = load_schema(schema_path)
    provenance = None
    try:
        import os

        if os.path.realpath(data_path) == os.path.realpath(
            str(bundled_data_path())
        ):
            provenance = BUNDLED_PROVENANCE
    except OSError:
        pass
    return load_table(data_path, schema, provenance=provenance)


def cmd_fit(args) -> int:
    table = _load_inputs(args.data, args.schema)
    config = FitConfig(max_iters=args.max_iters, rel_tol=args.rel_tol)
    curve, report = fit_table(table, config)
    ranking = rank(table, curve, grid_size=config.grid_size)
    save_fit(args.out, curve, report, ranking)
    print(
        f"fit: {table.n_items} items, {table.n_indicators} dims, "
        f"{report.iterations} iterations, "
        f"converged={str(report.converged).lower()}, wrote {args.out}"
    )
    return EXIT_OK


def _ranking_rows(ranking) -> list[list]:
    return [
        [item, repr(float(s)), int(o)]
        for item, s, o in zip(ranking.item_ids, ranking.scores, ranking.orders)
    ]


def cmd_rank(args) -> int:
    schema = load_schema(args.schema) if args.schema else None
    curve = load_curve(args.curve)
    if schema is not None:
        table = load_table(args.data, schema)
    else:
        if curve.transform is None:
            raise TransformMismatch(
                "curve file has no transform; supply --schema"
            )
        names = curve.transform.indicator_names
        # orientations are irrelevant for scoring against a fitted curve
        table = load_table(
            args.data, {name: "positive" for name in names}
        )
    ranking = rank(table, curve)
    if args.format == "csv":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "score", "order"])
            writer.writerows(_ranking_rows(ranking))
    else:
        payload = {
            "method": ranking.method,
            "items": [
                {"id": r["id"], "score": r["score"], "order": r["order"]}
                | ({"tied": True} if r["tied"] else {})
                for r in ranking.to_rows()
            ],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    print(f"rank: scored {table.n_items} items, wrote {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    table = _load_inputs(args.data, args.schema)
    config = FitConfig(max_iters=args.max_iters, rel_tol=args.rel_tol)
    pipeline = _pipeline_for(args.method, config)
    report = evaluation.audit(pipeline, table)
    print(report.render_text())
    return EXIT_OK if report.all_applicable_pass else EXIT_CHECK_FAILED


def cmd_compare(args) -> int:
    table = _load_inputs(args.data, args.schema)
    config = FitConfig(max_iters=args.max_iters, rel_tol=args.rel_tol)
    tokens = [t.strip() for t in args.methods.split(",") if t.strip()]
    if not tokens:
        raise RankingError("no methods given")
    reference = None
    results = []
    for token in tokens:
        if token == REFERENCE_TOKEN:
            reference = baselines.elmap_reference_scores()
            continue
        pipeline = _pipeline_for(token, config)
        results.append(pipeline.run(table))
    if not results:
        raise RankingError("need at least one computable method")
    comparison = baselines.compare(results, reference=reference)
    if args.format == "csv":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(comparison.table_csv())
        corr_path = args.out + ".correlations.csv"
        with open(corr_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(comparison.correlations_csv())
        print(f"compare: wrote {args.out} and {corr_path}")
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(comparison.to_dict(), fh, indent=2)
            fh.write("\n")
        print(f"compare: wrote {args.out}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    import os

    curve = load_curve(args.curve)
    if curve.transform is None:
        raise TransformMismatch("curve file has no transform")
    names = curve.transform.indicator_names
    table = load_table(args.data, {name: "positive" for name in names})
    z = apply_transform(table.values, curve.transform)

    os.makedirs(args.out, exist_ok=True)
    if not os.access(args.out, os.W_OK):
        raise LoadError(f"output directory {args.out} is not writable")

    written = []
    for j, name in enumerate(names):
        counts, edges = np.histogram(z[:, j], bins=20, range=(0.0, 1.0))
        path = os.path.join(args.out, f"hist_{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["bin_left", "bin_right", "count"])
            for k in range(20):
                writer.writerow(
                    [repr(float(edges[k])), repr(float(edges[k + 1])),
                     int(counts[k])]
                )
        written.append(path)

    ts = np.linspace(0.0, 1.0, 201)
    curve_pts = evaluate(curve, ts)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            path = os.path.join(args.out, f"pair_{names[a]}_{names[b]}.csv")
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["series", "id", "x", "y"])
                for item, row in zip(table.item_ids, z):
                    writer.writerow(
                        [
                            "data",
                            item,
                            repr(float(row[a])),
                            repr(float(row[b])),
                        ]
                    )
                for pt in curve_pts:
                    writer.writerow(
                        ["curve", "", repr(float(pt[a])), repr(float(pt[b]))]
                    )
            written.append(path)
    print(f"plotdata: wrote {len(written)} files to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpcurve",
        description=(
            "Rank items on several indicators with a fitted ranking "
            "principal curve, compare against classical baselines, and "
            "audit objectivity criteria."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, schema_required=True):
        p.add_argument("--data", required=True, help="input CSV (id,<indicators...>)")
        if schema_required:
            p.add_argument(
                "--schema", required=True,
                help="JSON indicator->orientation map",
            )
        p.add_argument("--max-iters", type=int, default=200)
        p.add_argument("--rel-tol", type=float, default=1e-8)

    p_fit = sub.add_parser("fit", help="fit the ranking curve")
    add_common(p_fit)
    p_fit.add_argument("--out", required=True, help="output JSON path")
    p_fit.set_defaults(func=cmd_fit)

    p_rank = sub.add_parser("rank", help="score a table with a fitted curve")
    p_rank.add_argument("--data", required=True)
    p_rank.add_argument("--schema", help="optional orientation map")
    p_rank.add_argument("--curve", required=True, help="fit output JSON")
    p_rank.add_argument("--out", required=True)
    p_rank.add_argument("--format", choices=("csv", "json"), default="csv")
    p_rank.set_defaults(func=cmd_rank)

    p_check = sub.add_parser("check", help="run the objectivity audit")
    add_common(p_check)
    p_check.add_argument(
        "--method", required=True, choices=PIPELINE_TOKENS
    )
    p_check.set_defaults(func=cmd_check)

    p_cmp = sub.add_parser("compare", help="rank with several methods")
    add_common(p_cmp)
    p_cmp.add_argument(
        "--methods",
        required=True,
        help=(
            "comma-separated method tokens: "
            + ", ".join(PIPELINE_TOKENS + (REFERENCE_TOKEN,))
        ),
    )
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--format", choices=("csv", "json"), default="json")
    p_cmp.set_defaults(func=cmd_compare)

    p_plot = sub.add_parser(
        "plotdata", help="write histogram and scatter/curve panel CSVs"
    )
    p_plot.add_argument("--data", required=True)
    p_plot.add_argument("--curve", required=True)
    p_plot.add_argument("--out", required=True, help="output directory")
    p_plot.set_defaults(func=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TooFewItems, DegenerateParameterSpread, DegenerateCurve) as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT_FAILURE
    except (LoadError, TransformMismatch, PipelineFailure, RankingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(f"malformed JSON input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: ``compgap {validate,run,stats,plot,weights}``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .assessment import level1_scores, responses_to_acd3
from .errors import CompgapError, ComputationError, ParseError
from .formatting import ROUNDING_MODES, fmt_p
from .hcv import absolute_weights
from .io import (
    acd_problems,
    bundled,
    csv_text,
    job_file_problems,
    load_acd,
    load_job,
    load_responses,
    load_tree,
    tree_file_problems,
)
from .pipeline import (
    STATS_HEADER,
    PipelineConfig,
    plot_points_from_result_json,
    ranking_csv,
    run_pipeline,
    statistics_table,
    stats_rows,
    write_outputs,
)
from .plot import PlotPoint, render_qs_svg
from .ranking import POLICIES

EXIT_OK, EXIT_INVALID, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3


def _print_table(header, rows, out=None):
    out = out or sys.stdout
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    print("  ".join(str(h).ljust(w) for h, w in zip(header, widths)).rstrip(), file=out)
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)


def _config(args) -> PipelineConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", location=f"{args.config}:{exc.lineno}") from None
        if not isinstance(data, dict):
            raise ParseError("config file must hold a JSON object", location=args.config)
    return PipelineConfig.from_mapping(
        data,
        alpha=getattr(args, "alpha", None),
        policy=getattr(args, "policy", None),
        display_decimals=getattr(args, "decimals", None),
        rounding=getattr(args, "rounding", None),
    )


def _load_scores(args, tree, config):
    if getattr(args, "responses", None):
        return responses_to_acd3(load_responses(args.responses), tree, config.type_weights())
    return load_acd(args.acd, tree)


def _report(exc: CompgapError) -> int:
    where = f" [{exc.stage}]" if getattr(exc, "stage", None) else ""
    print(f"error{where}: {exc.describe()}", file=sys.stderr)
    return EXIT_COMPUTE if isinstance(exc, ComputationError) else EXIT_INVALID


# -- subcommands ---------------------------------------------------------------

def cmd_validate(args) -> int:
    diagnostics: list[CompgapError] = []
    tree_path = args.tree or bundled("pis_tree.json")
    tree, problems = tree_file_problems(tree_path)
    diagnostics += problems
    acd = profile = config = None
    if tree is not None:
        if args.responses:
            try:
                config = _config(args)
                acd = responses_to_acd3(load_responses(args.responses), tree, config.type_weights())
            except CompgapError as exc:
                diagnostics.append(exc)
        else:
            acd, problems = acd_problems(args.acd, tree)
            diagnostics += problems
        profile, problems = job_file_problems(args.job, tree)
        diagnostics += problems
    if not diagnostics:
        try:
            config = config or _config(args)
            run_pipeline(tree, acd, profile, config)
        except CompgapError as exc:
            diagnostics.append(exc)
    for d in diagnostics:
        stage = f" [{d.stage}]" if getattr(d, "stage", None) else ""
        print(f"{d.rule}{stage}: {d.location + ': ' if d.location else ''}{d}")
    if diagnostics:
        return EXIT_INVALID
    print(f"OK: {tree.shape()} tree, {len(acd.candidates)} candidates, profile valid")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    tree = load_tree(args.tree)
    acd = _load_scores(args, tree, config)
    profile = load_job(args.job, tree)
    result = run_pipeline(tree, acd, profile, config)
    if args.out:
        write_outputs(result, args.out)
    if args.stdout:
        sys.stdout.write(ranking_csv(result))
        return EXIT_OK
    a = result.anova
    if a is not None:
        print("ANOVA (randomized complete block design)")
        _print_table(
            ("factor", "df", "F", "p", "partial eta^2"),
            [
                [r.name, r.df, "undefined" if r.f is None else f"{r.f:.3f}",
                 "undefined" if r.p is None else fmt_p(r.p),
                 "" if r.partial_eta_squared is None else f"{r.partial_eta_squared:.3f}"]
                for r in (a.treatments, a.blocks)
            ],
        )
        print()
    print("Ranking and clustering")
    rows = list(csv.reader(ranking_csv(result).splitlines()))
    _print_table(rows[0], rows[1:])
    print()
    print(f"Recommendation ({config.policy}): " + " | ".join(
        ", ".join(r.candidate for r in group) for group in result.recommendation
    ))
    if result.eligibility.excluded:
        print("Excluded: " + "; ".join(
            f"{e.candidate} ({e.rule.competence} {e.score:.2f} < {e.rule.min_score:g})"
            for e in result.eligibility.excluded
        ))
    if args.out:
        print(f"Wrote results to {args.out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    tree = load_tree(args.tree)
    config = _config(args)
    acd = _load_scores(args, tree, config)
    w3 = config.rollup_weights_for(tree, 2)
    w2 = config.rollup_weights_for(tree, 1)
    scores = level1_scores(acd, tree, w3, w2)
    stats = statistics_table(scores.level1, scores.total)
    mode = args.rounding or config.stats_rounding
    rows = list(stats_rows(stats, tree, config.display_decimals, mode))
    if args.csv:
        sys.stdout.write(csv_text(STATS_HEADER, rows))
    else:
        _print_table(STATS_HEADER, rows)
    return EXIT_OK


def cmd_plot(args) -> int:
    src = Path(args.input)
    text = src.read_text(encoding="utf-8")
    if src.suffix.lower() == ".json":
        points = plot_points_from_result_json(json.loads(text))
    else:
        clusters = {}
        if args.ranking:
            for rec in csv.DictReader(Path(args.ranking).read_text(encoding="utf-8").splitlines()):
                clusters[rec["candidate"]] = int(rec["cluster"])
        try:
            points = [
                PlotPoint(rec["candidate"], float(rec["SOQ"]), float(rec["SUQ"]),
                          int(rec.get("cluster") or clusters.get(rec["candidate"], 1)))
                for rec in csv.DictReader(text.splitlines())
            ]
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad QS points file: {exc}", location=str(src)) from None
    svg = render_qs_svg(points, title=args.title)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8", newline="")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_weights(args) -> int:
    tree = load_tree(args.tree)
    profile = load_job(args.job, tree)
    scheme = absolute_weights(profile.allocation)
    sys.stdout.write(csv_text(("id", "weight"), ([k, f"{w:.12g}"] for k, w in scheme.weights.items())))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compgap", description="Competence gap analysis and candidate ranking.")
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p, job=True):
        p.add_argument("--tree", help="competence tree JSON (default: bundled 3/12/48 PIS tree)")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--acd", help="level-3 ACD CSV (competence rows, candidate columns)")
        src.add_argument("--responses", help="long-form raw statement responses CSV")
        if job:
            p.add_argument("--job", required=True, help="job profile JSON")

    def tuning(p):
        p.add_argument("--config", help="JSON file with pipeline settings")
        p.add_argument("--alpha", type=float, help="Scott-Knott significance level (default 0.05)")
        p.add_argument("--policy", choices=POLICIES, help="recommendation order (default most_qualified)")
        p.add_argument("--decimals", type=int, help="display decimals (default 2)")
        p.add_argument("--rounding", choices=sorted(ROUNDING_MODES), help="tie rule for displayed values")

    p = sub.add_parser("validate", help="check input files and report every violation")
    inputs(p)
    tuning(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run the full pipeline and write the output directory")
    inputs(p)
    tuning(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--stdout", action="store_true", help="print ranking.csv to stdout")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("stats", help="descriptive statistics of level-1 and total scores")
    inputs(p, job=False)
    p.add_argument("--config", help="JSON file with pipeline settings")
    p.add_argument("--decimals", type=int, help="display decimals (default 2)")
    p.add_argument("--rounding", choices=sorted(ROUNDING_MODES), help="tie rule (default half_even)")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of an aligned table")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot", help="render the Qualification Space as SVG")
    p.add_argument("--input", required=True, help="result.json or qs_points.csv")
    p.add_argument("--ranking", help="ranking.csv supplying cluster indices for a CSV input")
    p.add_argument("--out", help="SVG path (default stdout)")
    p.add_argument("--title", default="Qualification Space")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("weights", help="print the absolute level-2 weights derived from a job profile")
    p.add_argument("--tree", help="competence tree JSON (default: bundled PIS tree)")
    p.add_argument("--job", required=True, help="job profile JSON")
    p.set_defaults(func=cmd_weights)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run" and not (args.out or args.stdout):
        print("error: run needs --out DIR and/or --stdout", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except CompgapError as exc:
        return _report(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

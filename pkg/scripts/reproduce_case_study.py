"""Run the bundled eleven-candidate case study end to end and summarize it.

    python3 scripts/reproduce_case_study.py [--out DIR]
"""

from __future__ import annotations

import argparse

from compgap.formatting import fmt, fmt_p
from compgap.io import bundled, load_acd, load_job, load_tree
from compgap.pipeline import PipelineConfig, run_pipeline, write_outputs
from compgap.ranking import effect_size_label


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="also write the full output directory here")
    parser.add_argument("--alpha", type=float, default=0.05)
    args = parser.parse_args()

    tree = load_tree()
    acd3 = load_acd(bundled("case_study_acd3.csv"), tree)
    profile = load_job(bundled("case_study_job.json"), tree)
    result = run_pipeline(tree, acd3, profile, PipelineConfig(alpha=args.alpha))

    print(f"tree {tree.shape()}, {len(acd3.candidates)} candidates, job {profile.job_id}")
    print("\nlevel-1 scores (Total, C1, C2, C3)")
    for cand in result.acd1.candidates:
        cells = [result.total[cand], *result.acd1.row(cand)]
        print(f"  {cand:<7}" + "".join(f"{fmt(v, 2, 'half_even'):>7}" for v in cells))

    print("\nabsolute level-2 weights")
    print("  " + "  ".join(f"{k}={w:.4f}" for k, w in result.weights.weights.items()))

    a = result.anova
    print("\nRCBD ANOVA")
    for row in (a.treatments, a.blocks):
        print(f"  {row.name:<11} df={row.df:<3} F={row.f:8.3f}  p={fmt_p(row.p):<7}"
              f" partial eta^2={row.partial_eta_squared:.3f} ({effect_size_label(row.partial_eta_squared)})")
    print(f"  error       df={a.error.df:<3} s2={a.s2:.6g}")

    print("\nScott-Knott splits")
    for t in result.partition.tests:
        verdict = "split" if t.significant else "keep"
        print(f"  n={len(t.members):<2} lambda={t.lam:9.3f} nu={t.nu:<2} chi2={t.critical:7.3f} -> {verdict}")

    print("\nranking")
    for r in result.ranking:
        print(f"  {r.rank:>2}  {r.candidate:<7} MSG {fmt(r.msg):>6}  [{fmt(r.lower):>6}, {fmt(r.upper):>6}]"
              f"  cluster {r.cluster}  {r.qualification}")

    if args.out:
        write_outputs(result, args.out)
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()

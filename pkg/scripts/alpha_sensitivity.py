"""How the Scott-Knott partition of the case study changes with alpha.

Also checks how stable the ranking is when one candidate at a time is
removed (leave-one-out): clusters among the remaining candidates should
mostly survive.

    python3 scripts/alpha_sensitivity.py
"""

from __future__ import annotations

from compgap.io import bundled, load_acd, load_job, load_tree
from compgap.pipeline import PipelineConfig, run_pipeline

ALPHAS = (0.2, 0.1, 0.05, 0.01, 0.001, 1e-4, 1e-6)


def partition_text(result) -> str:
    return " | ".join(",".join(c.removeprefix("Cnd ") for c in cl.members) for cl in result.partition.clusters)


def main() -> None:
    tree = load_tree()
    acd3 = load_acd(bundled("case_study_acd3.csv"), tree)
    profile = load_job(bundled("case_study_job.json"), tree)

    print("alpha     clusters  partition (best first)")
    for alpha in ALPHAS:
        r = run_pipeline(tree, acd3, profile, PipelineConfig(alpha=alpha))
        print(f"{alpha:<9g} {len(r.partition.clusters):>8}  {partition_text(r)}")

    base = run_pipeline(tree, acd3, profile)
    base_cluster = {r.candidate: r.cluster for r in base.ranking}
    print("\nleave-one-out at alpha=0.05")
    for dropped in acd3.candidates:
        keep = [c for c in acd3.candidates if c != dropped]
        r = run_pipeline(tree, acd3.select(keep), profile)
        # a pair is consistent if both runs agree on whether the two share a cluster
        now = {x.candidate: x.cluster for x in r.ranking}
        pairs = [(a, b) for i, a in enumerate(keep) for b in keep[i + 1:]]
        agree = sum((now[a] == now[b]) == (base_cluster[a] == base_cluster[b]) for a, b in pairs)
        print(f"  without {dropped:<7} clusters={len(r.partition.clusters)}  "
              f"pair agreement {agree}/{len(pairs)}  {partition_text(r)}")


if __name__ == "__main__":
    main()

import json
import random

import numpy as np
import pytest

from compgap.competence import build_job_profile
from compgap.errors import EmptyInput, InvalidAlpha, OutOfRange
from compgap.matrices import AcdMatrix
from compgap.pipeline import OUTPUT_FILES, PipelineConfig, render_outputs, run_pipeline, write_outputs


def test_result_shapes(result, acd3):
    assert result.acd3 is acd3
    assert result.acd2.shape == (11, 12) and result.acd1.shape == (11, 3)
    assert result.gaps.shape == (11, 12)
    assert set(result.stats) == {"Total", "C1", "C2", "C3"}
    assert len(result.points) == len(result.ranking) == 11


def test_eligibility_narrows_every_matrix(tree, acd3, profile):
    p = build_job_profile(tree, profile.rcd3, profile.hcv1, profile.hcv2,
                          eligibility=[{"competence": "C1.3.1", "min_score": 2}])
    r = run_pipeline(tree, acd3, p)
    assert "Cnd 6" not in r.candidates
    for m in (r.acd2, r.acd1, r.weighted_acd, r.gaps):
        assert m.candidates == r.candidates
    assert r.acd3.candidates == acd3.candidates
    assert [e.candidate for e in r.eligibility.excluded] == ["Cnd 6"]


def test_everyone_excluded(tree, acd3, profile):
    p = build_job_profile(tree, profile.rcd3, profile.hcv1, profile.hcv2,
                          eligibility=[{"competence": "C1", "min_score": 5}])
    with pytest.raises(EmptyInput) as info:
        run_pipeline(tree, acd3, p)
    assert info.value.stage == "eligibility"


def test_permutation_invariance(tree, acd3, profile, result):
    order = list(range(len(acd3.candidates)))
    random.Random(7).shuffle(order)
    shuffled = AcdMatrix([acd3.candidates[i] for i in order], acd3.competences, acd3.values[order], level=3)
    r = run_pipeline(tree, shuffled, profile)
    msg = {p.candidate: p.msg for p in result.points}
    assert {p.candidate: p.msg for p in r.points} == msg
    assert [c.members for c in r.partition.clusters] == [c.members for c in result.partition.clusters]
    assert [(x.rank, x.candidate) for x in r.ranking] == [(x.rank, x.candidate) for x in result.ranking]


def test_perfect_fit(tree, profile):
    rcd = np.array([[float(profile.rcd3[leaf]) for leaf in tree.leaves]] * 4)
    acd = AcdMatrix(("A", "B", "C", "D"), tree.leaves, rcd, level=3)
    r = run_pipeline(tree, acd, profile)
    assert np.all(r.gaps.values == 0)
    assert len(r.partition.clusters) == 1
    assert all(x.msg == 0 for x in r.ranking)
    assert r.anova.degenerate and r.anova.treatments.f is None
    files = render_outputs(r)
    assert "undefined" not in files["anova.csv"]


def test_single_candidate(tree, acd3, profile):
    r = run_pipeline(tree, acd3.select(["Cnd 4"]), profile)
    assert r.anova is None
    assert r.ranking[0].rank == 1 and r.ranking[0].cluster == 1
    assert r.stats["Total"].sd is None


def test_config_validation():
    with pytest.raises(InvalidAlpha):
        PipelineConfig(alpha=1.0)
    with pytest.raises(OutOfRange):
        PipelineConfig(policy="cheapest")
    with pytest.raises(OutOfRange):
        PipelineConfig.from_mapping({"colour": "red"})
    assert PipelineConfig.from_mapping({"alpha": 0.1}, alpha=None).alpha == 0.1
    assert PipelineConfig.from_mapping({"alpha": 0.1}, alpha=0.01).alpha == 0.01


def test_configured_rollup_weights(tree, acd3, profile):
    cfg = PipelineConfig(rollup_weights={"C1.1": {"C1.1.1": 1.0, "C1.1.2": 0, "C1.1.3": 0, "C1.1.4": 0}})
    r = run_pipeline(tree, acd3, profile, cfg)
    assert r.acd2.value("Cnd 1", "C1.1") == acd3.value("Cnd 1", "C1.1.1")


def test_export_gap_kind(tree, acd3, profile, result):
    r = run_pipeline(tree, acd3, profile, PipelineConfig(gap_kind="AG"))
    assert r.export_gaps.kind == "AG"
    assert np.allclose(r.export_gaps.values, np.abs(result.gaps.values))
    assert [c.members for c in r.partition.clusters] == [c.members for c in result.partition.clusters]


def test_output_directory(result, tmp_path):
    out = write_outputs(result, tmp_path / "run")
    assert sorted(p.name for p in out.iterdir()) == sorted(OUTPUT_FILES)
    data = json.loads((out / "result.json").read_text())
    assert data["tree_shape"] == "3/12/48"
    assert data["acd_level2"]["Cnd 1"]["C1.1"] == 3.75
    # overwriting a previous run is allowed
    write_outputs(result, out)


def test_refuses_foreign_directory(result, tmp_path):
    (tmp_path / "notes.txt").write_text("keep me")
    with pytest.raises(FileExistsError):
        write_outputs(result, tmp_path)
    assert (tmp_path / "notes.txt").read_text() == "keep me"


def test_failed_render_leaves_nothing(result, tmp_path, monkeypatch):
    import compgap.pipeline as pipeline

    def boom(_):
        raise RuntimeError("render failed")

    monkeypatch.setattr(pipeline, "render_qs_svg", boom)
    with pytest.raises(RuntimeError):
        write_outputs(result, tmp_path / "out")
    assert list(tmp_path.iterdir()) == []

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compgap.competence import (
    IMPORTANCE_SCALE,
    CompetenceNode,
    build_job_profile,
    build_tree,
    importance_to_score,
    tree_problems,
    tree_query,
)
from compgap.errors import (
    AllocationSumMismatch,
    DepthViolation,
    DuplicateId,
    IncompleteRcd,
    MissingParent,
    OrphanInternal,
    ScoreOutOfRange,
    UnknownId,
    UnknownTerm,
)
from compgap.hcv import HcvAllocation

from conftest import CASE_HCV1, CASE_HCV2


def chain():
    return [CompetenceNode("C1", "a"), CompetenceNode("C1.1", "b", "C1"), CompetenceNode("C1.1.1", "c", "C1.1")]


def test_canonical_tree_shape(tree):
    assert tree.shape() == "3/12/48"
    assert tree.roots == ("C1", "C2", "C3")
    assert len(tree.level_ids(2)) == 12
    assert len(tree.leaves) == 48


def test_minimal_chain_is_a_tree():
    t = build_tree(chain())
    assert t.leaves == ("C1.1.1",)
    assert t.shape() == "1/1/1"


def test_missing_parent():
    nodes = chain() + [CompetenceNode("C1.1.2", "x", "C9")]
    with pytest.raises(MissingParent):
        build_tree(nodes)


def test_duplicate_id():
    with pytest.raises(DuplicateId):
        build_tree(chain() + [CompetenceNode("C1.1.1", "dup", "C1.1")])


def test_depth_violation_for_shallow_leaf():
    nodes = chain() + [CompetenceNode("C1.2", "leafless", "C1")]
    problems = tree_problems(nodes)
    assert any(isinstance(p, (DepthViolation, OrphanInternal)) for p in problems)
    with pytest.raises((DepthViolation, OrphanInternal)):
        build_tree(nodes)


def test_orphan_root_without_children():
    problems = tree_problems(chain() + [CompetenceNode("C2", "alone")])
    assert any(isinstance(p, (OrphanInternal, DepthViolation)) for p in problems)


def test_query_level_one(tree):
    view = tree_query(tree, "C1")
    assert view.children == ("C1.1", "C1.2", "C1.3", "C1.4")
    assert len(view.leaves) == 16
    assert view.level == 1 and view.parent is None


def test_query_leaf(tree):
    view = tree_query(tree, "C3.4.4")
    assert view.children == ()
    assert view.parent == "C3.4"
    assert view.is_leaf


def test_query_unknown(tree):
    with pytest.raises(UnknownId):
        tree_query(tree, "C7")


def test_children_in_id_order_not_lexical():
    nodes = [CompetenceNode("C1", "r")]
    for j in (10, 2, 1):
        nodes.append(CompetenceNode(f"C1.{j}", "m", "C1"))
        nodes.append(CompetenceNode(f"C1.{j}.1", "l", f"C1.{j}"))
    t = build_tree(nodes)
    assert t.children("C1") == ("C1.1", "C1.2", "C1.10")


def test_ancestor_chain_length(tree):
    for leaf in tree.leaves:
        parent = tree.node(leaf).parent
        grand = tree.node(parent).parent
        assert grand in tree.roots and tree.node(grand).parent is None


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_build_tree_order_insensitive(tree, rnd):
    nodes = list(tree.nodes.values())
    rnd.shuffle(nodes)
    shuffled = build_tree(nodes)
    assert shuffled == tree
    for cid in ("C1", "C2.3", "C3.4.4"):
        assert shuffled.query(cid) == tree.query(cid)


@pytest.mark.parametrize(
    "term, score",
    [("Very Important", 5), ("Important", 4), ("Moderately Important", 3),
     ("Of Little Importance", 2), ("Unimportant", 1), ("  very   IMPORTANT ", 5)],
)
def test_importance_terms(term, score):
    assert importance_to_score(term) == score


def test_unknown_term():
    with pytest.raises(UnknownTerm):
        importance_to_score("Critical")


def test_importance_inverse_is_identity():
    inverse = {v: k for k, v in IMPORTANCE_SCALE.items()}
    assert sorted(inverse) == [1, 2, 3, 4, 5]
    for score, term in inverse.items():
        assert importance_to_score(term) == score


# -- job profiles --------------------------------------------------------------

def _rcd(tree, value=3):
    return {leaf: value for leaf in tree.leaves}


def test_case_study_profile(tree, profile):
    assert dict(profile.hcv1) == CASE_HCV1
    assert profile.hcv2 == CASE_HCV2
    assert profile.f == 100
    assert set(profile.rcd3) == set(tree.leaves)


def test_profile_with_sixty_twenty_twenty(tree):
    p = build_job_profile(tree, _rcd(tree), {"C1": 60, "C2": 20, "C3": 20}, CASE_HCV2)
    assert p.allocation.level1["C1"] == 60


def test_allocation_sum_mismatch_level2(tree):
    hcv2 = dict(CASE_HCV2, **{"C1.1": 60, "C1.2": 10, "C1.3": 30, "C1.4": 20})
    with pytest.raises(AllocationSumMismatch):
        build_job_profile(tree, _rcd(tree), CASE_HCV1, hcv2)


def test_allocation_sum_mismatch_level1(tree):
    with pytest.raises(AllocationSumMismatch):
        build_job_profile(tree, _rcd(tree), {"C1": 50, "C2": 35, "C3": 25}, CASE_HCV2)


def test_fractional_allocation_within_tolerance(tree):
    hcv1 = {"C1": 100 / 3, "C2": 100 / 3, "C3": 100 / 3}
    assert build_job_profile(tree, _rcd(tree), hcv1, CASE_HCV2).allocation.level1["C1"] == pytest.approx(100 / 3)
    with pytest.raises(AllocationSumMismatch):
        build_job_profile(tree, _rcd(tree), {"C1": 33.3, "C2": 33.3, "C3": 33.3}, CASE_HCV2)


def test_incomplete_rcd(tree):
    rcd = _rcd(tree)
    del rcd["C3.4.4"]
    with pytest.raises(IncompleteRcd):
        build_job_profile(tree, rcd, CASE_HCV1, CASE_HCV2)


def test_rcd_out_of_range(tree):
    with pytest.raises(ScoreOutOfRange):
        build_job_profile(tree, _rcd(tree, 6), CASE_HCV1, CASE_HCV2)


def test_rcd_terms_are_converted(tree):
    rcd = _rcd(tree, "Important")
    rcd["C1.1.1"] = "Very Important"
    p = build_job_profile(tree, rcd, CASE_HCV1, CASE_HCV2)
    assert p.rcd3["C1.1.1"] == 5 and p.rcd3["C1.1.2"] == 4


def test_profile_is_immutable(profile):
    with pytest.raises(Exception):
        profile.job_id = "other"


def test_uniform_allocation_valid(tree):
    alloc = HcvAllocation.uniform(tree)
    assert sum(alloc.level1.values()) == pytest.approx(100)


def test_tree_records_round_trip(tree, tmp_path):
    path = tmp_path / "tree.json"
    path.write_text(json.dumps(tree.to_records()))
    from compgap.io import load_tree

    assert load_tree(path) == tree
    records = tree.to_records()
    random.Random(0).shuffle(records)
    path.write_text(json.dumps(records))
    assert load_tree(path) == tree

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compgap.errors import (
    AllocationSumMismatch,
    DivisionByZeroWeight,
    LevelMismatch,
    WeightCoverageGap,
    WeightSumViolation,
)
from compgap.hcv import HcvAllocation, WeightScheme, absolute_weights, apply_weights, relative_importance
from compgap.matrices import AcdMatrix

from conftest import CASE_HCV1, CASE_HCV2

# printed "Req" entries at level 2 (unweighted and weighted)
REQ_L2 = {"C1.1": 3.75, "C1.2": 3.50, "C1.3": 3.75, "C1.4": 3.50, "C2.1": 3.50, "C2.2": 3.75,
          "C2.3": 4.00, "C2.4": 3.50, "C3.1": 3.50, "C3.2": 3.50, "C3.3": 3.75, "C3.4": 3.50}
REQ_WEIGHTED = {"C1.1": 0.45, "C1.2": 0.42, "C1.3": 0.30, "C1.4": 0.28, "C2.1": 0.37, "C2.2": 0.26,
                "C2.3": 0.28, "C2.4": 0.37, "C3.1": 0.26, "C3.2": 0.26, "C3.3": 0.19, "C3.4": 0.18}


def uniform_level2(tree):
    return {c: 25 for c in tree.level_ids(2)}


def test_case_study_weights(tree):
    w = absolute_weights(HcvAllocation.from_flat(tree, CASE_HCV1, CASE_HCV2))
    assert w["C1.1"] == pytest.approx(0.12, abs=1e-15)
    assert w["C1.3"] == pytest.approx(0.08, abs=1e-15)
    assert math.fsum(w.weights.values()) == pytest.approx(1.0, abs=1e-12)


def test_weights_agree_with_printed_ratios(tree):
    # printed weighted Req / printed Req recovers each weight up to the 2-decimal rounding
    w = absolute_weights(HcvAllocation.from_flat(tree, CASE_HCV1, CASE_HCV2))
    for cid, req in REQ_L2.items():
        half_step = 0.005 / req
        assert abs(REQ_WEIGHTED[cid] / req - w[cid]) <= half_step + 1e-12, cid
    assert REQ_WEIGHTED["C1.1"] / REQ_L2["C1.1"] == pytest.approx(0.12)


def test_uniform_allocation(tree):
    w = absolute_weights(HcvAllocation.uniform(tree))
    assert all(v == pytest.approx(1 / 12, abs=1e-15) for v in w.weights.values())


def test_sixty_twenty_twenty(tree):
    w = absolute_weights(HcvAllocation.from_flat(tree, {"C1": 60, "C2": 20, "C3": 20}, uniform_level2(tree)))
    for cid, v in w.weights.items():
        assert v == pytest.approx(0.15 if cid.startswith("C1.") else 0.05, abs=1e-15)


def test_allocation_rejects_bad_sums(tree):
    with pytest.raises(AllocationSumMismatch):
        HcvAllocation.from_flat(tree, {"C1": 60, "C2": 20, "C3": 30}, uniform_level2(tree))


def test_allocation_needs_every_level2_id(tree):
    hcv2 = uniform_level2(tree)
    del hcv2["C2.4"]
    with pytest.raises(WeightCoverageGap):
        HcvAllocation.from_flat(tree, CASE_HCV1, hcv2)


def test_weight_scheme_sum_checked():
    with pytest.raises(WeightSumViolation):
        WeightScheme({"a": 0.5, "b": 0.4})


def test_apply_weights_examples(tree):
    w = absolute_weights(HcvAllocation.from_flat(tree, CASE_HCV1, CASE_HCV2))
    m = AcdMatrix(("Cnd 1", "Req"), tree.level_ids(2),
                  np.array([[3.75] * 12, [REQ_L2[c] for c in tree.level_ids(2)]]), level=2)
    out = apply_weights(m, w)
    assert out.value("Cnd 1", "C1.1") == pytest.approx(0.45, abs=1e-12)
    assert w["C2.2"] == pytest.approx(0.07, abs=1e-15)
    assert out.value("Req", "C2.2") == pytest.approx(0.2625, abs=1e-12)


def test_apply_uniform_divides_by_twelve(tree, acd3):
    from compgap.assessment import rollup

    acd2 = rollup(acd3, None, tree)
    out = apply_weights(acd2, absolute_weights(HcvAllocation.uniform(tree)))
    assert np.allclose(out.values, acd2.values / 12, rtol=1e-14, atol=0)


def test_apply_weights_coverage(tree, acd3):
    from compgap.assessment import rollup

    with pytest.raises(WeightCoverageGap):
        apply_weights(rollup(acd3, None, tree), WeightScheme({"C1.1": 1.0}))


def test_relative_importance(tree):
    alloc = HcvAllocation.from_flat(tree, {"C1": 60, "C2": 20, "C3": 20}, uniform_level2(tree))
    assert relative_importance(alloc, "C1", "C2") == 3.0
    assert relative_importance(alloc, "C2", "C3") == 1.0
    assert relative_importance(alloc, "C1.1", "C1.2") == 1.0


def test_relative_importance_zero_and_mismatch(tree):
    hcv2 = dict(CASE_HCV2, **{"C1.1": 50, "C1.2": 30, "C1.3": 20, "C1.4": 0})
    alloc = HcvAllocation.from_flat(tree, CASE_HCV1, hcv2)
    with pytest.raises(DivisionByZeroWeight):
        relative_importance(alloc, "C1.1", "C1.4")
    with pytest.raises(LevelMismatch):
        relative_importance(alloc, "C1", "C1.1")
    with pytest.raises(LevelMismatch):
        relative_importance(alloc, "C1.1", "C2.1")
    assert relative_importance(absolute_weights(alloc), "C1.1", "C1.2") == pytest.approx(50 / 30)


def allocations(draw_amounts):
    return st.lists(draw_amounts, min_size=3, max_size=3)


def _normalized(raw, f):
    total = sum(raw)
    return [f * r / total for r in raw]


group = st.lists(st.integers(min_value=0, max_value=50), min_size=4, max_size=4).filter(lambda xs: sum(xs) > 0)


@st.composite
def hcv_inputs(draw):
    f = draw(st.sampled_from([1, 10, 100, 1000, 7.5]))
    lvl1 = draw(st.lists(st.integers(0, 50), min_size=3, max_size=3).filter(lambda xs: sum(xs) > 0))
    lvl2 = [draw(group) for _ in range(3)]
    return f, lvl1, lvl2


def _alloc(tree, f, lvl1, lvl2):
    hcv1 = dict(zip(tree.roots, _normalized(lvl1, f)))
    hcv2 = {}
    for root, raw in zip(tree.roots, lvl2):
        hcv2.update(zip(tree.children(root), _normalized(raw, f)))
    return HcvAllocation.from_flat(tree, hcv1, hcv2, f)


@settings(max_examples=200, deadline=None)
@given(hcv_inputs())
def test_weights_sum_to_one(tree, inputs):
    w = absolute_weights(_alloc(tree, *inputs))
    assert abs(math.fsum(w.weights.values()) - 1.0) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(hcv_inputs(), st.sampled_from([0.5, 3, 100, 12.25]))
def test_weights_homogeneous_in_f(tree, inputs, scale):
    f, lvl1, lvl2 = inputs
    a = absolute_weights(_alloc(tree, f, lvl1, lvl2))
    b = absolute_weights(_alloc(tree, f * scale, lvl1, lvl2))
    for cid in a:
        assert a[cid] == pytest.approx(b[cid], rel=1e-12, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.integers(1, 10))
def test_weight_monotone_in_own_amount(tree, j, delta):
    base = [40, 30, 20, 10]
    moved = list(base)
    donor = (j + 1) % 4
    delta = min(delta, moved[donor])
    moved[j] += delta
    moved[donor] -= delta
    a = absolute_weights(_alloc(tree, 100, [40, 35, 25], [base, [25] * 4, [25] * 4]))
    b = absolute_weights(_alloc(tree, 100, [40, 35, 25], [moved, [25] * 4, [25] * 4]))
    kids = tree.children("C1")
    if delta:
        assert b[kids[j]] > a[kids[j]]
        assert b[kids[donor]] < a[kids[donor]]
    for other in tree.level_ids(2):
        if other not in (kids[j], kids[donor]):
            assert b[other] == pytest.approx(a[other], abs=1e-15)

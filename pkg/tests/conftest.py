from __future__ import annotations

import pytest

from compgap.io import bundled, load_acd, load_job, load_tree
from compgap.pipeline import PipelineConfig, run_pipeline

TREE_PATH = bundled("pis_tree.json")
ACD_PATH = bundled("case_study_acd3.csv")
JOB_PATH = bundled("case_study_job.json")

CASE_HCV1 = {"C1": 40, "C2": 35, "C3": 25}
CASE_HCV2 = {
    "C1.1": 30, "C1.2": 30, "C1.3": 20, "C1.4": 20,
    "C2.1": 30, "C2.2": 20, "C2.3": 20, "C2.4": 30,
    "C3.1": 30, "C3.2": 30, "C3.3": 20, "C3.4": 20,
}


@pytest.fixture(scope="session")
def tree():
    return load_tree()


@pytest.fixture(scope="session")
def acd3(tree):
    return load_acd(ACD_PATH, tree)


@pytest.fixture(scope="session")
def profile(tree):
    return load_job(JOB_PATH, tree)


@pytest.fixture(scope="session")
def result(tree, acd3, profile):
    return run_pipeline(tree, acd3, profile, PipelineConfig())


@pytest.fixture
def fixture_paths():
    return {"tree": str(TREE_PATH), "acd": str(ACD_PATH), "job": str(JOB_PATH)}

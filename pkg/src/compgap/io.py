"""Reading the tree/ACD/job/response files and writing CSV tables."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Sequence
from importlib import resources
from pathlib import Path

import numpy as np

from .assessment import StatementResponse
from .competence import (
    CompetenceNode,
    CompetenceTree,
    JobProfile,
    build_job_profile,
    build_tree,
    job_problems,
    tree_problems,
)
from .errors import (
    CompgapError,
    DuplicateId,
    IncompleteMatrix,
    ParseError,
    ScoreOutOfRange,
    UnknownId,
)
from .matrices import SCORE_MAX, SCORE_MIN, AcdMatrix

ACD_FIRST_COLUMN = "competence"
RESPONSE_HEADER = ("assessee", "assessment_type", "assessor_role", "competence", "statement_id", "value", "weight")


def bundled(name: str) -> Path:
    """Path of a file shipped in ``compgap/data`` (canonical tree, case study)."""
    return Path(str(resources.files("compgap") / "data" / name))


def _read_text(path: str | Path) -> str:
    # OSError propagates: the CLI maps it to the I/O exit status
    return Path(path).read_text(encoding="utf-8")


def _load_json(path: str | Path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", location=f"{path}:{exc.lineno}") from None


# -- tree ------------------------------------------------------------------

def read_tree_nodes(path: str | Path) -> list[CompetenceNode]:
    data = _load_json(path)
    if not isinstance(data, list):
        raise ParseError("tree file must hold a JSON array of nodes", location=str(path))
    nodes = []
    for i, rec in enumerate(data):
        if not isinstance(rec, dict) or "id" not in rec:
            raise ParseError(f"node #{i} must be an object with an 'id'", location=f"{path}[{i}]")
        parent = rec.get("parent")
        nodes.append(CompetenceNode(str(rec["id"]), str(rec.get("name", "")), None if parent is None else str(parent)))
    return nodes


def tree_file_problems(path: str | Path) -> tuple[CompetenceTree | None, list[CompgapError]]:
    try:
        nodes = read_tree_nodes(path)
    except CompgapError as exc:
        return None, [exc]
    problems = tree_problems(nodes)
    return (None if problems else build_tree(nodes)), problems


def load_tree(path: str | Path | None = None) -> CompetenceTree:
    """Tree from ``path``; the bundled 3/12/48 PIS tree when ``path`` is None."""
    return build_tree(read_tree_nodes(path or bundled("pis_tree.json")))


# -- ACD matrix --------------------------------------------------------------

def read_acd_table(path: str | Path) -> tuple[list[str], list[tuple[int, str, list[str]]]]:
    """Header candidates and (line number, competence, cells) rows."""
    text = _read_text(path)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty ACD file", location=f"{path}:1")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != ACD_FIRST_COLUMN or len(header) < 2:
        raise ParseError(f"first header cell must be {ACD_FIRST_COLUMN!r} followed by candidate ids", location=f"{path}:1")
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(row)}", location=f"{path}:{lineno}")
        body.append((lineno, row[0].strip(), [c.strip() for c in row[1:]]))
    return header[1:], body


def acd_problems(
    path: str | Path, tree: CompetenceTree
) -> tuple[AcdMatrix | None, list[CompgapError]]:
    try:
        candidates, body = read_acd_table(path)
    except CompgapError as exc:
        return None, [exc]
    problems: list[CompgapError] = []
    dup = sorted({c for c in candidates if candidates.count(c) > 1})
    if dup:
        problems.append(DuplicateId(f"duplicate candidate column(s) {', '.join(dup)}", location=f"{path}:1"))
    leaves = set(tree.leaves)
    values: dict[str, list[float]] = {}
    for lineno, comp, cells in body:
        loc = f"{path}:{lineno}"
        if comp not in leaves:
            problems.append(UnknownId(f"{comp!r} is not a level-3 competence of the tree", location=loc))
            continue
        if comp in values:
            problems.append(DuplicateId(f"competence {comp} listed twice", location=loc))
            continue
        row = []
        for cand, cell in zip(candidates, cells):
            try:
                v = float(cell)
            except ValueError:
                problems.append(ParseError(f"non-numeric score {cell!r} for {cand}", location=loc))
                v = float("nan")
            else:
                if not SCORE_MIN <= v <= SCORE_MAX:
                    problems.append(ScoreOutOfRange(f"score {v:g} for {cand} outside [1, 5]", location=loc))
            row.append(v)
        values[comp] = row
    missing = [leaf for leaf in tree.leaves if leaf not in values]
    if missing:
        shown = ", ".join(missing[:5]) + (" ..." if len(missing) > 5 else "")
        problems.append(IncompleteMatrix(f"missing row(s) for {shown}", location=str(path)))
    if problems:
        return None, problems
    matrix = np.array([values[leaf] for leaf in tree.leaves]).T
    return AcdMatrix(candidates, tree.leaves, matrix, level=3), []


def load_acd(path: str | Path, tree: CompetenceTree) -> AcdMatrix:
    matrix, problems = acd_problems(path, tree)
    if problems:
        raise problems[0]
    return matrix


# -- raw responses -------------------------------------------------------------

def load_responses(path: str | Path) -> list[StatementResponse]:
    text = _read_text(path)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or set(RESPONSE_HEADER) - set(reader.fieldnames):
        raise ParseError(f"responses header must contain {', '.join(RESPONSE_HEADER)}", location=f"{path}:1")
    out = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            value = float(rec["value"])
            out.append(
                StatementResponse(
                    assessee=rec["assessee"].strip(),
                    competence=rec["competence"].strip(),
                    statement_id=rec["statement_id"].strip(),
                    value=int(value) if value.is_integer() else value,
                    weight=float(rec["weight"]),
                    assessor_role=rec["assessor_role"].strip(),
                    assessment_type=rec["assessment_type"].strip(),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), location=f"{path}:{lineno}") from None
        except CompgapError as exc:
            exc.location = f"{path}:{lineno}"
            raise
    return out


# -- job profile -------------------------------------------------------------

def _job_fields(path: str | Path) -> dict:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ParseError("job profile must be a JSON object", location=str(path))
    for key in ("rcd3", "hcv1", "hcv2"):
        if not isinstance(data.get(key), dict):
            raise ParseError(f"job profile needs an object {key!r}", location=str(path))
    eligibility = data.get("eligibility", [])
    if not isinstance(eligibility, list):
        raise ParseError("'eligibility' must be an array", location=str(path))
    return {
        "rcd3": data["rcd3"],
        "hcv1": data["hcv1"],
        "hcv2": data["hcv2"],
        "eligibility": eligibility,
        "f": data.get("f", 100),
        "job_id": str(data.get("job_id", Path(path).stem)),
    }


def job_file_problems(path: str | Path, tree: CompetenceTree) -> tuple[JobProfile | None, list[CompgapError]]:
    try:
        fields = _job_fields(path)
    except CompgapError as exc:
        return None, [exc]
    problems = job_problems(
        tree, fields["rcd3"], fields["hcv1"], fields["hcv2"], fields["eligibility"], fields["f"]
    )
    for p in problems:
        p.location = f"{path}: {p.location}" if p.location else str(path)
    return (None if problems else build_job_profile(tree, **fields)), problems


def load_job(path: str | Path, tree: CompetenceTree) -> JobProfile:
    profile, problems = job_file_problems(path, tree)
    if problems:
        raise problems[0]
    return profile


# -- writing -----------------------------------------------------------------

def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()

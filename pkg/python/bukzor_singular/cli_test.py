#!/usr/bin/env -S uv run pytest
"""Tests for the command-line interface."""

import csv
import json
from pathlib import Path
from typing import Any

import pytest
from click.testing import CliRunner
from click.testing import Result

import bukzor_singular.cli as M  # module under test

CASES = json.loads(
    (Path(__file__).parents[2] / "tests" / "test_cases.json").read_text()
)
SMALL_TREE = ["--mu", "3/5", "--b", "1", "--depth", "1", "--cap", "2"]


def _run(*args: str) -> Result:
    return CliRunner().invoke(M.main, list(args))


def _assert_subset(expected: Any, actual: Any, where: str = "$") -> None:
    """Every key of *expected* appears in *actual* with the same value."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict), where
        for key, value in expected.items():  # pyright: ignore
            assert key in actual, f"{where}.{key}"
            _assert_subset(value, actual[key], f"{where}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list), where
        assert len(actual) == len(expected), where  # pyright: ignore
        for i, (e, a) in enumerate(zip(expected, actual)):  # pyright: ignore
            _assert_subset(e, a, f"{where}[{i}]")
    else:
        assert actual == expected, where


def _build_tree(tmp_path: Path) -> Path:
    path = tmp_path / "tree.json"
    result = _run("tree", "build", *SMALL_TREE, "--out", str(path))
    assert result.exit_code == 0, result.output
    return path


@pytest.mark.parametrize("case", CASES, ids=[c["name"] for c in CASES])
def test_cases(case: dict[str, Any]):
    """Each stored command exits as expected and prints what is listed."""
    result = _run(*case["command"])
    assert result.exit_code == case.get("expected_exit", 0), result.output
    if "expected_output" in case:
        _assert_subset(case["expected_output"], json.loads(result.stdout))
    for text in case.get("expected_contains", []):
        assert text in result.output


def test_json_has_provenance():
    """Every JSON artifact opens with the run configuration."""
    result = _run(
        "--precision", "256", "lattice", "minima", "--x", "1,0,2", "--json"
    )
    provenance = json.loads(result.stdout)["provenance"]
    assert provenance["library"] == "bukzor-singular"
    assert provenance["config"]["command"] == "lattice minima"
    assert provenance["config"]["precision"] == 256
    assert provenance["config"]["params"] == {"x": [1, 0, 2]}


def test_precision_out_of_range():
    """The refinement ceiling cannot go below 64 bits."""
    result = _run("--precision", "8", "formulas", "threshold")
    assert result.exit_code == 2


def test_lattice_text():
    """Text mode lists the minima and both lattice checks."""
    result = _run("lattice", "minima", "--x", "1,0,2")
    assert result.exit_code == 0
    assert "lam1_sq: 1/4" in result.stdout
    assert "covolume: 1/2 ✓" in result.stdout


def test_bestapprox_text():
    """One line per record, then the rational marker."""
    result = _run("bestapprox", "--theta", "5/8,0", "--qmax", "10")
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0].startswith("1: ")
    assert lines[3].startswith("8: ")
    assert lines[-1] == "terminal: θ is rational"


def test_bestapprox_bai3():
    """The distance relations hold along a rational sequence."""
    result = _run(
        "bestapprox",
        "--theta",
        "5/8,0",
        "--qmax",
        "10",
        "--verify-bai3",
        "--json",
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["bai3"]["ok"] is True


def test_bestapprox_json_file(tmp_path: Path):
    """--json PATH writes the file and keeps stdout empty."""
    path = tmp_path / "seq.json"
    result = _run(
        "bestapprox", "--theta", "1/3,2/3", "--qmax", "5", "--json", str(path)
    )
    assert result.exit_code == 0
    assert result.stdout == ""
    records = json.loads(path.read_text())["sequence"]["records"]
    assert records[-1]["q"] == "3"


def test_formulas_csv(tmp_path: Path):
    """CSV carries two comment lines, a header and one row per μ."""
    path = tmp_path / "table.csv"
    result = _run(
        "formulas", "table", "--mu", "0.6:0.8:0.1", "--out", str(path)
    )
    assert result.exit_code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# {")
    assert lines[1].startswith("# generated ")
    rows = list(csv.DictReader(lines[2:]))
    assert [r["mu"] for r in rows] == ["0.6", "0.7", "0.8"]
    assert list(rows[0]) == list(M.fmt.FORMULA_COLUMNS)
    middle = rows[1]
    assert middle["b0"] and middle["gamma"] and middle["tau"]
    assert rows[2]["b0"] == rows[2]["tau"] == ""


def test_formulas_threshold():
    """The crossing is printed as a bracket of two decimals."""
    result = _run("formulas", "threshold")
    assert result.exit_code == 0
    lo, hi = result.stdout.strip().strip("[]").split(", ")
    assert 0.5 < float(lo) <= float(hi) < 1


def test_tree_build_and_verify(tmp_path: Path):
    """A stored tree re-verifies without structural failures."""
    path = _build_tree(tmp_path)
    data = json.loads(path.read_text())
    assert data["summary"] == {"nodes": 3, "depth": 1, "leaves": 2}
    report = tmp_path / "report.json"
    result = _run("tree", "verify", "--in", str(path), "--report", str(report))
    assert result.exit_code == 0, result.output
    payload = json.loads(report.read_text())
    assert payload["ok"] is True
    assert payload["failures"] == []
    assert len(payload["nodes"]) == 3


def test_tree_verify_selected_checks(tmp_path: Path):
    """Only the requested check groups are reported."""
    path = _build_tree(tmp_path)
    result = _run("tree", "verify", "--in", str(path), "--checks", "disjoint")
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["checks"] == ["disjoint"]
    assert "tiling" not in payload and "counting" not in payload


def test_tree_verify_unknown_check(tmp_path: Path):
    """An unknown group is a usage error."""
    path = _build_tree(tmp_path)
    result = _run("tree", "verify", "--in", str(path), "--checks", "color")
    assert result.exit_code == 2


def test_tree_verify_corrupted(tmp_path: Path):
    """A child moved off its parent fails verification with status 1."""
    path = _build_tree(tmp_path)
    data = json.loads(path.read_text())
    data["tree"]["nodes"][1]["x"] = ["1", "0", "3"]
    path.write_text(json.dumps(data))
    result = _run("tree", "verify", "--in", str(path))
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["ok"] is False
    assert payload["failures"]
    assert "node " in result.stderr


def test_tree_verify_malformed(tmp_path: Path):
    """Files that are not trees are reported, not raised."""
    path = tmp_path / "junk.json"
    path.write_text(json.dumps({"tree": {"nodes": []}}))
    result = _run("tree", "verify", "--in", str(path))
    assert result.exit_code == 1
    assert "Malformed tree file" in result.stderr


def test_dim_boxcount(tmp_path: Path):
    """The fit is reported next to the lower-bound exponent."""
    path = _build_tree(tmp_path)
    result = _run(
        "dim", "boxcount", "--tree", str(path), "--scales", "1/2,1/4,1/8"
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("slope: ")
    result = _run(
        "dim",
        "boxcount",
        "--tree",
        str(path),
        "--scales",
        "1/2,1/4,1/8",
        "--json",
    )
    data = json.loads(result.stdout)["boxcount"]
    assert data["scales"] == ["1/2", "1/4", "1/8"]
    assert len(data["counts"]) == 3
    assert all(1 <= n <= 2 for n in data["counts"])


def test_dim_boxcount_one_scale(tmp_path: Path):
    """A single scale cannot be fitted."""
    path = _build_tree(tmp_path)
    result = _run("dim", "boxcount", "--tree", str(path), "--scales", "1/2")
    assert result.exit_code == 1
    assert "DegenerateScales" in result.stderr


def test_dim_counting_payload(tmp_path: Path):
    """The profile of the root is written whatever its verdict."""
    path = _build_tree(tmp_path)
    result = _run(
        "dim",
        "counting",
        "--tree",
        str(path),
        "--tiling-limit",
        "40",
        "--json",
    )
    assert result.exit_code in (0, 1), result.output
    data = json.loads(result.stdout)["counting"]
    assert data["node"] == 0
    assert data["rows"]
    assert data["ok"] is (result.exit_code == 0)


def test_dim_counting_missing_node(tmp_path: Path):
    """Node ids past the end of the tree are rejected."""
    path = _build_tree(tmp_path)
    result = _run("dim", "counting", "--tree", str(path), "--node", "7")
    assert result.exit_code == 1
    assert "No node 7" in result.stderr


def test_singular_verify_from_file(tmp_path: Path):
    """A target file without a path still works with an explicit qmax."""
    path = tmp_path / "theta.json"
    path.write_text(
        json.dumps({"theta": {"center": ["5/8", "0"], "radius": "0"}})
    )
    result = _run(
        "singular", "verify", "--in", str(path), "--mu", "3/5", "--qmax", "10"
    )
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["witness"]["degenerate"] is True
    assert payload["ok"] is False


def test_verbose_logs_to_stderr(tmp_path: Path):
    """-v routes info records to stderr and leaves the artifact intact."""
    path = tmp_path / "tree.json"
    result = _run("-v", "tree", "build", *SMALL_TREE, "--out", str(path))
    assert result.exit_code == 0
    assert "built 3 nodes to depth 1" in result.stderr
    assert result.stdout == ""


@pytest.mark.slow
def test_tree_invariant_suite(tmp_path: Path):
    """At (3/5, b₀) and depth 3 no check group reports a failure."""
    path = tmp_path / "tree.json"
    result = _run(
        "tree",
        "build",
        *["--mu", "3/5", "--b", "auto", "--depth", "3", "--cap", "2"],
        *["--out", str(path)],
    )
    assert result.exit_code == 0, result.output
    result = _run(
        "tree",
        "verify",
        *["--in", str(path), "--tiling-limit", "64"],
        *["--checks", "nestedness,disjoint,packing,tiling,counting"],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert payload["ok"] is True
    assert payload["failures"] == []
    assert len(payload["nodes"]) == 15
    assert payload["tiling"] and payload["counting"]
    assert {"H", "V", "x_h", "x_v"} <= set(payload["tiling"][0])


def test_lattice_normalizes_vector():
    """Non-primitive or negative input is reduced to lowest terms."""
    for x in ("2,0,4", "-1,0,-2"):
        result = _run("lattice", "minima", "--x", x, "--json")
        assert result.exit_code == 0, result.output
        lattice = json.loads(result.stdout)["lattice"]
        assert lattice["x"] == ["1", "0", "2"]
        assert lattice["lam1_sq"] == "1/4"

import csv
import json

import numpy as np
import pytest

from lpalg.cli import main, parse_grid
from lpalg.core import save_matrix


@pytest.fixture
def swap_file(tmp_path):
    path = tmp_path / "swap.json"
    save_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]), path)
    return str(path)


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("1.5:2:0.25"), [1.5, 1.75, 2.0])
    np.testing.assert_allclose(parse_grid("2,4"), [2.0, 4.0])


def test_norm_text(swap_file, capsys):
    assert main(["norm", "--matrix", swap_file, "--p", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("value     1")
    assert "method    oracle" in out


def test_norm_json_roundtrips(swap_file, tmp_path):
    out = tmp_path / "n.json"
    assert main(["norm", "--matrix", swap_file, "--p", "1", "--json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["value"] == 1.0


def test_classify(swap_file, capsys):
    assert main(["classify", "--matrix", swap_file, "--p", "3", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["is_invertible_isometry"] and not data["is_hermitian"]


def test_verify_pass(capsys):
    assert main(["verify", "example-e7721"]) == 0
    out = capsys.readouterr().out
    assert "example-e7721: PASS" in out


def test_verify_json(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "example-e7721", "--json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["pass"] and data["experiment"] == "example-e7721"
    assert all("relation" in c for c in data["checks"])


def test_sweep_g_csv(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["sweep", "g", "--quantity", "g", "--n", "3", "--p-grid", "1.5:2.5:0.5", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["p"] for r in rows] == ["1.5", "2", "2.5"]
    assert float(rows[1]["value"]) == 1.0


def test_sweep_en(capsys):
    assert main(["sweep", "en", "--n", "3", "--p-grid", "2,4", "--quantity", "norm-one-minus"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "p,value,witness"
    assert float(lines[1].split(",")[1]) == pytest.approx(1.0, abs=1e-8)
    assert float(lines[2].split(",")[1]) > 1.04


@pytest.mark.parametrize(
    "argv",
    [
        ["norm", "--p", "3"],
        ["norm", "--matrix", "/nonexistent.json"],
        ["sweep", "en", "--p-grid", "3:1:1"],
        ["sweep", "en", "--quantity", "quotient", "--p-grid", "3"],
        ["sweep", "en", "--p-grid", "0.5"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "lpalg: error" in capsys.readouterr().err


def test_unknown_experiment():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2

import json
import os

import pytest

from utils import data, default
from utils.config import Config

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def write_quiver(path, vertices, edges):
    path.write_text(json.dumps({
        "vertices": vertices,
        "edges": [{"out": s, "in": t} for s, t in edges],
    }))
    return str(path)


@pytest.fixture
def app(monkeypatch):
    monkeypatch.chdir(ROOT)
    return data.LabApp(config=Config(quiverlab_workers=1))


@pytest.fixture
def a2_file(tmp_path):
    return write_quiver(tmp_path / "a2.json", ["1", "2"], [("1", "2")])


@pytest.fixture
def kronecker_file(tmp_path):
    return write_quiver(tmp_path / "kronecker.json", ["0", "1"], [("0", "1"), ("0", "1")])


def report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_classify(app, a2_file, capsys):
    assert app.run(["classify", "--quiver", a2_file]) == 0
    out = report(capsys)
    assert out["command"] == "classify"
    assert out["family"] == "finite"
    assert out["cartan"] == [[2, -1], [-1, 2]]
    assert len(out["quiver_hash"]) == 64


def test_malformed_quiver_exits_2(app, tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    assert app.run(["classify", "--quiver", str(broken)]) == 2
    assert "Could not read" in capsys.readouterr().out


def test_missing_file_exits_2(app, tmp_path):
    assert app.run(["classify", "--quiver", str(tmp_path / "missing.json")]) == 2


def test_unknown_command(app):
    assert app.run(["no-such-command"]) == 2


def test_kronecker_roots(app, kronecker_file, capsys):
    assert app.run(["roots", "--quiver", kronecker_file, "--cap", "3"]) == 0
    out = report(capsys)
    assert out["count"] == 11
    assert {"vector": [2, 2], "kind": "imaginary", "defect": 0} in out["roots"]


def test_cyclic_roots(app, tmp_path, capsys):
    q = write_quiver(
        tmp_path / "d4.json", ["c", "a", "b", "d", "e"],
        [("a", "c"), ("b", "c"), ("d", "c"), ("e", "c")],
    )
    assert app.run(["cyclic-roots", "--quiver", q]) == 0
    out = report(capsys)
    assert out["L"] == 3
    assert out["N"] == [2, 2, 2]
    assert out["passed"]


def test_cyclic_roots_refuses_finite(app, a2_file):
    assert app.run(["cyclic-roots", "--quiver", a2_file]) == 3


def test_lie_epsilon(app, a2_file, capsys):
    assert app.run(["lie-epsilon", "table", "--quiver", a2_file]) == 0
    out = report(capsys)
    assert out["basis"] == ["e(0,1)", "e(1,0)", "e(1,1)"]
    assert out["passed"]


def test_oracle_failure_writes_a_report(monkeypatch, kronecker_file, tmp_path):
    monkeypatch.chdir(ROOT)
    app = data.LabApp(config=Config(quiverlab_workers=1, quiverlab_max_prime=3))
    out = tmp_path / "r.json"
    code = app.run([
        "star", "--quiver", kronecker_file, "--f", "E(1,1)", "--g", "E(1,1)", "--out", str(out),
    ])
    assert code == 3
    written = json.loads(out.read_text())
    assert written["error"] == "CapExceeded"
    assert written["command"] == "star"
    assert not written["passed"]


def test_lie_epsilon_is_a_group(app, capsys):
    assert app.run(["commands"]) == 0
    assert "lie-epsilon table" in capsys.readouterr().out
    assert app.run(["lie-epsilon"]) == 2


def test_hall_number(app, a2_file, capsys):
    code = app.run([
        "hall-number", "--quiver", a2_file,
        "--sub", "P(0,1)", "--quotient", "P(1,0)", "--total", "P(1,1)",
    ])
    assert code == 0
    assert report(capsys)["hall"][0]["chi"] == 1


def test_star_bracket(app, a2_file, capsys):
    assert app.run(["star", "--quiver", a2_file, "--f", "E(1,0)", "--g", "E(0,1)", "--bracket"]) == 0
    assert report(capsys)["result"]["values"] == {"P(1,1)": "-1"}


def test_verify_ringel(app, a2_file, capsys):
    assert app.run(["verify", "ringel", "--quiver", a2_file]) == 0
    out = report(capsys)
    assert out["command"] == "verify ringel"
    assert out["passed"]


def test_verify_ringel_refuses_affine(app, kronecker_file):
    assert app.run(["verify", "ringel", "--quiver", kronecker_file]) == 3


def test_report_to_file(app, a2_file, tmp_path, capsys):
    out = tmp_path / "report.csv"
    assert app.run(["roots", "--quiver", a2_file, "--out", str(out), "--format", "csv"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "defect,kind,vector"
    assert len(lines) == 4
    assert "Report written" in capsys.readouterr().out


def test_commands_lists_groups(app, capsys):
    assert app.run(["commands"]) == 0
    assert "verify ringel" in capsys.readouterr().out


def test_emit_is_deterministic():
    text = default.emit({"b": 1, "a": [1, 2]})
    assert text == default.emit({"a": [1, 2], "b": 1})
    assert text.index('"a"') < text.index('"b"')


def test_config_from_dict():
    config = Config.from_dict(QUIVERLAB_CAP="3", QUIVERLAB_PRIMES="5, 3", UNRELATED="x")
    assert config.quiverlab_cap == 3
    assert config.primes == [3, 5]
    assert config.workers >= 1


def test_config_from_env(tmp_path):
    env = tmp_path / ".env"
    env.write_text("QUIVERLAB_MAX_PRIME=11\nQUIVERLAB_FORMAT=csv\n")
    config = Config.from_env(str(env))
    assert config.quiverlab_max_prime == 11
    assert config.quiverlab_format == "csv"
    with pytest.raises(FileNotFoundError):
        Config.from_env(str(tmp_path / "missing.env"))

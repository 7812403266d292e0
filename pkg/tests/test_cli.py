from __future__ import annotations

import json
from pathlib import Path

import pytest

from q2cert.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from q2cert.graph import Graph, path_graph


def test_classify_prints_certificate(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["classify", str(Graph.complete(4))]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "Q2"
    assert data["routes"] == ["Complete"]


def test_classify_then_verify(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    cert = tmp_path / "p3.json"
    assert main(["classify", str(path_graph(3)), "--json", str(cert)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("Q3")
    assert main(["verify", str(cert)]) == EXIT_OK
    assert "verified Q3" in capsys.readouterr().out


def test_verify_rejects_tampered_certificate(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    cert = tmp_path / "k4.json"
    assert main(["classify", str(Graph.complete(4)), "--json", str(cert)]) == EXIT_OK
    data = json.loads(cert.read_text())
    data["realization"]["matrix"][0][1] = "0/1"
    data["realization"]["matrix"][1][0] = "0/1"
    cert.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["verify", str(cert)]) == EXIT_FAILED
    assert "realization_pattern" in capsys.readouterr().out


def test_sweep_writes_report(tmp_path: Path) -> None:
    report = tmp_path / "sweep.json"
    assert main(["sweep", "--n", "4", "--report", str(report)]) == EXIT_OK
    data = json.loads(report.read_text())
    assert data["n"] == 4
    assert [row["classes"] for row in data["rows"]] == [1, 1, 2]


def test_batch_writes_json_lines(tmp_path: Path) -> None:
    source = tmp_path / "in.g6"
    source.write_text(f"{Graph.complete(3)}\n{Graph.complete(4)}\n", encoding="ascii")
    out = tmp_path / "out.jsonl"
    assert main(["batch", str(source), str(out), "--jobs", "1"]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 2


@pytest.mark.parametrize(
    ("argv", "code"),
    [
        (["classify", "A"], EXIT_FAILED),
        (["classify", "Bw", "--restarts", "0"], EXIT_USAGE),
        (["verify", "/nonexistent/certificate.json"], EXIT_FAILED),
    ],
)
def test_exit_codes(argv: list[str], code: int) -> None:
    assert main(argv) == code


def test_environment_overrides(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("Q2CERT_RESTARTS", "not-a-number")
    assert main(["classify", "Bw"]) == EXIT_USAGE

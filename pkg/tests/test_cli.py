import datetime
import json
from types import SimpleNamespace

import pytest
import yaml
from click.testing import CliRunner

from sequent_lab.cli import cli
from sequent_lab.grammar import format_derivation, parse_derivation
from sequent_lab.lab_logger import LabLogger
from sequent_lab.sequent_kernel import LI, check, is_cut_free
from tests.derivations import cut_chain, modus_ponens

THIRD_CHAIN = "algebra 3\nelements 0 1/3 1\n1 1 1\n0 1 1\n0 0 1\n"


@pytest.fixture
def runner():
    return CliRunner()


def run_json(runner, *args):
    result = runner.invoke(cli, ["--format", "json", *args])
    return result, json.loads(result.output)


def test_check_reports_ok(runner, tmp_path):
    path = tmp_path / "mp.sqp"
    path.write_text(format_derivation(modus_ponens()))
    result, report = run_json(runner, "check", str(path), "--calculus", "LI")
    assert result.exit_code == 0
    assert report["command"] == "check"
    assert report["verdict"] == "ok"
    assert report["data"]["violations"] == []
    text = runner.invoke(cli, ["check", str(path)])
    assert yaml.safe_load(text.output)["verdict"] == "ok"


def test_check_rejects_unknown_calculus(runner, tmp_path):
    path = tmp_path / "mp.sqp"
    path.write_text(format_derivation(modus_ponens()))
    result = runner.invoke(cli, ["check", str(path), "--calculus", "LK"])
    assert result.exit_code == 2


def test_parse_errors_exit_with_2(runner, tmp_path):
    path = tmp_path / "broken.sqp"
    path.write_text("(Id [p |- ")
    result, report = run_json(runner, "check", str(path))
    assert result.exit_code == 2
    assert report["verdict"] == "error"
    assert report["data"]["error"] == "ParseError"


def test_elim_cut_then_check(runner, tmp_path):
    source = tmp_path / "chain.sqp"
    source.write_text(format_derivation(cut_chain()))
    target = tmp_path / "chain-free.sqp"
    result, report = run_json(runner, "elim-cut", str(source), "-o", str(target))
    assert result.exit_code == 0
    assert report["data"]["cuts"] == 0
    assert report["data"]["passes"] >= 1
    d = parse_derivation(target.read_text())
    assert is_cut_free(d)
    assert check(d, LI) == []
    assert d.conclusion == cut_chain().conclusion
    result, report = run_json(runner, "check", str(target), "--calculus", "LI")
    assert result.exit_code == 0


def test_search_found_and_not_found(runner):
    result, report = run_json(runner, "search", "p & q |- q & p")
    assert result.exit_code == 0
    assert report["verdict"] == "found"
    result, report = run_json(runner, "search", "|- p | (p -> bot)", "--depth", "10")
    assert result.exit_code == 1
    assert report["verdict"] == "not-found-within-budget"
    assert report["data"]["reason"] == "search space exhausted"


def test_demo_p_counter2(runner, tmp_path):
    result, report = run_json(runner, "demo", "p-counter2")
    assert result.exit_code == 0
    assert report["verdict"] == "UNSOUND-INSTANCE"
    assert report["data"]["value"] == "1/2"
    assert report["data"]["per_valuation"] == [["0", "1"], ["1/2", "1/2"], ["1", "1"]]
    algebra = tmp_path / "third.pol"
    algebra.write_text(THIRD_CHAIN)
    result, report = run_json(runner, "demo", "p-counter2", "--algebra", str(algebra))
    assert report["data"]["value"] == "1/3"


def test_eval_values_and_countermodels(runner, tmp_path):
    model = tmp_path / "chain.mdl"
    model.write_text("algebra chain 0 1/2 1\n")
    result, report = run_json(runner, "eval", "All X. (X(*) -> bot) | X(*)", "--model", str(model))
    assert result.exit_code == 0
    assert report["data"]["value"] == "1/2"
    result, report = run_json(runner, "eval", "|- X(*) | (X(*) -> bot)", "--model", str(model))
    assert result.exit_code == 1
    assert report["verdict"] == "invalid"
    assert report["data"]["countermodel"]["sets"] == {"X": ["1/2"]}


def test_lattice_commands(runner, tmp_path):
    poset = tmp_path / "antichain.pol"
    poset.write_text("poset 2\nelements a b\n1 0\n0 1\n")
    result, report = run_json(runner, "lattice", "complete", str(poset))
    assert result.exit_code == 0
    assert len(report["data"]["elements"]) == 4
    assert report["data"]["embedding"] == {"a": "{a}", "b": "{b}"}
    result, report = run_json(runner, "lattice", "density", str(poset))
    assert report["verdict"] == "ok"
    result, report = run_json(runner, "lattice", "complete", str(poset), "--heyting")
    assert result.exit_code == 2
    assert report["data"]["error"] == "NotHeyting"
    result, report = run_json(runner, "lattice", "catalogue", "--max-size", "4")
    assert report["data"]["sizes"] == {"1": 1, "2": 1, "3": 1, "4": 2}
    assert report["data"]["total"] == 5
    result, report = run_json(runner, "lattice", "posets", "3")
    assert report["data"]["counts"] == {"0": 1, "1": 1, "2": 2, "3": 5}


def test_encode_induction(runner, tmp_path):
    output = tmp_path / "induction.sqp"
    result, report = run_json(runner, "encode", "induction", "p(x)", "-o", str(output))
    assert result.exit_code == 0
    assert report["data"]["calculus"] == "LIP0"
    assert output.exists()
    result, report = run_json(runner, "encode", "relativize", "All X. X(c)")
    assert result.exit_code == 2
    assert report["data"]["error"] == "LevelViolation"


class _ShiftedClock(datetime.datetime):
    @classmethod
    def now(cls, tz=None):
        return datetime.datetime(2001, 2, 3, 4, 5, 6)


@pytest.mark.parametrize("args", [["search", "p, p -> q |- q"], ["demo", "omega-cut"], ["lattice", "catalogue", "--max-size", "3"]])
def test_reports_do_not_depend_on_the_clock(runner, monkeypatch, args):
    first = runner.invoke(cli, ["--format", "json", *args])
    monkeypatch.setattr("sequent_lab.lab_logger.datetime", SimpleNamespace(datetime=_ShiftedClock))
    second = runner.invoke(cli, ["--format", "json", *args])
    assert first.exit_code == second.exit_code
    assert first.output == second.output
    report = json.loads(second.output)
    assert "date" not in report
    assert report["logs"] and not any(line.startswith("[") for line in report["logs"])


def test_log_entries_keep_their_time():
    logger = LabLogger()
    logger.info("started")
    assert logger.logs == ["INFO: started"]
    assert repr(logger).startswith("[") and repr(logger).endswith("] INFO: started")

import pytest

from f2homalg.chart.table import read_csv
from f2homalg.cli import BAD_INPUT, FAIL, OUT_ENV, PASS, main
from f2homalg.pipeline import Registry
from f2homalg.ss.scenario import emit_scenario
from toy import toy_text


def _stem_total(csv_text, stem):
    return sum(d for (n, _), (d, _) in read_csv(csv_text).items() if n == stem)


def test_resolve_writes_chart(tmp_path, capsys):
    assert main(["resolve", "--module", "a1-00", "--out", str(tmp_path)]) == PASS
    text = (tmp_path / "a1-00.csv").read_text()
    assert _stem_total(text, 12) == 1
    assert _stem_total(text, 23) == 4
    assert (tmp_path / "a1-00.svg").read_text().startswith("<?xml")
    assert "12:1" in capsys.readouterr().out


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert main(["resolve", "--module", "c2", "--max-s", "4", "--max-t", "12"]) == PASS
    assert (tmp_path / "env" / "c2.csv").is_file()


@pytest.mark.parametrize("argv", [
    ["resolve", "--module", "a1-22"],
    ["resolve"],
    ["frobnicate"],
    [],
    ["ss-run", "no_such_scenario"],
    ["chart", "--in", "missing.scn"],
])
def test_bad_input(argv, capsys):
    assert main(argv) == BAD_INPUT


def test_malformed_scenario_file(tmp_path):
    bad = tmp_path / "empty_run.scn"
    bad.write_text("")
    assert main(["ss-run", str(bad)]) == BAD_INPUT
    bad.write_text(toy_text("x 3 0 exterior\ny 2 2", "d2 x -> y\nd2 y -> x"))
    assert main(["ss-run", str(bad)]) == BAD_INPUT


def test_ss_run_exit_codes(tmp_path, capsys):
    good = tmp_path / "toy.scn"
    good.write_text(toy_text("x 3 0 exterior\ny 2 2", "d2 x -> y\nd* y -> 0", expect="stem 0 = 1"))
    assert main(["ss-run", str(good), "--audit"]) == PASS
    out = capsys.readouterr().out
    assert "d2(x) = y" in out and "toy\tinvariants\tpass" in out
    wrong = tmp_path / "wrong.scn"
    wrong.write_text(toy_text("x 3 0 exterior\ny 2 2", "d2 x -> y\nd* y -> 0", name="wrong",
                               expect="stem 2 = 1"))
    assert main(["ss-run", str(wrong)]) == FAIL


def test_chart_of_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.scn"
    empty.write_text("# nothing here\n")
    assert main(["chart", "--in", str(empty), "--format", "svg", "-o", "-"]) == PASS
    out = capsys.readouterr().out
    assert out.startswith("<?xml") and "<circle" not in out
    assert main(["chart", "--in", str(empty), "--format", "csv", "-o", str(tmp_path / "e.csv")]) == PASS
    assert (tmp_path / "e.csv").read_text() == "stem,filtration,dim,labels\n"


def test_chart_of_bundled_scenario(tmp_path):
    sc = Registry().scenario("thh_tower")
    path = tmp_path / "thh_tower.scn"
    path.write_text(emit_scenario(sc))
    assert main(["chart", "--in", str(path), "--format", "tikz", "-o", str(tmp_path / "t.tex")]) == PASS
    assert "% d3" in (tmp_path / "t.tex").read_text()


def test_cobar_check(capsys):
    assert main(["cobar-check", "--modules", "00"]) == PASS
    assert "fail" not in capsys.readouterr().out


def test_pipeline_and_verify(tmp_path, capsys):
    assert main(["pipeline", "thh_tower", "eta_quotient", "--no-adams", "--out", str(tmp_path)]) == PASS
    rows = (tmp_path / "verdicts.tsv").read_text().splitlines()
    assert rows[0] == "scenario\texpectation\tstatus"
    assert all(r.endswith("\tpass") for r in rows[1:]) and len(rows) > 5
    assert main(["verify", "thh_tower", "--no-adams"]) == PASS
    wrong = tmp_path / "scn"
    wrong.mkdir()
    (wrong / "wrong.scn").write_text(toy_text("x 3 0 exterior\ny 2 2", "d2 x -> y\nd* y -> 0",
                                              name="wrong", expect="stem 2 = 1"))
    assert main(["verify", "wrong", "--no-adams", "--dir", str(wrong)]) == FAIL
    assert main(["verify", "--dir", str(tmp_path / "nowhere")]) == BAD_INPUT

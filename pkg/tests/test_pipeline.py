import pytest

from f2homalg.pipeline import Registry, check_expectations
from f2homalg.pipeline.adams import MODULES, load_novikov, load_orders, scenario_adams_a1
from f2homalg.pipeline.runner import _check_branches
from f2homalg.pipeline.suite import generator_table, invariant_verdict, load_table, write_verdicts
from f2homalg.ss.engine import RunResult
from f2homalg.ss.scenario import Expectation

NAMES = Registry().names()


@pytest.mark.parametrize("name", NAMES)
def test_scenario_expectations(registry, name):
    sc = registry.scenario(name)
    result = registry.run(name)
    verdicts = check_expectations(sc, result, registry)
    if isinstance(result, RunResult):
        verdicts.append(invariant_verdict(name, result))
    bad = [f"{v.row()} {v.detail}" for v in verdicts if not v.passed]
    assert not bad, bad


def test_every_scenario_checks_something(registry):
    for name in NAMES:
        sc = registry.scenario(name)
        if sc.kind != "ring" or sc.expect:
            assert sc.expect, name


@pytest.mark.parametrize("ij", MODULES)
def test_adams_report(ij):
    rep = scenario_adams_a1(ij)
    assert rep.rows and rep.passed, rep.rows
    assert rep.seconds < 60


def test_adams_rejects_unknown_module():
    with pytest.raises(ValueError):
        scenario_adams_a1("21")


def test_order_tables():
    rows = load_orders()
    assert ("*", 12, 1) in rows
    assert {r[0] for r in rows if r[1] == 22} == {"0*", "1*"}
    nov = load_novikov()
    assert nov["order"] == {19: 2} and nov["relation"]
    with pytest.raises(ValueError):
        load_orders("* 12\n")
    with pytest.raises(ValueError):
        load_novikov("guess 1 2\n")


def test_generator_table(registry):
    rows, problems = generator_table(registry)
    assert len(rows) == 14 and not problems, problems
    assert {r.generator for r in rows} == {n for n, _ in registry.scenario("syntomic_ceta_base").module_gens}
    with pytest.raises(ValueError):
        load_table("nu 3 1\n")


def test_c_branches_differ_and_c_is_pinned(registry):
    sc = registry.scenario("tate_v2")
    assert sc.params["c"] == 1 and sc.branches["c"] == [0, 1]
    v = _check_branches(sc, Expectation("branches", ("differ",), True), registry)
    assert v.passed
    v = _check_branches(sc, Expectation("branches", ("agree",), True), registry)
    assert not v.passed


def test_default_params_share_cache(registry):
    assert registry.run("tate_v2") is registry.run("tate_v2", {"c": 1})
    assert registry.run("tate_v2") is not registry.run("tate_v2", {"c": 0})
    assert registry.run("thh_tower") is registry.run("thh_tower", {"c": 0})


def test_annotations_are_not_computed(registry):
    sc = registry.scenario("v1_syntomic")
    assert any("undetermined" in text for _, _, text in sc.annotations)
    assert all(e.kind != "annotation" for e in sc.expect)


def test_verdict_file(tmp_path):
    from f2homalg.pipeline import Verdict

    path = write_verdicts([Verdict("a", "stem 0 = 1", True), Verdict("b", "closed", False, "why")],
                          tmp_path / "out" / "verdicts.tsv")
    assert path.read_text().splitlines() == [
        "scenario\texpectation\tstatus", "a\tstem 0 = 1\tpass", "b\tclosed\tfail"]


def test_failing_expectation_is_reported(tmp_path):
    text = Registry().scenario("thh_tower")
    from f2homalg.ss.scenario import emit_scenario

    body = emit_scenario(text).replace("stem 0 = 1", "stem 0 = 2")
    (tmp_path / "thh_wrong.scn").write_text(body.replace("name thh_tower", "name thh_wrong"))
    reg = Registry(tmp_path)
    sc = reg.scenario("thh_wrong")
    verdicts = check_expectations(sc, reg.run("thh_wrong"), reg)
    bad = [v for v in verdicts if not v.passed]
    assert [v.expectation for v in bad] == ["stem 0 = 2"]

import pytest

from f2homalg.pipeline import check_expectations
from f2homalg.ss.fiber import (FiberError, GradedMap, GradedSpace, TableEntry, collapse,
                               fiber_of_pair, presented_space, table_map)
from f2homalg.ss.scenario import parse_scenario

RING = "[gradings]\nname r\nkind ring\n[generators]\neta 1 1\nmu 8 0\n[window]\nstems -1 20\n"


@pytest.mark.parametrize("name", ["syntomic_v2", "syntomic_ceta"])
def test_bundled_fibers(registry, name):
    sc = registry.scenario(name)
    verdicts = check_expectations(sc, registry.run(name), registry)
    assert verdicts and all(v.passed for v in verdicts), [v.row() for v in verdicts if not v.passed]


def test_equal_maps_keep_both_sides(registry):
    fr = registry.run("syntomic_v2")
    fib = fiber_of_pair(fr.f, fr.f)
    for k in fr.X.keys():
        assert sum(c.origin == "kernel" for c in fib.classes.get(k, [])) == fr.X.dim(k)
    for k in fr.Y.keys():
        shifted = (k[0] - 1, k[1] + 1)
        assert sum(c.origin == "cokernel" for c in fib.classes.get(shifted, [])) == fr.Y.dim(k)


def test_boundary_labels(registry):
    fr = registry.run("syntomic_v2")
    labels = [c.label for cs in fr.fiber.classes.values() for c in cs if c.origin == "cokernel"]
    assert labels and all(lbl.startswith("∂") for lbl in labels)
    assert "∂" in fr.fiber.labels((-1, 1))


def test_basis_mismatch():
    X = GradedSpace({(0, 0): ["a", "b"]})
    Y = GradedSpace({(0, 0): ["c"]})
    with pytest.raises(FiberError, match="basis mismatch"):
        GradedMap(X, Y, {(0, 0): [1]}).check()
    with pytest.raises(FiberError, match="basis mismatch"):
        GradedMap(X, Y, {(0, 0): [2, 0]}).check()
    Y2 = GradedSpace({(0, 0): ["d"]})
    with pytest.raises(FiberError, match="different bases"):
        fiber_of_pair(GradedMap(X, Y, {(0, 0): [1, 0]}), GradedMap(X, Y2, {(0, 0): [1, 0]}))


def test_table_map_checks(registry):
    run = registry.run("thh_tower")
    X = collapse(run, run.report)
    Y = presented_space(parse_scenario(RING).space(), (-1, 20))
    with pytest.raises(FiberError, match="not a permanent cycle"):
        table_map(X, Y, [TableEntry("lambda2", "mu")])
    with pytest.raises(FiberError, match="changes degree"):
        table_map(X, Y, [TableEntry("mu", "eta")])
    m = table_map(X, Y, [TableEntry("mu^k", "mu^k", "k", 0, 2)])
    assert m.matrix[(8, 0)] == [1]


def test_collapse_drops_tracked_coordinate(registry):
    run = registry.run("thh_tower")
    X = collapse(run, run.report)
    assert all(len(k) == 2 for k in X.keys())
    assert sum(X.stem_dims([10]).values()) == run.stem_totals([10], run.report)[10]

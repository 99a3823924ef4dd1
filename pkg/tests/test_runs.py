from f2homalg.pipeline import Registry, check_expectations
from f2homalg.pipeline.runner import graded_dims
from f2homalg.ss.invariants import check_all

BASE = """[gradings]
name thh_base
kind ring

[generators]
lambda1' 5 1 exterior
lambda2 7 1 exterior
mu 8 0

[window]
stems -1 20
"""

TOWER = """[gradings]
name thh_tower_base
kind run
convention bockstein
base thh_base
tower eta 1 1

[window]
stems -1 20
tracked eta 0 24
report stems 0 16
report tracked eta 0 18

[rules]
d1 lambda2 -> eta*lambda1'
d3 lambda1'*lambda2 -> eta^3*mu
d* lambda1' -> 0
d* mu -> 0

[pages]
last 4
"""


def test_two_encodings_of_the_eta_bockstein(tmp_path, registry):
    (tmp_path / "thh_base.scn").write_text(BASE)
    (tmp_path / "thh_tower_base.scn").write_text(TOWER)
    reg = Registry(tmp_path)
    a = reg.run("thh_tower_base")
    b = registry.run("thh_tower")
    assert a.einf_dims() == b.einf_dims()
    assert graded_dims(a) == graded_dims(b)
    check_all(a)


def test_trivial_tower_is_free(registry):
    run = registry.run("a1_syntomic")
    base = registry.run("syntomic_ceta_base")
    pos = run.convention.position
    dims = run.einf_dims()
    assert not run.audit
    for k, d in dims.items():
        e = k[pos]
        assert d == base.dim((k[0] - 6 * e, k[1]))
    for k in base.keys():
        if run.report.contains((k[0], k[1], 0)):
            assert dims.get((k[0], k[1], 0), 0) == base.dim(k)


def test_bockstein_expectations(registry):
    for name in ("thh_tower", "a1_syntomic", "v1_syntomic"):
        sc = registry.scenario(name)
        bad = [v.row() for v in check_expectations(sc, registry.run(name), registry) if not v.passed]
        assert not bad, bad


def test_tower_algebra_is_attached(registry):
    run = registry.run("a1_syntomic")
    alg = run.meta["algebra"]
    assert alg is not None and alg.name.endswith(".tower")
    # every d_1 target degree is empty here, so the product rule holds vacuously
    assert check_all(run, alg)["product_rule"] == 0
    assert alg.multipliers == [(6, 0, 1)]

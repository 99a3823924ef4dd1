import pytest
from hypothesis import given, settings, strategies as st

from f2homalg.pipeline import Registry
from f2homalg.ss.scenario import ScenarioError, emit_scenario, parse_scenario

HEAD = "[gradings]\nname s\nkind run\n"
GENS = "[generators]\nv2 6 0\nnu 3 1\nw 5 1 exterior\nlambda1' 5 1 exterior\n"
WINDOW = "[window]\nstems 0 20\n"


def test_generator_line():
    sc = parse_scenario(HEAD + GENS + WINDOW)
    g = {x.name: x for x in sc.generators}
    assert (g["lambda1'"].stem, g["lambda1'"].filtration, g["lambda1'"].parity) == (5, 1, "exterior")
    assert g["v2"].parity == "polynomial"


def test_rule_with_correct_bidegree():
    sc = parse_scenario(HEAD + GENS + WINDOW + "[rules]\nd3 v2^2 -> nu^2*w\n")
    (rule,) = sc.rules
    assert (rule.page, rule.source, rule.target) == (3, "v2^2", "nu^2*w")


def test_rule_with_wrong_bidegree_names_line():
    with pytest.raises(ScenarioError, match=r"line 12: d2 v2\^2 -> nu\^2\*w: bidegree law violated"):
        parse_scenario(HEAD + GENS + WINDOW + "[rules]\nd2 v2^2 -> nu^2*w\n")


def test_empty_file():
    with pytest.raises(ScenarioError, match="no gradings section"):
        parse_scenario("")
    with pytest.raises(ScenarioError, match="no gradings section"):
        parse_scenario("# only a comment\n\n")


@pytest.mark.parametrize("text, message", [
    (HEAD + "[generators]\nx 1 1\nx 2 2\n" + WINDOW, "duplicate generator x"),
    (HEAD + "[bogus]\n", "unknown section"),
    (HEAD + "[gradings]\n", "duplicate section"),
    ("name s\n", "outside any section"),
    (HEAD + "colour red\n", "unknown gradings key"),
    (HEAD + "[generators]\nx 1 1 fermionic\n", "unknown parity"),
    (HEAD + "[generators]\nx one 1\n", "expected integers"),
    (HEAD + GENS + WINDOW + "[rules]\nd3 v2^2 nu^2*w\n", "rule must read"),
    (HEAD + GENS + WINDOW + "[expect]\nbranches maybe\n", "branches line"),
    (HEAD + GENS + WINDOW + "[expect]\nclosed now\n", "closed takes no arguments"),
    (HEAD + GENS + WINDOW + "[expect]\nguess 3\n", "unknown expectation"),
    (HEAD + GENS + WINDOW + "[annotations]\n6 2 hidden\n", "annotation line"),
    ("[gradings]\nname s\nkind ring\n" + GENS, "stems window"),
])
def test_rejections(text, message):
    with pytest.raises(ScenarioError, match=message):
        parse_scenario(text)


def test_closed_annotations_and_expectations():
    text = (HEAD + GENS + WINDOW + "[params]\nc 1\nbranch c 0 1\n"
            "[closed]\nv2^k for k in 0..3\nnu*w\n"
            "[annotations]\n6 2 : hidden extension nu^2 -> v2\n"
            "[expect]\nbranches differ\nperiodic v2\nclosed\ne2 other\ndims other\n")
    sc = parse_scenario(text)
    assert [(e.source, e.var, e.lo, e.hi) for e in sc.closed] == [("v2^k", "k", 0, 3), ("nu*w", None, 0, 0)]
    assert sc.annotations == [(6, 2, "hidden extension nu^2 -> v2")]
    assert [str(e) for e in sc.expect] == ["branches differ", "periodic v2", "closed", "e2 other", "dims other"]
    assert sc.branches == {"c": [0, 1]}


def test_bundled_scenarios_round_trip():
    reg = Registry()
    names = reg.names()
    assert len(names) >= 18
    for name in names:
        sc = reg.scenario(name)
        again = parse_scenario(emit_scenario(sc), name)
        assert again.structure() == sc.structure(), name


_name = st.from_regex(r"[a-z][a-z0-9]{0,4}", fullmatch=True)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(_name, st.integers(-5, 20), st.integers(-2, 6),
                          st.sampled_from(["polynomial", "exterior"])),
                min_size=1, max_size=5, unique_by=lambda g: g[0]),
       st.integers(-3, 3), st.integers(4, 30),
       st.lists(st.tuples(st.integers(-3, 20), st.integers(0, 5), st.integers(0, 4)), max_size=4))
def test_random_scenarios_round_trip(gens, lo, hi, stems):
    text = HEAD + "[generators]\n" + "".join(f"{n} {s} {f} {p}\n" for n, s, f, p in gens)
    text += f"[window]\nstems {lo} {hi}\n[expect]\n" + "".join(f"einf {n} {f} = {d}\n" for n, f, d in stems)
    sc = parse_scenario(text)
    assert parse_scenario(emit_scenario(sc)).structure() == sc.structure()

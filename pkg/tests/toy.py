"""Small scenario texts shared by the engine and CLI tests."""

from f2homalg.ss.runs import run
from f2homalg.ss.scenario import parse_scenario


def toy_text(gens: str, rules: str, name: str = "toy", expect: str = "") -> str:
    return (f"[gradings]\nname {name}\nkind run\n[generators]\n{gens}\n"
            f"[window]\nstems 0 12\nreport stems 0 9\n[rules]\n{rules}\n[pages]\nlast 4\n"
            + (f"[expect]\n{expect}\n" if expect else ""))


def toy_run(gens: str, rules: str):
    return run(parse_scenario(toy_text(gens, rules)))

"""Loading and running scenarios by name, with cached results."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from ..gf2 import int_rref
from ..ss.engine import RunResult, Window
from ..ss.fiber import FiberResult, GradedSpace, collapse, fiber_of_pair, presented_space, table_map
from ..ss.invariants import check_periodicity, multiplication_report
from ..ss.maps import evaluate
from ..ss.runs import bockstein_run, run
from ..ss.scenario import Scenario, ScenarioError, parse_scenario

DATA = resources.files(__package__) / "data"


@dataclass
class Verdict:
    scenario: str
    expectation: str
    passed: bool
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def row(self) -> str:
        return f"{self.scenario}\t{self.expectation}\t{self.status}"


@dataclass
class FiberRun:
    scenario: Scenario
    source: RunResult
    X: object
    Y: object
    f: object
    g: object
    fiber: FiberResult


class Registry:
    """Scenario files of one directory, run on demand and cached."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else None
        self._scenarios: dict = {}
        self._runs: dict = {}

    def _text(self, name: str) -> str:
        if self.directory is not None:
            path = self.directory / f"{name}.scn"
            if path.exists():
                return path.read_text(encoding="utf-8")
        res = DATA / f"{name}.scn"
        if not res.is_file():
            raise ScenarioError(f"no scenario named {name!r}")
        return res.read_text(encoding="utf-8")

    def names(self) -> list[str]:
        out = {p.name[:-4] for p in DATA.iterdir() if p.name.endswith(".scn")}
        if self.directory is not None:
            out |= {p.stem for p in self.directory.glob("*.scn")}
        return sorted(out)

    def scenario(self, name: str) -> Scenario:
        if name not in self._scenarios:
            sc = parse_scenario(self._text(name), name=name)
            if sc.name and sc.name != name:
                raise ScenarioError(f"scenario file {name}.scn declares name {sc.name}")
            sc.name = name
            self._scenarios[name] = sc
        return self._scenarios[name]

    def add(self, sc: Scenario) -> None:
        self._scenarios[sc.name] = sc

    def param_names(self, name: str) -> set:
        """Parameters a scenario depends on, through every run it references."""
        return set(self.default_params(name))

    def default_params(self, name: str) -> dict:
        """Pinned values of every parameter in reach; a scenario's own value wins over its inputs'."""
        sc = self.scenario(name)
        out: dict = {}
        for dep in self._dependencies(sc):
            for k, v in self.default_params(dep).items():
                out.setdefault(k, v)
        out.update(sc.params)
        return out

    @staticmethod
    def _dependencies(sc: Scenario) -> list:
        deps = [d for d in (sc.source, sc.base, sc.algebra) if d]
        return deps + [other for _, other, _ in sc.compare]

    def run(self, name: str, params: Optional[dict] = None):
        sc = self.scenario(name)
        defaults = self.default_params(name)
        relevant = {**defaults, **{k: v for k, v in (params or {}).items() if k in defaults}}
        key = (name, tuple(sorted(relevant.items())))
        if key not in self._runs:
            build = {"fiber": self._fiber, "ring": self._ring}.get(sc.kind, self._run)
            self._runs[key] = build(sc, relevant)
        return self._runs[key]

    def _run(self, sc: Scenario, params: Optional[dict]) -> RunResult:
        def resolve(name):
            return self.run(name, params)

        if sc.base is not None:
            return bockstein_run(sc, self.scenario(sc.base), params, resolve)
        return run(sc, params, resolve)

    def _ring(self, sc: Scenario, params: Optional[dict]) -> GradedSpace:
        own = {k: v for k, v in (params or {}).items() if k in sc.params}
        return presented_space(sc.space(own), sc.window["stems"], sc.window.get("filtrations"))

    def _fiber(self, sc: Scenario, params: Optional[dict]) -> FiberRun:
        src = self.run(sc.source, params)
        if not isinstance(src, RunResult):
            raise ScenarioError(f"{sc.name}: source {sc.source} is not a spectral sequence run")
        stems = sc.window.get("stems")
        if stems is None:
            raise ScenarioError(f"{sc.name}: window needs a stems line")
        rep = src.report
        region = Window(stems, rep.tracked if rep else (), rep.filtrations if rep else None)
        X = collapse(src, region)
        Y = presented_space(sc.space(), stems, sc.window.get("filtrations"))
        f = table_map(X, Y, sc.maps["f"], "f")
        g = table_map(X, Y, sc.maps["g"], "g")
        return FiberRun(sc, src, X, Y, f, g, fiber_of_pair(f, g))


def graded_dims(result, page: Optional[int] = None) -> tuple[dict, tuple]:
    """Dimensions per (stem, filtration) and the stem range on which they are final.

    For a run, ``page`` selects E_page instead of E_infinity.
    """
    if isinstance(result, FiberRun):
        lo, hi = result.scenario.window["stems"]
        fib = result.fiber
        return {k: fib.dim(k) for k in fib.keys() if lo <= k[0] < hi}, (lo, hi - 1)
    if isinstance(result, GradedSpace):
        stems = (min(k[0] for k in result.keys()), max(k[0] for k in result.keys()))
        return {k: result.dim(k) for k in result.keys()}, stems
    if isinstance(result, RunResult):
        region = result.report or result.final.window
        if page is not None:
            return _page_dims(result, page, region), tuple(region.stems)
        X = collapse(result, region)
        return {k: X.dim(k) for k in X.keys()}, tuple(region.stems)
    raise ScenarioError(f"no dimensions for {type(result).__name__}")


def closed_form_mismatches(sc: Scenario, result) -> list[str]:
    """Where the [closed] classes fail to be a basis of E_infinity on the report window.

    Every listed class inside the window must be a nonzero permanent cycle,
    the classes at one key must be independent, and their number must be
    the E_infinity dimension there.
    """
    if not isinstance(result, RunResult):
        raise ScenarioError(f"{sc.name}: closed forms apply to spectral sequence runs")
    if not sc.closed:
        raise ScenarioError(f"{sc.name}: no [closed] section")
    region = result.report or result.final.window
    tags: dict = {}
    bad = []
    for entry in sc.closed:
        for text, _ in entry.expand():
            k, v = evaluate(result.space, text)
            if not v:
                raise ScenarioError(f"{text} is zero", entry.line)
            k = tuple(k)
            if not region.contains(k):
                continue
            kp = result.final.data.get(k)
            tag = kp.coords(v) if kp is not None else None
            if not tag:
                bad.append(f"{text} is not a nonzero class of E_infinity")
                continue
            tags.setdefault(k, []).append(tag)
    for k in sorted(set(tags) | {k for k in result.final.keys() if region.contains(k)}):
        got = tags.get(k, [])
        if len(int_rref(got)) != len(got):
            bad.append(f"classes at {k} are dependent")
        elif len(got) != result.final.dim(k):
            bad.append(f"{k}: {len(got)} listed, dimension {result.final.dim(k)}")
    return bad


def _page_dims(run: RunResult, r: int, region: Window) -> dict:
    pg = run.pages[r]
    pos = run.convention.position
    out: dict = {}
    for k in pg.keys():
        if region.contains(k) and pg.dim(k):
            ck = tuple(x for i, x in enumerate(k) if i != pos) if pos is not None else tuple(k)
            out[ck] = out.get(ck, 0) + pg.dim(k)
    return out


def _branch_assignments(sc: Scenario) -> list[dict]:
    out = [{}]
    for name, vals in sorted(sc.branches.items()):
        out = [{**a, name: v} for a in out for v in vals]
    return out


def compare_dims(mine, other, page: Optional[int] = None) -> list:
    """Keys where two graded results disagree, on their common stem range."""
    a, (alo, ahi) = graded_dims(mine, page)
    b, (blo, bhi) = graded_dims(other)
    lo, hi = max(alo, blo), min(ahi, bhi)
    keys = {k for k in set(a) | set(b) if lo <= k[0] <= hi}
    return sorted((k, a.get(k, 0), b.get(k, 0)) for k in keys if a.get(k, 0) != b.get(k, 0))


def check_expectations(sc: Scenario, result, registry: Optional[Registry] = None) -> list[Verdict]:
    out = []
    for e in sc.expect:
        if e.kind == "dims":
            out.extend(_check_dims(sc, e, result, registry))
            continue
        if e.kind == "e2":
            out.extend(_check_dims(sc, e, result, registry, page=min(result.pages)))
            continue
        if e.kind == "branches":
            out.append(_check_branches(sc, e, registry))
            continue
        if e.kind == "closed":
            try:
                bad = closed_form_mismatches(sc, result)
            except Exception as err:  # reported as a failing row
                out.append(Verdict(sc.name, str(e), False, f"{type(err).__name__}: {err}"))
                continue
            out.append(Verdict(sc.name, str(e), not bad, "; ".join(bad[:6]) or "agree"))
            continue
        try:
            got = _observe(e, result)
        except Exception as err:  # reported as a failing row
            out.append(Verdict(sc.name, str(e), False, f"{type(err).__name__}: {err}"))
            continue
        ok = (e.value in got) if e.kind == "contains" else got == e.value
        out.append(Verdict(sc.name, str(e), ok, f"observed {got}"))
    return out


def _check_dims(sc: Scenario, e, result, registry, page: Optional[int] = None) -> list[Verdict]:
    if registry is None:
        return [Verdict(sc.name, str(e), False, "dims expectations need a registry")]
    other = e.key[0]
    out = []
    for assign in _branch_assignments(registry.scenario(other)):
        tag = " ".join(f"{k}={v}" for k, v in assign.items())
        label = f"{e} [{tag}]" if tag else str(e)
        try:
            bad = compare_dims(result, registry.run(other, assign), page)
        except Exception as err:  # reported as a failing row
            out.append(Verdict(sc.name, label, False, f"{type(err).__name__}: {err}"))
            continue
        detail = "agree" if not bad else "differ at " + ", ".join(
            f"{k}: {x} vs {y}" for k, x, y in bad[:6])
        out.append(Verdict(sc.name, label, not bad, detail))
    return out


def _check_branches(sc: Scenario, e, registry) -> Verdict:
    if registry is None:
        return Verdict(sc.name, str(e), False, "branch expectations need a registry")
    assigns = _branch_assignments(sc)
    if len(assigns) < 2:
        return Verdict(sc.name, str(e), False, "the scenario has no branches")
    try:
        results = [registry.run(sc.name, {**sc.params, **a}) for a in assigns]
        diffs = [(a, compare_dims(results[0], r)) for a, r in zip(assigns[1:], results[1:])]
    except Exception as err:  # reported as a failing row
        return Verdict(sc.name, str(e), False, f"{type(err).__name__}: {err}")
    differ = [(a, bad) for a, bad in diffs if bad]
    ok = not differ if e.key[0] == "agree" else bool(differ)
    if not differ:
        return Verdict(sc.name, str(e), ok, "all branches agree")
    detail = "; ".join(f"{assigns[0]} vs {a} at " + ", ".join(str(k) for k, _, _ in bad[:6])
                       for a, bad in differ)
    return Verdict(sc.name, str(e), ok, detail)


def _observe(e, result):
    if isinstance(result, GradedSpace):
        if e.kind == "stem":
            return result.stem_dims([e.key[0]])[e.key[0]]
        if e.kind == "einf":
            return result.dim(e.key)
        if e.kind == "contains":
            return result.basis.get(tuple(e.key), [])
        raise ScenarioError(f"{e.kind} expectations do not apply to ring scenarios", e.line)
    if isinstance(result, FiberRun):
        fib = result.fiber
        if e.kind in ("stem", "fiber"):
            return fib.stem_dims([e.key[0]])[e.key[0]]
        if e.kind == "einf":
            return fib.dim(e.key)
        if e.kind == "contains":
            return fib.labels(e.key)
        raise ScenarioError(f"{e.kind} expectations do not apply to fiber scenarios", e.line)
    if e.kind == "stem":
        return result.stem_totals([e.key[0]])[e.key[0]]
    if e.kind == "einf":
        if not result.final.is_certified(e.key):
            raise ScenarioError(f"{e.key} is not certified", e.line)
        return result.final.dim(e.key)
    if e.kind == "contains":
        return result.einf(e.key)
    if e.kind == "rank":
        rep = multiplication_report(result, e.key[0], result.report or result.final.window)
        return rep.rank
    if e.kind == "periodic":
        return check_periodicity(result, e.key[0], result.report or result.final.window) > 0
    if e.kind == "page":
        r, key = e.key[0], e.key[1:]
        page = result.pages.get(r)
        if page is None:
            raise ScenarioError(f"the run has no page {r}", e.line)
        return page.dim(key)
    raise ScenarioError(f"unknown expectation {e.kind}", e.line)

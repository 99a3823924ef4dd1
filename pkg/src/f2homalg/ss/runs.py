"""Running a parsed scenario, including Bockstein runs over a base presentation."""

from __future__ import annotations

from typing import Callable, Optional

from .engine import Comparison, DifferentialRule, RunResult, run_pages
from .maps import MonomialMap
from .scenario import Scenario, ScenarioError, bockstein_scenario

Resolver = Callable[[str], object]  # scenario or run name -> Scenario / RunResult


def _no_resolver(name: str):
    raise ScenarioError(f"cannot resolve {name!r} without a registry")


def run(sc: Scenario, params: Optional[dict] = None, resolve_run: Resolver = _no_resolver,
        algebra: Optional[RunResult] = None) -> RunResult:
    """Run a self-contained scenario; referenced algebra and comparison runs come from ``resolve_run``."""
    if sc.kind != "run":
        raise ScenarioError(f"{sc.name} is a {sc.kind} scenario, not a run")
    if sc.base is not None:
        raise ScenarioError(f"{sc.name} is a Bockstein run; use bockstein_run")
    own = {k: v for k, v in (params or {}).items() if k in sc.params}
    space = sc.space(own)
    conv = sc.make_convention(space)
    if algebra is None and sc.algebra:
        algebra = resolve_run(sc.algebra)
    if algebra is None and sc.module_gens:
        raise ScenarioError(f"{sc.name}: a module run needs the algebra run it is a module over")
    comparisons = []
    for how, other, label in sc.compare:
        orun = resolve_run(other)
        if how == "compare":
            mp = MonomialMap(space, orun.space, name=label)
        else:
            mp = MonomialMap(orun.space, space, name=label)
        comparisons.append(Comparison(orun, mp, label, incoming=how == "from"))
    res = run_pages(sc.name, space, conv, sc.box(), sc.rules, last_page=sc.last_page,
                    multipliers=sc.multipliers, report=sc.report_window(), algebra=algebra,
                    comparisons=comparisons)
    res.meta["params"] = {**sc.params, **own}
    res.meta["algebra"] = algebra
    return res


def bockstein_run(sc: Scenario, base: Scenario, params: Optional[dict] = None,
                  resolve_run: Resolver = _no_resolver) -> RunResult:
    """Run over E_1 = base ⊗ F₂[tower], filtered by the exponent of the tower class."""
    full = bockstein_scenario(sc, base)
    algebra = None
    if base.module_gens and not sc.algebra:
        if base.generators:
            raise ScenarioError(f"{sc.name}: the base algebra of {base.name} needs its own run")
        algebra = run(_tower_scenario(sc), params)
    res = run(full, params, resolve_run, algebra)
    res.meta["base"] = base.name
    res.meta["tower"] = sc.tower.name
    return res


def _tower_scenario(sc: Scenario) -> Scenario:
    """F₂[tower] with the tower class a permanent cycle, for modules over a trivial base."""
    t = sc.tower
    out = Scenario(name=f"{sc.name}.tower", kind="run", convention="bockstein", tracked=[t.name],
                   generators=[t], last_page=sc.last_page)
    out.window = {k: v for k, v in sc.window.items() if k in ("stems", f"tracked {t.name}")}
    out.report = {k: v for k, v in sc.report.items() if k in ("stems", f"tracked {t.name}")}
    out.rules = [DifferentialRule(None, t.name, "0")]
    return out

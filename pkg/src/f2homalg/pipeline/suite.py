"""Every encoded computation in one pass, with a verdict row per expectation."""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from ..chart import ChartSpec, chart_from_run
from ..ss.engine import RunResult
from ..ss.invariants import check_all
from .adams import adams_verdicts
from .runner import FiberRun, Registry, Verdict, check_expectations

DATA = resources.files(__package__) / "data"


@dataclass(frozen=True)
class TableRow:
    generator: str
    bidegree: tuple
    detecting: str


def load_table(text: Optional[str] = None) -> list[TableRow]:
    if text is None:
        text = (DATA / "ceta_generators.dat").read_text(encoding="utf-8")
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {n}: expected 'name stem filtration class'")
        rows.append(TableRow(parts[0], (int(parts[1]), int(parts[2])), parts[3]))
    return rows


def generator_table(registry: Registry, fiber: str = "syntomic_ceta",
                    base: str = "syntomic_ceta_base") -> tuple[list[TableRow], list[str]]:
    """Rows of the generator table with the problems found against the computed fiber.

    Each row is checked three ways: the generator exists in ``base`` with that
    bidegree, the class is a fiber class there, and the classes named at
    each bidegree are exactly the fiber basis.
    """
    rows = load_table()
    fib = registry.run(fiber)
    if not isinstance(fib, FiberRun):
        raise TypeError(f"{fiber} is not a fiber scenario")
    gens = dict(registry.scenario(base).module_gens)
    problems = []
    by_key: dict = {}
    for r in rows:
        if tuple(gens.get(r.generator, ())) != r.bidegree:
            problems.append(f"{r.generator}: bidegree {r.bidegree} vs base {gens.get(r.generator)}")
        if r.detecting not in fib.fiber.labels(r.bidegree):
            problems.append(f"{r.generator}: {r.detecting} is not a fiber class at {r.bidegree}")
        by_key.setdefault(r.bidegree, []).append(r.detecting)
    for k in fib.fiber.keys():
        if sorted(by_key.get(k, [])) != sorted(fib.fiber.labels(k)):
            problems.append(f"{k}: table {sorted(by_key.get(k, []))} vs fiber {fib.fiber.labels(k)}")
    if set(gens) != {r.generator for r in rows}:
        problems.append("generator names differ from the base scenario")
    return rows, problems


def generator_chart(registry: Registry, run: str = "a1_syntomic") -> ChartSpec:
    """E_infinity of the free run at (stem, filtration) with v2 lines.

    The run is over the presentation whose module generators are the table
    rows, so the v2-exponent-zero dots carry the generator names.
    """
    return chart_from_run(registry.run(run), lines=["v2"], motivic=True,
                          title="generators of the free F2[v2]-module")


def invariant_verdict(name: str, result) -> Verdict:
    try:
        counts = check_all(result, result.meta.get("algebra"))
    except Exception as err:  # reported as a failing row
        return Verdict(name, "invariants", False, f"{type(err).__name__}: {err}")
    return Verdict(name, "invariants", True, " ".join(f"{k}={v}" for k, v in counts.items()))


def run_all(registry: Optional[Registry] = None, names: Optional[Iterable[str]] = None,
            adams: bool = True, log=None) -> list[Verdict]:
    """Run scenarios (all by default), the Adams order report and the generator table."""
    registry = registry or Registry()
    out: list[Verdict] = []
    for name in (list(names) if names is not None else registry.names()):
        t0 = time.perf_counter()
        sc = registry.scenario(name)
        try:
            result = registry.run(name)
        except Exception as err:  # reported as a failing row
            out.append(Verdict(name, "run", False, f"{type(err).__name__}: {err}"))
            continue
        out.extend(check_expectations(sc, result, registry))
        if isinstance(result, RunResult):
            out.append(invariant_verdict(name, result))
        if log:
            log(f"{name}: {time.perf_counter() - t0:.1f} s")
    if names is None:
        rows, problems = generator_table(registry)
        out.append(Verdict("generator_table", f"{len(rows)} generators match the fiber",
                           not problems and len(rows) == 14, "; ".join(problems)))
    if adams:
        out.extend(adams_verdicts())
    return out


def write_verdicts(verdicts: Iterable[Verdict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["scenario\texpectation\tstatus"] + [v.row() for v in verdicts]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

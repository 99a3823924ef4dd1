"""Adams charts of the four A(1)[ij] and their per-stem totals against stated homotopy orders.

In the stems checked here the Adams spectral sequence collapses, so the
E_2 total in stem n is log2 of the order of pi_n.
"""

from __future__ import annotations

import fnmatch
import time
from dataclasses import dataclass, field
from importlib import resources

from ..steenrod import ExtChart, a1_ij_module, ext_chart, minimal_resolution, steenrod_algebra
from .runner import Verdict

DATA = resources.files(__package__) / "data"
MODULES = ("00", "01", "10", "11")
S_MAX, T_MAX = 16, 52


def load_orders(text: str | None = None) -> list[tuple[str, int, int]]:
    """Rows (ij glob, stem, log2 order) of the order table."""
    if text is None:
        text = (DATA / "adams_orders.dat").read_text(encoding="utf-8")
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {n}: expected 'modules stem order'")
        rows.append((parts[0], int(parts[1]), int(parts[2])))
    return rows


def load_novikov(text: str | None = None) -> dict:
    """Stated Novikov orders per stem and relations, kept as annotations."""
    if text is None:
        text = (DATA / "novikov_orders.dat").read_text(encoding="utf-8")
    out = {"order": {}, "relation": []}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind, rest = line.split(None, 1)
        if kind == "order":
            stem, val = rest.split()
            out["order"][int(stem)] = int(val)
        elif kind == "relation":
            out["relation"].append(rest.strip())
        else:
            raise ValueError(f"unknown Novikov entry {kind!r}")
    return out


@dataclass
class AdamsReport:
    module: str
    chart: ExtChart
    seconds: float
    rows: list = field(default_factory=list)  # (stem, expected, observed)

    @property
    def passed(self) -> bool:
        return all(e == o for _, e, o in self.rows)

    def verdicts(self) -> list[Verdict]:
        name = f"adams_a1_{self.module}"
        return [Verdict(name, f"stem {n} total = {e}", e == o, f"observed {o}")
                for n, e, o in self.rows]


_CACHE: dict = {}


def adams_chart(ij: str, s_max: int = S_MAX, t_max: int = T_MAX) -> tuple[ExtChart, float]:
    key = (ij, s_max, t_max)
    if key not in _CACHE:
        t0 = time.perf_counter()
        module = a1_ij_module(int(ij[0]), int(ij[1]), steenrod_algebra())
        res = minimal_resolution(module, s_max, t_max)
        _CACHE[key] = (ext_chart(res), time.perf_counter() - t0)
    return _CACHE[key]


def scenario_adams_a1(ij: str, s_max: int = S_MAX, t_max: int = T_MAX) -> AdamsReport:
    """Chart of H*(A(1)[ij]) and the comparison with every order row matching ij."""
    if ij not in MODULES:
        raise ValueError(f"unknown module A(1)[{ij}]")
    chart, secs = adams_chart(ij, s_max, t_max)
    rep = AdamsReport(ij, chart, secs)
    for glob, stem, order in load_orders():
        if fnmatch.fnmatchcase(ij, glob):
            rep.rows.append((stem, order, chart.stem_total(stem)))
    return rep


def novikov_verdicts(reports: list[AdamsReport]) -> list[Verdict]:
    """Stated Novikov orders must match the Adams totals of every module."""
    nov = load_novikov()
    out = []
    for stem, order in sorted(nov["order"].items()):
        got = sorted({r.chart.stem_total(stem) for r in reports})
        out.append(Verdict("novikov_a1", f"stem {stem} order = {order}", got == [order],
                           f"Adams totals {got}"))
    return out


def adams_verdicts() -> list[Verdict]:
    reports = [scenario_adams_a1(ij) for ij in MODULES]
    out = [v for r in reports for v in r.verdicts()]
    return out + novikov_verdicts(reports)

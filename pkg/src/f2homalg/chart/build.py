"""Chart specs from Ext charts, spectral sequence runs and graded answers."""

from __future__ import annotations

from typing import Optional, Sequence

from ..graded.presentation import PresentedModule, bits
from ..ss.engine import RunResult, Window
from ..ss.fiber import FiberResult, GradedSpace
from ..steenrod.ext import ExtChart
from .spec import Arrow, ChartSpec, Line


def _frame(keys, stems=None, fils=None) -> tuple[tuple, tuple]:
    keys = list(keys)
    if stems is None:
        stems = (min((k[0] for k in keys), default=0), max((k[0] for k in keys), default=10))
    if fils is None:
        fils = (min((k[1] for k in keys), default=0), max((k[1] for k in keys), default=5))
    return tuple(stems), tuple(fils)


def chart_from_ext(chart: ExtChart, stems: tuple = (0, 28), title: str = "") -> ChartSpec:
    """Adams chart: one dot per Ext generator, h_i lines where the products were computed."""
    lo, hi = stems
    smax = max((k[1] for k in chart.dims), default=0)
    spec = ChartSpec(title, (lo, hi), (0, max(smax, 1)))
    for (stem, s), labels in sorted(chart.labels.items()):
        if lo <= stem <= hi:
            for lbl in labels:
                spec.add_dot(stem, s, lbl)
    keys = {d.key for d in spec.dots}
    for name, entries in sorted(chart.lines.items()):
        i = int(name[1:])
        for (s, t), m in sorted(entries.items()):
            for a in range(m.shape[0]):
                for b in range(m.shape[1]):
                    if m[a, b]:
                        src = (t - s, s, a)
                        tgt = (t + (1 << i) - s - 1, s + 1, b)
                        if src in keys and tgt in keys:
                            spec.lines.append(Line(src, tgt, name))
    return spec


def chart_from_graded(result, stems=None, fils=None, title: str = "") -> ChartSpec:
    """Dots for a graded space or a fiber, keyed by (stem, filtration)."""
    if isinstance(result, FiberResult):
        items = [(k, result.labels(k)) for k in result.keys()]
    elif isinstance(result, GradedSpace):
        items = [(k, result.basis[k]) for k in result.keys()]
    else:
        raise TypeError(f"cannot chart {type(result).__name__}")
    st, fl = _frame([k for k, _ in items], stems, fils)
    spec = ChartSpec(title, st, fl)
    for k, labels in items:
        if st[0] <= k[0] <= st[1] and fl[0] <= k[1] <= fl[1]:
            for lbl in labels:
                spec.add_dot(k[0], k[1], lbl)
    return spec


def chart_from_run(run: RunResult, region: Optional[Window] = None, lines: Sequence[str] = (),
                   arrows: bool = True, title: str = "", motivic: bool = False) -> ChartSpec:
    """E_infinity as filled dots, killed classes as open dots joined by their differentials.

    The vertical axis is the filtration of the run's convention, so every
    d_r arrow has bidegree (-1, r).  With ``motivic`` it is the motivic
    filtration instead and arrows only keep their stem shift.
    """
    region = region or run.report or run.final.window
    conv = run.convention

    def place(k):
        return (k[0], k[1] if motivic else conv.filtration(k))

    final = run.final
    fkeys = [k for k in final.keys() if region.contains(k) and final.dim(k)]
    audit = [a for a in run.audit if region.contains(a.source_key)
             and region.contains(tuple(x + y for x, y in zip(a.source_key, conv.delta(a.page))))]
    all_keys = [place(k) for k in fkeys]
    for a in audit:
        all_keys.append(place(a.source_key))
    st, fl = _frame(all_keys)
    fl = (min(fl[0], 0), fl[1])
    spec = ChartSpec(title or run.name, st, fl, arrow_fil_is_page=not motivic)
    at: dict = {}
    for k in fkeys:
        p = place(k)
        for i, lbl in enumerate(final.basis(k)):
            at[(k, i)] = spec.add_dot(p[0], p[1], lbl)
    if arrows:
        open_dots: dict = {}

        def open_dot(k, label):
            p = place(k)
            if (p, label) not in open_dots:
                open_dots[(p, label)] = spec.add_dot(p[0], p[1], label, style="open")
            return open_dots[(p, label)]

        for a in audit:
            tk = tuple(x + y for x, y in zip(a.source_key, conv.delta(a.page)))
            src, tgt = open_dot(a.source_key, a.source), open_dot(tk, a.target)
            spec.arrows.append(Arrow(src.key, tgt.key, a.page))
    is_module = isinstance(run.space, PresentedModule)
    aspace = run.space.algebra if is_module else run.space
    for name in lines:
        ku, vu = aspace.parse(name)
        if not vu:
            continue
        for k in fkeys:
            for i, rep in enumerate(final.data[k].reps):
                if is_module:
                    kt, v = run.space.act(ku, vu, k, rep)
                else:
                    kt, v = run.space.multiply(ku, vu, k, rep)
                kt = tuple(kt)
                tkp = final.data.get(kt)
                if not v or tkp is None or not region.contains(kt):
                    continue
                tag = tkp.coords(v)
                for j in bits(tag or 0):
                    if (kt, j) in at:
                        spec.lines.append(Line(at[(k, i)].key, at[(kt, j)].key, name))
    return spec


def annotate(spec: ChartSpec, annotations) -> ChartSpec:
    spec.annotations.extend(tuple(a) for a in annotations)
    return spec

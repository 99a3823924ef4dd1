"""SVG 1.1 output with deterministic bytes for a fixed chart."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .spec import ChartSpec

UNIT = 30
MARGIN = 40
SPREAD = 7.0
STROKES = {"h0": "#1f4e99", "h1": "#1f4e99", "h2": "#1f4e99", "h3": "#7f7f7f"}


def _f(v: float) -> str:
    return f"{v:.1f}"


class _Frame:
    def __init__(self, spec: ChartSpec):
        self.spec = spec
        self.counts = spec.dims()
        self.width = 2 * MARGIN + (spec.stems[1] - spec.stems[0]) * UNIT
        self.height = 2 * MARGIN + (spec.fils[1] - spec.fils[0]) * UNIT

    def x(self, stem: float) -> float:
        return MARGIN + (stem - self.spec.stems[0]) * UNIT

    def y(self, fil: float) -> float:
        return MARGIN + (self.spec.fils[1] - fil) * UNIT

    def point(self, key) -> tuple[float, float]:
        stem, fil, idx = key
        n = self.counts.get((stem, fil), 1)
        return self.x(stem) + (idx - (n - 1) / 2) * SPREAD, self.y(fil)


def emit_svg(spec: ChartSpec) -> str:
    spec = spec.sorted()
    spec.validate()
    fr = _Frame(spec)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fr.width}" '
        f'height="{fr.height}" viewBox="0 0 {fr.width} {fr.height}">',
        '<defs><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
        'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#b22222"/></marker></defs>',
        f"<title>{escape(spec.title)}</title>",
        '<g class="axes" stroke="#000000" stroke-width="1">',
        f'<line x1="{_f(fr.x(spec.stems[0]))}" y1="{_f(fr.y(spec.fils[0]))}" '
        f'x2="{_f(fr.x(spec.stems[1]))}" y2="{_f(fr.y(spec.fils[0]))}"/>',
        f'<line x1="{_f(fr.x(spec.stems[0]))}" y1="{_f(fr.y(spec.fils[0]))}" '
        f'x2="{_f(fr.x(spec.stems[0]))}" y2="{_f(fr.y(spec.fils[1]))}"/>',
        "</g>",
        '<g class="ticks" font-family="sans-serif" font-size="9" fill="#000000">',
    ]
    for n in range(spec.stems[0], spec.stems[1] + 1):
        if n % 2 == 0:
            out.append(f'<text x="{_f(fr.x(n))}" y="{_f(fr.y(spec.fils[0]) + 14)}" '
                       f'text-anchor="middle">{n}</text>')
    for s in range(spec.fils[0], spec.fils[1] + 1):
        out.append(f'<text x="{_f(fr.x(spec.stems[0]) - 8)}" y="{_f(fr.y(s) + 3)}" '
                   f'text-anchor="end">{s}</text>')
    out.append("</g>")
    if spec.lines:
        out.append('<g class="lines" stroke-width="1" fill="none">')
        for ln in spec.lines:
            (x1, y1), (x2, y2) = fr.point(ln.source), fr.point(ln.target)
            stroke = STROKES.get(ln.kind, "#555555")
            out.append(f'<line class={quoteattr(ln.kind)} stroke="{stroke}" x1="{_f(x1)}" '
                       f'y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}"/>')
        out.append("</g>")
    if spec.arrows:
        out.append('<g class="differentials" stroke="#b22222" stroke-width="1">')
        for a in spec.arrows:
            (x1, y1), (x2, y2) = fr.point(a.source), fr.point(a.target)
            out.append(f'<line class="d{a.page}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" '
                       f'y2="{_f(y2)}" marker-end="url(#head)"/>')
        out.append("</g>")
    if spec.dots:
        out.append('<g class="dots" stroke="#000000">')
        for d in spec.dots:
            x, y = fr.point(d.key)
            fill = "#000000" if d.style == "filled" else "#ffffff"
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.5" fill="{fill}"/>')
        out.append("</g>")
        labelled = [d for d in spec.dots if d.label]
        if labelled:
            out.append('<g class="labels" font-family="sans-serif" font-size="7" fill="#333333">')
            for d in labelled:
                x, y = fr.point(d.key)
                out.append(f'<text x="{_f(x + 3)}" y="{_f(y - 4)}">{escape(d.label)}</text>')
            out.append("</g>")
    if spec.annotations:
        out.append('<g class="annotations" font-family="sans-serif" font-size="7" fill="#006400">')
        for stem, fil, text in spec.annotations:
            out.append(f'<text x="{_f(fr.x(stem) + 3)}" y="{_f(fr.y(fil) + 10)}">{escape(text)}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

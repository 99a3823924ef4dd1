"""TikZ-style picture text; emitted only, never compiled."""

from __future__ import annotations

from .spec import ChartSpec

SPREAD = 0.15


def _tex(label: str) -> str:
    return label.replace("lambda", r"\lambda_").replace("eps", r"\varepsilon_").replace("∂", r"\partial ")


def emit_tikz(spec: ChartSpec) -> str:
    spec = spec.sorted()
    spec.validate()
    counts = spec.dims()

    def pt(key) -> str:
        stem, fil, idx = key
        n = counts.get((stem, fil), 1)
        return f"({stem + (idx - (n - 1) / 2) * SPREAD:.2f},{fil})"

    (s0, s1), (f0, f1) = spec.stems, spec.fils
    out = [f"% {spec.title}" if spec.title else "% chart", r"\begin{tikzpicture}[scale=0.5]",
           fr"\draw[->] ({s0},{f0}) -- ({s1},{f0});", fr"\draw[->] ({s0},{f0}) -- ({s0},{f1});"]
    out += [fr"\node[below] at ({n},{f0}) {{\tiny {n}}};" for n in range(s0, s1 + 1) if n % 2 == 0]
    out += [fr"\node[left] at ({s0},{s}) {{\tiny {s}}};" for s in range(f0, f1 + 1)]
    out += [fr"\draw {pt(ln.source)} -- {pt(ln.target)}; % {ln.kind}" for ln in spec.lines]
    out += [fr"\draw[->,red] {pt(a.source)} -- {pt(a.target)}; % d{a.page}" for a in spec.arrows]
    for d in spec.dots:
        fill = r"\fill" if d.style == "filled" else r"\draw"
        out.append(fr"{fill} {pt(d.key)} circle (2pt);")
        if d.label:
            out.append(fr"\node[above right] at {pt(d.key)} {{\tiny ${_tex(d.label)}$}};")
    out += [fr"\node[green!40!black] at ({s},{f}) {{\tiny {t}}};" for s, f, t in spec.annotations]
    out.append(r"\end{tikzpicture}")
    return "\n".join(out) + "\n"

"""Renderable charts: dots on the (stem, filtration) lattice, structure lines and differentials."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

# structure-line classes by bidegree of the multiplier
SLOPES = {(0, 1): "h0", (-1, 1): "h0", (1, 1): "h1", (3, 1): "h2", (7, 1): "h3"}


class ChartError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Dot:
    stem: int
    fil: int
    index: int = 0
    label: str = ""
    style: str = "filled"  # filled | open

    @property
    def key(self) -> tuple:
        return (self.stem, self.fil, self.index)


@dataclass(frozen=True, order=True)
class Line:
    source: tuple  # (stem, fil, index)
    target: tuple
    kind: str


@dataclass(frozen=True, order=True)
class Arrow:
    source: tuple
    target: tuple
    page: int


@dataclass
class ChartSpec:
    title: str = ""
    stems: tuple = (0, 10)
    fils: tuple = (0, 5)
    dots: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    arrows: list = field(default_factory=list)
    annotations: list = field(default_factory=list)  # (stem, fil, text)
    arrow_fil_is_page: bool = True  # d_r raises filtration by exactly r

    def add_dot(self, stem: int, fil: int, label: str = "", style: str = "filled") -> Dot:
        idx = sum(1 for d in self.dots if (d.stem, d.fil) == (stem, fil))
        dot = Dot(stem, fil, idx, label, style)
        self.dots.append(dot)
        return dot

    def dot_at(self, stem: int, fil: int, label: Optional[str] = None) -> Optional[Dot]:
        here = [d for d in self.dots if (d.stem, d.fil) == (stem, fil)]
        if label is not None:
            for d in here:
                if d.label == label:
                    return d
        return here[0] if here else None

    def dims(self) -> dict:
        out: dict = {}
        for d in self.dots:
            out[(d.stem, d.fil)] = out.get((d.stem, d.fil), 0) + 1
        return out

    def validate(self) -> None:
        keys = {d.key for d in self.dots}
        if self.stems[0] > self.stems[1] or self.fils[0] > self.fils[1]:
            raise ChartError("empty chart window")
        for a in self.arrows:
            if a.source not in keys or a.target not in keys:
                raise ChartError(f"d{a.page} arrow {a.source[:2]} -> {a.target[:2]} misses a dot")
            ds, df = a.target[0] - a.source[0], a.target[1] - a.source[1]
            if ds != -1 or (self.arrow_fil_is_page and df != a.page):
                raise ChartError(f"d{a.page} arrow {a.source[:2]} -> {a.target[:2]} breaks the bidegree law")
        for ln in self.lines:
            if ln.source not in keys or ln.target not in keys:
                raise ChartError(f"{ln.kind} line {ln.source[:2]} -> {ln.target[:2]} misses a dot")

    def sorted(self) -> "ChartSpec":
        """A copy with every list in a fixed order, for byte-stable output."""
        return ChartSpec(self.title, tuple(self.stems), tuple(self.fils),
                         sorted(self.dots, key=lambda d: d.key), sorted(set(self.lines)),
                         sorted(set(self.arrows)), sorted(self.annotations),
                         self.arrow_fil_is_page)

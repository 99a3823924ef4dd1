"""The fixed CSV schema: stem,filtration,dim,labels with labels joined by semicolons."""

from __future__ import annotations

import csv
import io

from .spec import ChartSpec

HEADER = ("stem", "filtration", "dim", "labels")


def emit_csv(spec: ChartSpec) -> str:
    groups: dict = {}
    for d in spec.sorted().dots:
        groups.setdefault((d.stem, d.fil), []).append(d.label)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for (stem, fil), labels in sorted(groups.items()):
        w.writerow((stem, fil, len(labels), ";".join(labels)))
    return buf.getvalue()


def read_csv(text: str) -> dict:
    """(stem, filtration) -> (dim, labels) from emitted CSV."""
    rows = csv.reader(io.StringIO(text))
    if tuple(next(rows)) != HEADER:
        raise ValueError("not a chart CSV")
    out = {}
    for stem, fil, dim, labels in rows:
        out[(int(stem), int(fil))] = (int(dim), labels.split(";") if labels else [])
    return out

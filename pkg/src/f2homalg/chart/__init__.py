"""Charts on the (stem, filtration) lattice and their SVG, TikZ-style and CSV forms."""

from .build import annotate, chart_from_ext, chart_from_graded, chart_from_run
from .spec import Arrow, ChartError, ChartSpec, Dot, Line
from .svg import emit_svg
from .table import emit_csv, read_csv
from .tikz import emit_tikz

__all__ = [
    "Arrow", "ChartError", "ChartSpec", "Dot", "Line", "annotate", "chart_from_ext",
    "chart_from_graded", "chart_from_run", "emit_csv", "emit_svg", "emit_tikz", "read_csv",
]

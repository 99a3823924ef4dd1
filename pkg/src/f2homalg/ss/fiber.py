"""Degreewise fiber of a pair of maps between graded F₂-vector spaces.

The fiber of f − g in degree (n, m) is assembled from the kernel of f − g in
(n, m) and the cokernel in (n + 1, m − 1):  0 → C → F → K → 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..gf2 import Subspace
from ..graded.presentation import PresentationError, bits, monomial_basis
from .engine import RunResult, Window
from .maps import evaluate, substitute


class FiberError(ValueError):
    pass


@dataclass
class GradedSpace:
    """Finite-dimensional pieces indexed by keys, with a label per basis element."""

    basis: dict
    origin: dict = field(default_factory=dict)  # key -> list of (full key, E_2 vector)
    space: object = None
    region: Optional[Window] = None  # full keys a collapsed space was taken over

    def dim(self, key) -> int:
        return len(self.basis.get(tuple(key), []))

    def keys(self) -> list:
        return sorted(k for k, b in self.basis.items() if b)

    def stem_dims(self, stems) -> dict:
        return {n: sum(len(b) for k, b in self.basis.items() if k[0] == n) for n in stems}


@dataclass
class GradedMap:
    """Degree-preserving linear map; column i of matrix[key] is the image of basis i."""

    source: GradedSpace
    target: GradedSpace
    matrix: dict

    def check(self) -> None:
        for k, cols in self.matrix.items():
            if len(cols) != self.source.dim(k):
                raise FiberError(f"basis mismatch at {k}: {len(cols)} columns for a "
                                 f"{self.source.dim(k)}-dimensional source")
            n = self.target.dim(k)
            for c in cols:
                if c >> n:
                    raise FiberError(f"basis mismatch at {k}: image outside the "
                                     f"{n}-dimensional target")

    def column(self, key, i) -> int:
        cols = self.matrix.get(tuple(key))
        return cols[i] if cols else 0


def collapse(run: RunResult, region: Window, position: Optional[int] = None) -> GradedSpace:
    """E_infinity of a run as a space graded by (stem, filtration), dropping one coordinate."""
    pos = run.convention.position if position is None else position
    basis, origin = {}, {}
    for k in run.final.keys():
        if not region.contains(k):
            continue
        if not run.final.is_certified(k):
            raise FiberError(f"{k} is not certified on E_infinity of {run.name}")
        ck = tuple(x for i, x in enumerate(k) if i != pos) if pos is not None else k
        kp = run.final.data[k]
        for rep in kp.reps:
            basis.setdefault(ck, []).append(run.space.label(k, rep))
            origin.setdefault(ck, []).append((k, rep))
    return GradedSpace(basis, origin, run, region)


def presented_space(space, stems, filtrations=None) -> GradedSpace:
    """Monomial basis of a presentation without tracked coordinates, as a graded space."""
    basis, origin = {}, {}
    for k, b in monomial_basis(space, stems, filtrations).items():
        basis[k] = [space._label(m) for m in b]
        origin[k] = [(k, 1 << i) for i in range(len(b))]
    return GradedSpace(basis, origin, space)


@dataclass(frozen=True)
class TableEntry:
    source: str
    target: str
    var: Optional[str] = None
    lo: int = 0
    hi: int = 0
    line: Optional[int] = None

    def expand(self):
        if self.var is None:
            yield self.source, self.target
            return
        for v in range(self.lo, self.hi + 1):
            vals = {self.var: v}
            yield substitute(self.source, vals), substitute(self.target, vals)


def table_map(source: GradedSpace, target: GradedSpace, entries: Sequence[TableEntry],
              name: str = "map", position: Optional[int] = None) -> GradedMap:
    """Linear map on E_infinity classes declared by representatives.

    Listed classes go to the given images; canonical basis classes outside
    the span of the listed ones go to zero.
    """
    run = source.space
    if not isinstance(run, RunResult):
        raise FiberError(f"{name}: source must be the E_infinity of a run")
    pos = run.convention.position if position is None else position
    tspace = target.space
    per_key: dict = {}
    for e in entries:
        where = f" (line {e.line})" if e.line else ""
        for src, tgt in e.expand():
            try:
                k, v = evaluate(run.space, src)
            except PresentationError as err:
                raise FiberError(f"{name}{where}: {err}") from None
            if k is None or not v:
                continue
            ck = tuple(x for i, x in enumerate(k) if i != pos) if pos is not None else tuple(k)
            if source.region is not None and not source.region.contains(k):
                continue
            kp = run.final.data.get(tuple(k))
            tag = kp.coords(v) if kp is not None else None
            if tag is None:
                raise FiberError(f"{name}{where}: {src} is not a permanent cycle")
            if not tag:
                continue
            if ck not in source.basis:
                continue
            try:
                tk, tv = evaluate(tspace, tgt) if tgt.strip() != "0" else (ck, 0)
            except PresentationError as err:
                raise FiberError(f"{name}{where}: {err}") from None
            if tv and tuple(tk) != ck:
                raise FiberError(f"{name}{where}: {src} ↦ {tgt} changes degree {ck} → {tk}")
            offset = [o[0] for o in source.origin[ck]].index(tuple(k))
            per_key.setdefault(ck, []).append((tag << offset, tv, src))
    matrix = {}
    for ck in source.keys():
        n = source.dim(ck)
        rows: dict = {}
        for vec, img, src in per_key.get(ck, []):
            while vec:
                p = vec.bit_length() - 1
                if p not in rows:
                    rows[p] = (vec, img)
                    break
                vec ^= rows[p][0]
                img ^= rows[p][1]
            if not vec and img:
                raise FiberError(f"{name}: inconsistent images for classes at {ck} ({src})")
        for i in range(n):
            vec, img = 1 << i, 0
            while vec:
                p = vec.bit_length() - 1
                if p not in rows:
                    rows[p] = (vec, img)
                    break
                vec ^= rows[p][0]
                img ^= rows[p][1]
        cols = []
        for i in range(n):
            vec, img = 1 << i, 0
            while vec:
                p = vec.bit_length() - 1
                pv, pi = rows[p]
                vec ^= pv
                img ^= pi
            cols.append(img)
        matrix[ck] = cols
    gm = GradedMap(source, target, matrix)
    gm.check()
    return gm


@dataclass
class FiberClass:
    key: tuple
    label: str
    origin: str  # "kernel" or "cokernel"


@dataclass
class FiberResult:
    classes: dict
    kernel: dict
    cokernel: dict
    shift: tuple

    def dim(self, key) -> int:
        return len(self.classes.get(tuple(key), []))

    def keys(self) -> list:
        return sorted(k for k, c in self.classes.items() if c)

    def stem_dims(self, stems) -> dict:
        return {n: sum(len(c) for k, c in self.classes.items() if k[0] == n) for n in stems}

    def labels(self, key) -> list[str]:
        return [c.label for c in self.classes.get(tuple(key), [])]


def _combo(labels, vec) -> str:
    return " + ".join(labels[i] for i in bits(vec))


def _boundary_label(lbl: str) -> str:
    if lbl == "1":
        return "∂"
    if " + " in lbl:
        return f"∂({lbl})"
    return f"∂{lbl}"


def fiber_of_pair(f: GradedMap, g: GradedMap, shift=(-1, 1)) -> FiberResult:
    """Kernel and shifted cokernel of f − g, degree by degree."""
    if f.source is not g.source or f.target is not g.target:
        for a, b in ((f.source, g.source), (f.target, g.target)):
            if a.basis != b.basis:
                raise FiberError("basis mismatch: f and g have different bases")
    f.check()
    g.check()
    X, Y = f.source, f.target
    kernel, coker = {}, {}
    for k in sorted(set(X.keys()) | set(Y.keys())):
        n, m = X.dim(k), Y.dim(k)
        cols = [f.column(k, i) ^ g.column(k, i) for i in range(n)]
        rows: dict = {}
        kern = []
        for i, c in enumerate(cols):
            v, tag = c, 1 << i
            while v:
                p = v.bit_length() - 1
                if p not in rows:
                    rows[p] = (v, tag)
                    break
                v ^= rows[p][0]
                tag ^= rows[p][1]
            if not v:
                kern.append(tag)
        kern = sorted(Subspace(n, kern).basis()) if kern else []
        if kern:
            kernel[k] = [_combo(X.basis[k], t) for t in kern]
        img = Subspace(m, [c for c in cols if c])
        piv = set(img.pivots())
        free = [j for j in range(m) if j not in piv]
        if free:
            coker[k] = [Y.basis[k][j] for j in free]
    classes: dict = {}
    for k, labels in kernel.items():
        classes.setdefault(k, []).extend(FiberClass(k, l, "kernel") for l in labels)
    for k, labels in coker.items():
        fk = tuple(a + b for a, b in zip(k, shift))
        classes.setdefault(fk, []).extend(FiberClass(fk, _boundary_label(l), "cokernel") for l in labels)
    return FiberResult(classes, kernel, coker, tuple(shift))

"""Ext charts, resolution audits and h_i multiplications."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..gf2 import F2Matrix, kernel_basis, rank, solve
from .milnor import SteenrodAlgebra
from .modules import trivial_module
from .resolution import Resolution, WindowError, minimal_resolution


@dataclass
class ExtChart:
    """dim Ext^{s,t} at chart coordinates (t - s, s), inside the certified window."""

    dims: dict
    s_max: int
    t_max: int
    labels: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)

    def certified(self, stem: int, s: int) -> bool:
        return 0 <= s <= self.s_max - 1 and stem + s <= self.t_max - 1

    def dim(self, stem: int, s: int) -> int:
        if not self.certified(stem, s):
            raise WindowError(f"({stem},{s}) is outside the certified window")
        return self.dims.get((stem, s), 0)

    def stem_total(self, stem: int) -> int:
        if not self.certified(stem, self.s_max - 1):
            raise WindowError(f"stem {stem} is not certified in every filtration up to {self.s_max - 1}")
        return sum(self.dims.get((stem, s), 0) for s in range(self.s_max))


def ext_chart(res: Resolution, products: bool = False) -> ExtChart:
    dims, labels = {}, {}
    for s in range(0, res.s_max):
        for g in res.gens[s]:
            if g.degree <= res.t_max - 1:
                key = (g.degree - s, s)
                dims[key] = dims.get(key, 0) + 1
                labels.setdefault(key, []).append(f"x{s}_{g.index}")
    chart = ExtChart(dims, res.s_max, res.t_max, labels)
    if products:
        for i in (0, 1, 2):
            if (1 << i,) not in res.algebra.basis(1 << i):
                continue  # h2 over A(1)
            chart.lines[f"h{i}"] = product_action(res, i).entries
    return chart


# audits ----------------------------------------------------------------

def d_squared_violations(res: Resolution) -> list[tuple[int, int]]:
    """(s, t) where d_{s-1}∘d_s ≠ 0; the empty list certifies d∘d = 0."""
    bad = []
    for t in range(res.module.bottom, res.t_max + 1):
        for s in range(1, res.s_max + 1):
            a = res.boundary_matrix(s, t)
            b = res.boundary_matrix(s - 1, t)
            if a.size and b.size and ((a.astype(np.int64) @ b) & 1).any():
                bad.append((s, t))
    return bad


def minimality_violations(res: Resolution) -> list[tuple[int, int]]:
    """Generators whose boundary has a unit coefficient on a generator of the same degree."""
    bad = []
    for s in range(1, res.s_max + 1):
        for g in res.gens[s]:
            for k, st, n in res.offsets(s - 1, g.degree):
                if res.gens[s - 1][k].degree == g.degree and g.boundary[st:st + n].any():
                    bad.append((s, g.index))
    return bad


def exactness_violations(res: Resolution) -> list[tuple[int, int]]:
    """(s, t) in the certified window where ker d_s ≠ im d_{s+1} by rank count."""
    bad = []
    for t in range(res.module.bottom, res.t_max):
        ranks = [rank(F2Matrix.from_dense(res.boundary_matrix(s, t))) for s in range(res.s_max + 1)]
        if ranks[0] != res.module.dim(t):
            bad.append((-1, t))
        for s in range(0, res.s_max):
            if res.free_dim(s, t) - ranks[s] != ranks[s + 1]:
                bad.append((s, t))
    return bad


# products --------------------------------------------------------------

@dataclass
class ProductAction:
    """Multiplication by h_i: entries[(s, t)] is a matrix Ext^{s,t} → Ext^{s+1,t+2^i}."""

    i: int
    entries: dict
    uncovered: list


def _gen_pos(res, s, t):
    return {g.index: n for n, g in enumerate(res.generators(s, t))}


def product_action(res: Resolution, i: int) -> ProductAction:
    """h_i action read off the minimal resolution: the coefficient of Sq(2^i)·g_x in d(y)."""
    alg = res.algebra
    deg = 1 << i
    sq = (deg,)
    if sq not in alg.basis(deg):
        raise ValueError(f"Sq({deg}) is not in {alg.name}")
    col = alg.index(deg, sq)
    entries, uncovered = {}, []
    for s in range(0, res.s_max):
        for t in sorted({g.degree for g in res.gens[s]}):
            if not res.certified(s, t):
                continue
            if not res.certified(s + 1, t + deg):
                uncovered.append((s, t))
                continue
            xs = res.generators(s, t)
            ys = res.generators(s + 1, t + deg)
            m = np.zeros((len(xs), len(ys)), dtype=np.uint8)
            offs = {k: st for k, st, n in res.offsets(s, t + deg)}
            for b, y in enumerate(ys):
                for a, x in enumerate(xs):
                    m[a, b] = y.boundary[offs[x.index] + col]
            entries[(s, t)] = m
    return ProductAction(i, entries, uncovered)


def product_action_by_lifting(res: Resolution, i: int, sphere: Optional[Resolution] = None,
                              seed: Optional[int] = None) -> ProductAction:
    """h_i action via a chain-map lift of each cocycle into the resolution of F₂.

    The lift of φ_0 through d_1 of the F₂ resolution is computed by solving
    a linear system; with ``seed`` a random kernel element is added, so two
    seeds give two independent lifts whose products must agree.
    """
    alg = res.algebra
    deg = 1 << i
    if sphere is None:
        sphere = minimal_resolution(trivial_module(alg), 2, deg + 1)
    h = [g for g in sphere.generators(1, deg)]
    target = None
    for g in h:
        v = g.boundary
        if v[alg.index(deg, (deg,))] if (deg,) in alg.basis(deg) else False:
            target = g
    if target is None:
        raise ValueError(f"no h_{i} generator found")
    rng = np.random.default_rng(seed) if seed is not None else None
    entries, uncovered = {}, []
    for s in range(0, res.s_max):
        for t in sorted({g.degree for g in res.gens[s]}):
            if not res.certified(s, t):
                continue
            if not res.certified(s + 1, t + deg):
                uncovered.append((s, t))
                continue
            xs = res.generators(s, t)
            ys = res.generators(s + 1, t + deg)
            # d_1 of the sphere resolution in internal degree deg, as F_1(deg) → A_deg
            d1 = sphere.boundary_matrix(1, deg)
            d1m = F2Matrix.from_dense(d1.T.copy())
            kern = kernel_basis(d1m).to_dense() if rng is not None else None
            offs1 = {k: st for k, st, n in sphere.offsets(1, deg)}
            tpos = offs1[target.index]
            offs = {k: st for k, st, n in res.offsets(s, t + deg)}
            m = np.zeros((len(xs), len(ys)), dtype=np.uint8)
            for a, x in enumerate(xs):
                for b, y in enumerate(ys):
                    # φ_0(d y) = component of d y on g_x, an element of A_deg
                    comp = y.boundary[offs[x.index]:offs[x.index] + alg.dim(deg)]
                    lift = solve(d1m, comp)
                    if lift is None:
                        raise AssertionError("cocycle lift failed: φ_0∘d is not a boundary")
                    if kern is not None and kern.shape[0]:
                        mix = rng.integers(0, 2, size=kern.shape[0])
                        lift = (lift + (mix @ kern)) & 1
                    m[a, b] = lift[tpos]
            entries[(s, t)] = m
    return ProductAction(i, entries, uncovered)

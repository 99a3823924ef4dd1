"""Minimal free resolutions over connected graded algebras, degree by degree.

Internal degree ``t`` is the outer loop and homological degree ``s`` the inner
one.  At each ``(s, t)`` the kernel of ``d_{s-1}`` in degree ``t`` is compared
with the image of the stage-``s`` generators already placed; new generators
are the kernel vectors (in reduced echelon order) that fall outside that image.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..gf2 import F2Matrix, Subspace, WORD, eliminate
from .milnor import ConnectedAlgebra
from .modules import FiniteModule


class WindowError(ValueError):
    pass


@dataclass
class Generator:
    stage: int
    index: int
    degree: int
    boundary: np.ndarray  # dense vector in F_{s-1}(degree), or in M_degree for s = 0


@dataclass
class Resolution:
    algebra: ConnectedAlgebra
    module: FiniteModule
    s_max: int
    t_max: int
    gens: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    _mats: dict = field(default_factory=dict, repr=False)
    _offsets: dict = field(default_factory=dict, repr=False)

    # free-module bookkeeping ---------------------------------------------
    def offsets(self, s: int, t: int) -> list[tuple[int, int, int]]:
        """(generator index, start, length) for the basis of F_s in degree t."""
        key = (s, t)
        o = self._offsets.get(key)
        if o is None:
            o, start = [], 0
            for g in self.gens[s]:
                if g.degree > t:
                    break
                n = self.algebra.dim(t - g.degree)
                if n:
                    o.append((g.index, start, n))
                start += n
            self._offsets_total = start
            self._offsets[key] = o
        return o

    def free_dim(self, s: int, t: int) -> int:
        if s < 0:
            return self.module.dim(t)
        return sum(n for _, _, n in self.offsets(s, t))

    def _block(self, s: int, g: Generator, t: int) -> list[tuple[int, np.ndarray]]:
        """Image of A_{t-|g|}·g as (column start in F_{s-1}(t), dense block)."""
        i = t - g.degree
        alg = self.algebra
        out = []
        if s == 0:
            v = g.boundary.astype(bool)
            if not v.any():
                return out
            act = self.module.act_tensor(i, g.degree)
            out.append((self._module_start(t), act[:, v, :].sum(axis=1) & 1))
            return out
        src = {k: (st, n) for k, st, n in self.offsets(s - 1, g.degree)}
        for k, st, n in self.offsets(s - 1, t):
            if k not in src:
                continue
            st0, n0 = src[k]
            c = g.boundary[st0:st0 + n0].astype(bool)
            if not c.any():
                continue
            j = g.degree - self.gens[s - 1][k].degree
            tens = alg.tensor(i, j)
            out.append((st, tens[:, c, :].sum(axis=1, dtype=np.uint8) & 1))
        return out

    def _module_start(self, t):
        return 0

    def boundary_matrix(self, s: int, t: int, upto: Optional[int] = None) -> np.ndarray:
        """Dense matrix of d_s: F_s(t) → F_{s-1}(t) (or M_t for s = 0).

        ``upto`` restricts to generators of degree < upto (the part known
        before new generators in degree t are chosen).
        """
        rows = []
        ncols = self.free_dim(s - 1, t) if s > 0 else self.module.dim(t)
        gens = {g.index: g for g in self.gens[s]}
        for k, st, n in self.offsets(s, t):
            g = gens[k]
            if upto is not None and g.degree >= upto:
                continue
            blk = np.zeros((n, ncols), dtype=np.uint8)
            for cst, b in self._block(s, g, t):
                blk[:, cst:cst + b.shape[1]] ^= b
            rows.append(blk)
        if not rows:
            return np.zeros((0, ncols), dtype=np.uint8)
        return np.concatenate(rows)

    # Ext ---------------------------------------------------------------
    def certified(self, s: int, t: int) -> bool:
        return 0 <= s <= self.s_max - 1 and t <= self.t_max - 1

    def ext_dim(self, s: int, t: int) -> int:
        if not self.certified(s, t):
            raise WindowError(f"Ext^({s},{t}) is outside the certified window")
        return sum(1 for g in self.gens[s] if g.degree == t)

    def generators(self, s: int, t: Optional[int] = None) -> list[Generator]:
        return [g for g in self.gens[s] if t is None or g.degree == t]


def _to_int(v: np.ndarray) -> int:
    return int.from_bytes(np.packbits(v, bitorder="little").tobytes(), "little")


def _pack(dense: np.ndarray) -> np.ndarray:
    return F2Matrix.from_dense(dense).words


def minimal_resolution(module: FiniteModule, s_max: int, t_max: int,
                       log: Optional[callable] = None) -> Resolution:
    """Resolve ``module`` to homological degree ``s_max`` and internal degree ``t_max``."""
    alg = module.algebra
    res = Resolution(alg, module, s_max, t_max, gens=[[] for _ in range(s_max + 1)])
    # left kernel of the full d_{s-1}(t), as dense rows in F_{s-1}(t)
    kernels: dict[tuple[int, int], np.ndarray] = {}
    t0 = time.perf_counter()
    for t in range(module.bottom, t_max + 1):
        for s in range(0, s_max + 1):
            if s == 0:
                nk = module.dim(t)
                kern = np.eye(nk, dtype=np.uint8)
            else:
                kern = kernels.pop((s - 1, t), None)
                if kern is None:
                    kern = np.zeros((0, res.free_dim(s - 1, t)), dtype=np.uint8)
            old = res.boundary_matrix(s, t, upto=t)
            ncols = old.shape[1]
            nrows = old.shape[0]
            # one tracked elimination gives both the image echelon and the left kernel
            w = _pack(old) if nrows else np.zeros((0, (ncols + WORD - 1) // WORD), np.uint64)
            track = F2Matrix.identity(nrows).words if nrows else None
            piv = eliminate(w, ncols, track) if nrows else []
            rk = len(piv)
            new = []
            if kern.shape[0] > rk:
                span = Subspace(ncols, (_to_int(r) for r in F2Matrix(rk, ncols, w[:rk]).to_dense()))
                for v in kern:
                    if span.add(_to_int(v)):
                        new.append(v.copy())
                        if span.dim == kern.shape[0]:
                            break
            elif kern.shape[0] < rk:
                raise AssertionError(f"image exceeds kernel at (s,t)=({s},{t})")
            for v in new:
                res.gens[s].append(Generator(s, len(res.gens[s]), t, v))
            res._offsets.pop((s, t), None)
            if s < s_max:
                nsrc = res.free_dim(s, t)
                if nrows:
                    lk_words = track[rk:]
                    lk = F2Matrix(nrows - rk, nrows, lk_words.copy()).to_dense()
                else:
                    lk = np.zeros((0, 0), dtype=np.uint8)
                full = np.zeros((lk.shape[0], nsrc), dtype=np.uint8)
                full[:, :lk.shape[1]] = lk
                kernels[(s, t)] = full
        if log:
            log(t, time.perf_counter() - t0)
    res.timings["total"] = time.perf_counter() - t0
    return res

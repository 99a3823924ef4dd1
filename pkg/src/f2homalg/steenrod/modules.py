"""Finite-dimensional graded modules over connected algebras.

A module stores its basis degrees and, for each algebra degree ``i`` and
module degree ``d``, an action tensor ``act[a, m, n]``: basis element ``a``
of the algebra in degree ``i`` sends basis element ``m`` of degree ``d`` to
the sum of the ``n`` in degree ``d + i`` with a one.
"""

from __future__ import annotations

from itertools import product
from typing import Callable, Optional, Sequence

import numpy as np

from ..gf2 import F2Matrix, left_kernel, solve
from .milnor import ConnectedAlgebra, SteenrodAlgebra, a1_algebra, milnor_product, milnor_degree


class ModuleError(ValueError):
    pass


class FiniteModule:
    def __init__(self, algebra: ConnectedAlgebra, names: Sequence[str], degrees: Sequence[int],
                 action: Callable, name: str = "M"):
        """``action(x, k)`` returns the basis indices of ``x · b_k`` for algebra basis element x."""
        if len(names) != len(degrees):
            raise ModuleError("names and degrees differ in length")
        self.algebra = algebra
        self.name = name
        self.names = list(names)
        self.degrees = list(degrees)
        self._action = action
        self._by_degree: dict[int, list[int]] = {}
        for k, d in enumerate(self.degrees):
            self._by_degree.setdefault(d, []).append(k)
        self._tensors: dict[tuple[int, int], np.ndarray] = {}

    @property
    def top(self) -> int:
        return max(self.degrees) if self.degrees else 0

    @property
    def bottom(self) -> int:
        return min(self.degrees) if self.degrees else 0

    def indices(self, d: int) -> list[int]:
        return self._by_degree.get(d, [])

    def dim(self, d: int) -> int:
        return len(self.indices(d))

    def total_dim(self) -> int:
        return len(self.degrees)

    def act_tensor(self, i: int, d: int) -> np.ndarray:
        key = (i, d)
        t = self._tensors.get(key)
        if t is None:
            src, dst = self.indices(d), self.indices(d + i)
            pos = {k: n for n, k in enumerate(dst)}
            basis = self.algebra.basis(i)
            t = np.zeros((len(basis), len(src), len(dst)), dtype=np.uint8)
            for a, x in enumerate(basis):
                for m, k in enumerate(src):
                    for n in self._action(x, k):
                        if n not in pos:
                            raise ModuleError(f"action of {x} on {self.names[k]} leaves degree {d + i}")
                        t[a, m, pos[n]] ^= 1
            self._tensors[key] = t
        return t

    def check_associativity(self, max_degree: Optional[int] = None) -> bool:
        """x·(y·m) = (xy)·m on all basis triples within the module's degree span."""
        alg = self.algebra
        span = self.top - self.bottom if max_degree is None else max_degree
        for d in sorted(self._by_degree):
            for i in range(0, span + 1):
                for j in range(0, span + 1 - i):
                    if d + i + j > self.top:
                        continue
                    inner = self.act_tensor(j, d)             # (y, m, ·)
                    outer = self.act_tensor(i, d + j)         # (x, ·, n)
                    lhs = np.einsum("ymk,xkn->xymn", inner.astype(np.int64), outer) & 1
                    prod = alg.tensor(i, j)                   # (x, y, z)
                    direct = self.act_tensor(i + j, d)        # (z, m, n)
                    rhs = np.einsum("xyz,zmn->xymn", prod.astype(np.int64), direct) & 1
                    if not np.array_equal(lhs, rhs):
                        return False
        return True


def trivial_module(algebra: ConnectedAlgebra, degree: int = 0) -> FiniteModule:
    """F₂ concentrated in one degree."""
    unit = algebra.unit()
    return FiniteModule(algebra, ["1"], [degree],
                        lambda x, k: [0] if x == unit else [], name="F2")


def c2_module(algebra: SteenrodAlgebra) -> FiniteModule:
    """Cohomology of the mod-2 Moore spectrum: x0, x1 with Sq1 x0 = x1."""
    def act(x, k):
        if x == ():
            return [k]
        if x == (1,) and k == 0:
            return [1]
        return []
    return FiniteModule(algebra, ["x0", "x1"], [0, 1], act, name="C2")


def _word_expansions(gens: Sequence[tuple], top: int):
    """Words in the given Milnor generators up to degree ``top`` with their Milnor expansions."""
    words = {0: [((), frozenset([()]))]}
    for n in range(1, top + 1):
        words[n] = []
        for g in gens:
            dg = milnor_degree(g)
            if dg > n:
                continue
            for w, exp in words[n - dg]:
                acc: set = set()
                for r in exp:
                    acc ^= set(milnor_product(g, r))
                words[n].append(((g,) + w, frozenset(acc)))
    return words


def module_from_generator_action(algebra: SteenrodAlgebra, names, degrees, gen_action: dict,
                                 name: str = "M") -> FiniteModule:
    """Extend an action of Sq1, Sq2, Sq4, ... to every Milnor basis element.

    ``gen_action[g][k]`` lists the basis indices of ``Sq(g) · b_k``.  Each
    Milnor basis element in degrees up to the module's span is written as a
    sum of words in the generators; every linear relation among words must act
    by zero, otherwise the data do not define a module and ModuleError is raised.
    """
    nb = len(names)
    span = max(degrees) - min(degrees) if degrees else 0
    gens = sorted(gen_action, key=milnor_degree)
    words = _word_expansions(gens, span)

    def word_matrix(w):
        m = np.eye(nb, dtype=np.int64)
        for g in reversed(w):
            step = np.zeros((nb, nb), dtype=np.int64)
            for k in range(nb):
                for n in gen_action[g].get(k, []):
                    step[n, k] ^= 1
            m = (step @ m) & 1
        return m

    table: dict = {(): np.eye(nb, dtype=np.int64)}
    for n in range(1, span + 1):
        basis = algebra.basis(n)
        idx = {r: c for c, r in enumerate(basis)}
        ws = words[n]
        if not basis:
            for w, _ in ws:
                if word_matrix(w).any():
                    raise ModuleError(f"word {w} acts nontrivially in empty degree {n}")
            continue
        w_rows = np.zeros((len(ws), len(basis)), dtype=np.uint8)
        for r, (_, exp) in enumerate(ws):
            for x in exp:
                w_rows[r, idx[x]] ^= 1
        mats = [word_matrix(w) for w, _ in ws]
        wm = F2Matrix.from_dense(w_rows)
        for rel in left_kernel(wm).to_dense():
            acc = np.zeros((nb, nb), dtype=np.int64)
            for r in np.flatnonzero(rel):
                acc ^= mats[r]
            if acc.any():
                raise ModuleError(f"relation among words of degree {n} acts nontrivially")
        wt = F2Matrix.from_dense(w_rows.T.copy())
        for c, x in enumerate(basis):
            e = np.zeros(len(basis), dtype=np.uint8)
            e[c] = 1
            coef = solve(wt, e)
            if coef is None:
                raise ModuleError(f"{x} is not reached by words in the generators")
            acc = np.zeros((nb, nb), dtype=np.int64)
            for r in np.flatnonzero(coef):
                acc ^= mats[r]
            table[x] = acc

    def act(x, k):
        m = table.get(x)
        if m is None:
            return []
        return list(np.flatnonzero(m[:, k]))

    return FiniteModule(algebra, names, degrees, act, name=name)


A1_BASIS = [(), (1,), (2,), (3,), (0, 1), (1, 1), (2, 1), (3, 1)]


def _a1_names():
    return ["x0" if not r else "Sq" + str(r).replace(" ", "") + "x0" for r in A1_BASIS]


def a1_free_module(algebra: SteenrodAlgebra) -> FiniteModule:
    """A(1) as a module over a subalgebra of itself: the free rank-one module."""
    deg = [milnor_degree(r) for r in A1_BASIS]
    pos = {r: k for k, r in enumerate(A1_BASIS)}

    def act(x, k):
        return [pos[z] for z in milnor_product(tuple(x), A1_BASIS[k])]

    return FiniteModule(algebra, _a1_names(), deg, act, name="A(1)")


def a1_ij_module(i: int, j: int, algebra: Optional[SteenrodAlgebra] = None) -> FiniteModule:
    """H*(A(1)[ij]) over the full Steenrod algebra.

    Sq1 and Sq2 act as on A(1) itself; Sq4 sends x0 to i·Sq(1,1)x0 and
    Sq(2)x0 to j·Sq(3,1)x0.  The one remaining Sq4 entry (degree 1 to 5) is
    forced by the Adem relations and is found by testing both values.
    """
    if i not in (0, 1) or j not in (0, 1):
        raise ModuleError("i and j must be 0 or 1")
    algebra = algebra or SteenrodAlgebra()
    deg = [milnor_degree(r) for r in A1_BASIS]
    pos = {r: k for k, r in enumerate(A1_BASIS)}

    def left(g):
        return {k: [pos[z] for z in milnor_product(g, A1_BASIS[k])] for k in range(8)}

    found = []
    for u in (0, 1):
        sq4 = {k: [] for k in range(8)}
        if i:
            sq4[0] = [pos[(1, 1)]]
        if j:
            sq4[pos[(2,)]] = [pos[(3, 1)]]
        if u:
            sq4[pos[(1,)]] = [pos[(2, 1)]]
        try:
            m = module_from_generator_action(algebra, _a1_names(), deg,
                                             {(1,): left((1,)), (2,): left((2,)), (4,): sq4},
                                             name=f"A(1)[{i}{j}]")
        except ModuleError:
            continue
        found.append(m)
    if len(found) != 1:
        raise ModuleError(f"Sq4 action on A(1)[{i}{j}] is not uniquely determined ({len(found)} options)")
    return found[0]

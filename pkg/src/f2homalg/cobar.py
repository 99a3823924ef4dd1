"""Normalized cobar complexes over the dual Steenrod algebra and its quotients.

The dual A^∨ = F₂[ξ₁, ξ₂, ...] has the monomial basis ξ^R dual to the Milnor
basis Sq(R), with ψ(ξ_k) = Σ ξ_{k-i}^{2^i} ⊗ ξ_i.  A quotient by a profile
(for instance A(1)^∨ = F₂[ξ₁, ξ₂]/(ξ₁⁴, ξ₂²)) inherits the coproduct.

For a left comodule M the coboundary is

    d [a₁|…|a_q] m = Σ_i [a₁|…|ψ̄(a_i)|…|a_q] m + [a₁|…|a_q|ν̄(m)],

with reduced coproduct ψ̄ and reduced coaction ν̄ (characteristic two, no signs).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .gf2 import F2Matrix, eliminate, rank, solve
from .steenrod.milnor import Profile, _milnor_basis_all, _strip, milnor_degree
from .steenrod.modules import FiniteModule


class CapError(ValueError):
    pass


def _xi_name(r) -> str:
    parts = []
    for k, e in enumerate(r):
        if e == 1:
            parts.append(f"xi{k + 1}")
        elif e:
            parts.append(f"xi{k + 1}^{e}")
    return "*".join(parts) if parts else "1"


_XI = re.compile(r"^xi(\d+)(?:\^(\d+))?$")


def parse_xi(text: str) -> tuple:
    text = text.strip()
    if text == "1":
        return ()
    exps: dict[int, int] = {}
    for f in text.split("*"):
        m = _XI.match(f.strip())
        if not m:
            raise ValueError(f"not a monomial in the xi: {text!r}")
        k = int(m.group(1))
        exps[k] = exps.get(k, 0) + int(m.group(2) or 1)
    top = max(exps) if exps else 0
    return _strip([exps.get(k, 0) for k in range(1, top + 1)])


class DualSteenrod:
    """A^∨ or a profile quotient, as a graded coalgebra in the ξ-monomial basis."""

    def __init__(self, profile: Optional[Profile] = None, cap: int = 32, name: Optional[str] = None):
        self.profile = profile or Profile()
        self.cap = cap
        self.name = name or ("A^v" if self.profile.heights is None else "A(profile)^v")
        self._bases: dict[int, list] = {}

    def basis(self, n: int) -> list:
        if n > self.cap:
            raise CapError(f"degree {n} exceeds the coalgebra cap {self.cap}")
        if n < 0:
            return []
        b = self._bases.get(n)
        if b is None:
            b = [r for r in _milnor_basis_all(n) if self.profile.admits(r)]
            self._bases[n] = b
        return b

    def degree(self, r) -> int:
        return milnor_degree(r)

    def admits(self, r) -> bool:
        return self.profile.admits(_strip(r))

    @staticmethod
    def _mono_mul(a, b):
        n = max(len(a), len(b))
        return _strip([(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)])

    def coproduct(self, r) -> frozenset:
        """ψ(ξ^R) as a set of pairs (left monomial, right monomial)."""
        return self._coproduct(_strip(r))

    @lru_cache(maxsize=None)
    def _coproduct(self, r) -> frozenset:
        if self.degree(r) > self.cap:
            raise CapError(f"degree {self.degree(r)} exceeds the coalgebra cap {self.cap}")
        if not r:
            return frozenset([((), ())])
        k = next(i for i, e in enumerate(r) if e)
        rest = list(r)
        rest[k] -= 1
        rest = _strip(rest)
        gen = set()
        # ψ(ξ_{k+1}) = Σ_{i=0}^{k+1} ξ_{k+1-i}^{2^i} ⊗ ξ_i
        kk = k + 1
        for i in range(kk + 1):
            left = [0] * kk
            if kk - i:
                left[kk - i - 1] = 1 << i
            right = [0] * kk
            if i:
                right[i - 1] = 1
            gen.add((_strip(left), _strip(right)))
        out: set = set()
        for (a, b) in gen:
            for (c, d) in self._coproduct(rest):
                x, y = self._mono_mul(a, c), self._mono_mul(b, d)
                if self.admits(x) and self.admits(y):
                    out ^= {(x, y)}
        return frozenset(out)

    def reduced_coproduct(self, r) -> list:
        return sorted((x, y) for x, y in self.coproduct(r) if x and y)


class Comodule:
    """Finite left comodule: basis names and degrees with a reduced coaction."""

    def __init__(self, coalgebra: DualSteenrod, names: Sequence[str], degrees: Sequence[int],
                 coaction: dict, name: str = "M"):
        """``coaction[k]`` lists pairs (ξ monomial of positive degree, basis index) in ν̄(b_k)."""
        self.coalgebra = coalgebra
        self.names = list(names)
        self.degrees = list(degrees)
        self.coaction = {k: sorted(v) for k, v in coaction.items()}
        self.name = name
        self.index = {n: k for k, n in enumerate(self.names)}

    def reduced_coaction(self, k: int) -> list:
        return self.coaction.get(k, [])

    def by_degree(self, d: int) -> list[int]:
        return [k for k, e in enumerate(self.degrees) if e == d]


def trivial_comodule(coalgebra: DualSteenrod) -> Comodule:
    return Comodule(coalgebra, ["1"], [0], {}, name="F2")


def comodule_from_module(module: FiniteModule, coalgebra: DualSteenrod,
                         names: Optional[Sequence[str]] = None) -> Comodule:
    """Dual comodule of a finite module: ⟨ν(m), ξ^R ⊗ n⟩ = ⟨m, Sq(R)·n⟩."""
    alg = module.algebra
    coaction: dict[int, list] = {}
    for k, d in enumerate(module.degrees):
        terms = []
        for i in range(1, d - module.bottom + 1):
            src = module.indices(d - i)
            if not src:
                continue
            t = module.act_tensor(i, d - i)
            dst = module.indices(d)
            col = dst.index(k)
            for a, r in enumerate(alg.basis(i)):
                for pos, n in enumerate(src):
                    if t[a, pos, col]:
                        terms.append((tuple(r), n))
        coaction[k] = terms
    return Comodule(coalgebra, list(names or module.names), module.degrees, coaction,
                    name=module.name + "_*")


def a1_dual_names() -> list[str]:
    """Names ξ^R for the basis dual to Sq(R)·x0 of A(1)."""
    from .steenrod.modules import A1_BASIS

    return [_xi_name(r) for r in A1_BASIS]


class CobarComplex:
    """Cochains [a₁|…|a_q]m of internal degree t with a_i of positive degree."""

    def __init__(self, coalgebra: DualSteenrod, comodule: Comodule, cap: Optional[int] = None):
        self.coalgebra = coalgebra
        self.comodule = comodule
        self.cap = coalgebra.cap if cap is None else cap
        self._bases: dict[tuple[int, int], list] = {}
        self._index: dict[tuple[int, int], dict] = {}
        self._mats: dict[tuple[int, int], F2Matrix] = {}

    def _check(self, t):
        if t > self.cap:
            raise CapError(f"internal degree {t} exceeds the cochain cap {self.cap}")

    def basis(self, q: int, t: int) -> list:
        self._check(t)
        key = (q, t)
        b = self._bases.get(key)
        if b is None:
            b = []
            for k, dm in enumerate(self.comodule.degrees):
                for bars in self._bars(q, t - dm):
                    b.append((bars, k))
            self._bases[key] = b
            self._index[key] = {c: i for i, c in enumerate(b)}
        return b

    def _bars(self, q, t):
        if q == 0:
            return [()] if t == 0 else []
        out = []
        for n in range(1, t - (q - 1) + 1):
            for a in self.coalgebra.basis(n):
                for rest in self._bars(q - 1, t - n):
                    out.append((a,) + rest)
        return out

    def index(self, q, t, cochain) -> int:
        self.basis(q, t)
        return self._index[(q, t)][cochain]

    def coboundary_terms(self, cochain) -> set:
        bars, k = cochain
        out: set = set()
        for i, a in enumerate(bars):
            for x, y in self.coalgebra.reduced_coproduct(a):
                out ^= {(bars[:i] + (x, y) + bars[i + 1:], k)}
        for a, n in self.comodule.reduced_coaction(k):
            out ^= {(bars + (a,), n)}
        return out

    def coboundary(self, q: int, t: int) -> F2Matrix:
        """Matrix of d: C^{q,t} → C^{q+1,t}, rows indexed by the source basis."""
        key = (q, t)
        m = self._mats.get(key)
        if m is None:
            src = self.basis(q, t)
            self.basis(q + 1, t)
            idx = self._index[(q + 1, t)]
            r_idx, c_idx = [], []
            for r, c in enumerate(src):
                for term in self.coboundary_terms(c):
                    r_idx.append(r)
                    c_idx.append(idx[term])
            m = F2Matrix.from_entries(len(src), len(idx), np.array(r_idx, dtype=np.int64),
                                      np.array(c_idx, dtype=np.int64))
            self._mats[key] = m
        return m

    def vector(self, q: int, t: int, cochains: Iterable) -> np.ndarray:
        v = np.zeros(len(self.basis(q, t)), dtype=np.uint8)
        for c in cochains:
            v[self.index(q, t, c)] ^= 1
        return v

    def apply(self, q: int, t: int, v: np.ndarray) -> np.ndarray:
        d = self.coboundary(q, t).to_dense().astype(np.int64)
        return (v.astype(np.int64) @ d) & 1

    def is_cocycle(self, q, t, v) -> bool:
        return not self.apply(q, t, v).any()

    def is_coboundary(self, q, t, v) -> bool:
        if q == 0:
            return not v.any()
        d = self.coboundary(q - 1, t)
        if d.rows == 0:
            return not v.any()
        return solve(d.transpose(), v) is not None

    def cohomology_dim(self, q: int, t: int) -> int:
        n = len(self.basis(q, t))
        out_rank = rank(self.coboundary(q, t)) if n else 0
        in_rank = rank(self.coboundary(q - 1, t)) if q > 0 and len(self.basis(q - 1, t)) else 0
        return n - out_rank - in_rank

    def d_squared_zero(self, q: int, t: int) -> bool:
        a = self.coboundary(q, t).to_dense().astype(np.int64)
        b = self.coboundary(q + 1, t).to_dense().astype(np.int64)
        return not ((a @ b) & 1).any()

    def parse(self, text: str) -> tuple[int, int, np.ndarray]:
        """Parse ``[xi1^4]1 + [xi2^2]xi1^2`` into (q, t, vector)."""
        terms = []
        for part in text.split("+"):
            part = part.strip()
            m = re.match(r"^\[(.*)\](.*)$", part)
            if not m:
                raise ValueError(f"not a cochain term: {part!r}")
            inner = m.group(1).strip()
            bars = tuple(parse_xi(x) for x in inner.split("|")) if inner else ()
            coef = m.group(2).strip() or "1"
            name = _xi_name(parse_xi(coef)) if coef.startswith("xi") or coef == "1" else coef
            if name not in self.comodule.index:
                raise ValueError(f"unknown comodule element {coef!r}")
            terms.append((bars, self.comodule.index[name]))
        q = len(terms[0][0])
        t = sum(self.coalgebra.degree(a) for a in terms[0][0]) + self.comodule.degrees[terms[0][1]]
        for bars, k in terms:
            tt = sum(self.coalgebra.degree(a) for a in bars) + self.comodule.degrees[k]
            if len(bars) != q or tt != t:
                raise ValueError(f"inhomogeneous cochain {text!r}")
        return q, t, self.vector(q, t, terms)


def cobar_ext_dims(coalgebra: DualSteenrod, comodule: Comodule, q_max: int, t_max: int) -> dict:
    """dim H^{q,t} keyed by (stem t - q, q) for q ≤ q_max and t ≤ t_max."""
    cx = CobarComplex(coalgebra, comodule, cap=t_max)
    out = {}
    for t in range(0, t_max + 1):
        for q in range(0, q_max + 1):
            d = cx.cohomology_dim(q, t)
            if d:
                out[(t - q, q)] = d
    return out


DETECTION_COCYCLES = (
    ("nu", (3, 1), "[xi1^4]1"),
    ("w", (5, 1), "[xi2^2]1 + [xi1^4]xi1^2"),
    ("v2", (6, 1), "[xi3]1 + [xi2^2]xi1 + [xi1^4]xi2"),
)


@dataclass
class DetectionReport:
    name: str
    bidegree: tuple
    cochain: str
    cocycle: bool
    coboundary: bool

    @property
    def ok(self) -> bool:
        return self.cocycle and not self.coboundary


def verify_detection_classes(i: int = 0, j: int = 0, cap: int = 12,
                             extra: Sequence[tuple] = ()) -> list[DetectionReport]:
    """Check the three detection cochains over A^∨ with coefficients in H_*(A(1)[ij])."""
    from .steenrod.modules import a1_ij_module

    if cap < 8:
        raise CapError("detection classes need an internal-degree cap of at least 8")
    co = DualSteenrod(cap=cap)
    mod = comodule_from_module(a1_ij_module(i, j), co, names=a1_dual_names())
    cx = CobarComplex(co, mod, cap=cap)
    out = []
    for name, bideg, text in tuple(DETECTION_COCYCLES) + tuple(extra):
        if text.strip() == "0":
            q, t = bideg[1], bideg[0] + bideg[1]
            v = np.zeros(len(cx.basis(q, t)), dtype=np.uint8)
        else:
            q, t, v = cx.parse(text)
            if (t - q, q) != tuple(bideg):
                raise ValueError(f"{text} lies in ({t - q},{q}), not {bideg}")
        out.append(DetectionReport(name, tuple(bideg), text, cx.is_cocycle(q, t, v),
                                   cx.is_coboundary(q, t, v)))
    return out

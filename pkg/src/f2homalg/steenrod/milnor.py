"""Milnor basis of the mod-2 Steenrod algebra and its finite subalgebras.

A basis element ``Sq(r1, r2, ...)`` is a tuple with trailing zeros removed;
its degree is ``sum r_i (2^i - 1)``.  Products use the Milnor matrix formula:
the coefficient of a matrix is a product of multinomials, which is odd exactly
when the entries on each antidiagonal have disjoint binary digits.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

Milnor = tuple
MAXLEN = 8
_BITS = 7


def milnor_degree(r: Sequence[int]) -> int:
    return sum(x * ((1 << (i + 1)) - 1) for i, x in enumerate(r))


def _strip(r):
    r = list(r)
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


@lru_cache(maxsize=None)
def milnor_product(r: Milnor, s: Milnor) -> frozenset:
    """Sq(r)·Sq(s) as a set of Milnor tuples (coefficients mod 2)."""
    if not r:
        return frozenset([s])
    if not s:
        return frozenset([r])
    rows, cols = len(r), len(s)
    ndiag = rows + cols + 1
    out: set = set()
    # m[i][j] for i in 1..rows, j in 1..cols; row/column zero derived
    cap = list(s)
    diag = [0] * ndiag
    mat = [[0] * (cols + 1) for _ in range(rows + 1)]

    def finish():
        d = list(diag)
        for j in range(1, cols + 1):
            x = cap[j - 1]
            if x & d[j]:
                return
            d[j] |= x
        t = [0] * (ndiag - 1)
        for i in range(0, rows + 1):
            for j in range(0, cols + 1):
                if i + j:
                    v = cap[j - 1] if i == 0 else mat[i][j]
                    t[i + j - 1] += v
        out.symmetric_difference_update([_strip(t)])

    def place(i, j, rem):
        if j > cols:
            # m[i][0] takes the remainder of row i
            if rem & diag[i]:
                return
            mat[i][0] = rem
            diag[i] |= rem
            if i == rows:
                finish()
            else:
                place(i + 1, 1, r[i])
            diag[i] &= ~rem
            mat[i][0] = 0
            return
        w = 1 << j
        top = min(rem // w, cap[j - 1])
        dg = i + j
        for x in range(top + 1):
            if x & diag[dg]:
                continue
            mat[i][j] = x
            cap[j - 1] -= x
            diag[dg] |= x
            place(i, j + 1, rem - x * w)
            diag[dg] &= ~x
            cap[j - 1] += x
        mat[i][j] = 0

    place(1, 1, r[0])
    return frozenset(out)


def encode(r: Sequence[int]) -> int:
    """Pack a Milnor tuple into one integer (7 bits per entry) for array lookups."""
    c = 0
    for k, x in enumerate(r):
        c |= x << (_BITS * k)
    return c


def _tensor_kernel(bi, bj, codes, out):
    """Fill out[a, b, :] with the Milnor product of rows bi[a] and bj[b].

    Rows are zero-padded exponent arrays; ``codes`` is the sorted array of
    encoded basis elements of the product degree (basis order = code order is
    not assumed, lookups go through an argsort).
    """
    na, L = bi.shape
    nb = bj.shape[0]
    order = np.argsort(codes)
    sc = codes[order]
    rowrem = np.zeros(L + 1, np.int64)
    colrem = np.zeros(L + 1, np.int64)
    val = np.zeros((L + 1) * (L + 1), np.int64)
    pi = np.zeros((L + 1) * (L + 1), np.int64)
    pj = np.zeros((L + 1) * (L + 1), np.int64)
    diag = np.zeros(2 * L + 2, np.int64)
    tvec = np.zeros(2 * L + 2, np.int64)
    for a in range(na):
        R = 0
        for k in range(L):
            if bi[a, k] != 0:
                R = k + 1
        for b in range(nb):
            C = 0
            for k in range(L):
                if bj[b, k] != 0:
                    C = k + 1
            for i in range(1, R + 1):
                rowrem[i] = bi[a, i - 1]
            for j in range(1, C + 1):
                colrem[j] = bj[b, j - 1]
            P = 0
            for i in range(1, R + 1):
                for j in range(1, C + 1):
                    pi[P] = i
                    pj[P] = j
                    P += 1
            p = 0
            if P > 0:
                val[0] = -1
            while True:
                leaf = False
                if P == 0:
                    leaf = True
                else:
                    i = pi[p]
                    j = pj[p]
                    if val[p] >= 0:
                        rowrem[i] += val[p] << j
                        colrem[j] += val[p]
                    val[p] += 1
                    mx = rowrem[i] >> j
                    if colrem[j] < mx:
                        mx = colrem[j]
                    if val[p] > mx:
                        val[p] = -1
                        p -= 1
                        if p < 0:
                            break
                        continue
                    rowrem[i] -= val[p] << j
                    colrem[j] -= val[p]
                    if p == P - 1:
                        leaf = True
                    else:
                        p += 1
                        val[p] = -1
                if leaf:
                    for n in range(R + C + 1):
                        diag[n] = 0
                        tvec[n] = 0
                    ok = True
                    for i in range(1, R + 1):
                        x = rowrem[i]
                        if x & diag[i]:
                            ok = False
                        diag[i] |= x
                        tvec[i] += x
                    for j in range(1, C + 1):
                        x = colrem[j]
                        if x & diag[j]:
                            ok = False
                        diag[j] |= x
                        tvec[j] += x
                    for q in range(P):
                        x = val[q]
                        n = pi[q] + pj[q]
                        if x & diag[n]:
                            ok = False
                        diag[n] |= x
                        tvec[n] += x
                    if ok:
                        code = 0
                        for n in range(1, R + C + 1):
                            code |= tvec[n] << (7 * (n - 1))
                        pos = np.searchsorted(sc, code)
                        if pos >= sc.shape[0] or sc[pos] != code:
                            raise ValueError("product leaves the basis")
                        out[a, b, order[pos]] ^= 1
                    if P == 0:
                        break


if numba is not None:
    _tensor_kernel_jit = numba.njit(cache=True)(_tensor_kernel)
else:  # pragma: no cover
    _tensor_kernel_jit = _tensor_kernel


def _padded(basis, L=MAXLEN):
    arr = np.zeros((len(basis), L), np.int64)
    for a, r in enumerate(basis):
        arr[a, :len(r)] = r
    return arr


class Profile:
    """Sub-Hopf-algebra selector: ``r_i < 2^{h_i}`` for each i; None means the full algebra."""

    def __init__(self, heights: Optional[Sequence[int]] = None):
        self.heights = None if heights is None else tuple(heights)

    def admits(self, r: Milnor) -> bool:
        if self.heights is None:
            return True
        if len(r) > len(self.heights):
            return any(r[len(self.heights):]) is False and all(
                x < (1 << h) for x, h in zip(r, self.heights))
        return all(x < (1 << h) for x, h in zip(r, self.heights))

    def __repr__(self):
        return "Profile(full)" if self.heights is None else f"Profile{self.heights}"


def _milnor_basis_all(n: int) -> list:
    out = []

    def rec(i, rem, acc):
        # choose r_i for i = current index from the top down
        if i == 0:
            if rem == 0:
                out.append(_strip(acc[::-1]))
            return
        d = (1 << i) - 1
        for x in range(rem // d, -1, -1):
            rec(i - 1, rem - x * d, acc + [x])

    top = 1
    while (1 << (top + 1)) - 1 <= n:
        top += 1
    rec(top, n, [])
    return sorted(set(out))


class ConnectedAlgebra:
    """Connected graded F₂-algebra with a finite basis in each degree.

    Subclasses define ``_basis(n)`` and ``_product(x, y)``.  Multiplication
    tensors ``P[x, y, z]`` (x in degree i, y in degree j, z in degree i+j)
    are cached per degree pair for block assembly in resolutions.
    """

    name = "algebra"

    def __init__(self):
        self._bases: dict[int, list] = {}
        self._index: dict[int, dict] = {}
        self._tensors: dict[tuple[int, int], np.ndarray] = {}

    def basis(self, n: int) -> list:
        if n < 0:
            return []
        b = self._bases.get(n)
        if b is None:
            b = self._basis(n)
            self._bases[n] = b
            self._index[n] = {x: i for i, x in enumerate(b)}
        return b

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def index(self, n: int, x) -> int:
        self.basis(n)
        return self._index[n][x]

    def degree(self, x) -> int:
        raise NotImplementedError

    def unit(self):
        raise NotImplementedError

    def product(self, x, y) -> frozenset:
        return self._product(x, y)

    def tensor(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        t = self._tensors.get(key)
        if t is None:
            bi, bj = self.basis(i), self.basis(j)
            self.basis(i + j)
            idx = self._index[i + j]
            t = np.zeros((len(bi), len(bj), len(self.basis(i + j))), dtype=np.uint8)
            for a, x in enumerate(bi):
                for b, y in enumerate(bj):
                    for z in self._product(x, y):
                        t[a, b, idx[z]] ^= 1
            self._tensors[key] = t
        return t

    def generators_up_to(self, n: int) -> list:
        """Degrees and elements of a minimal algebra generating set (indecomposables)."""
        out = []
        for d in range(1, n + 1):
            dec = np.zeros((0, self.dim(d)), dtype=np.uint8)
            rows = []
            for i in range(1, d):
                t = self.tensor(i, d - i)
                rows.append(t.reshape(-1, self.dim(d)))
            from ..gf2 import F2Matrix, rref

            m = np.concatenate(rows) if rows else dec
            red, piv, rk = rref(F2Matrix.from_dense(m)) if m.size else (None, [], 0)
            pset = set(piv)
            for c, x in enumerate(self.basis(d)):
                if c not in pset:
                    out.append((d, x))
        return out


class SteenrodAlgebra(ConnectedAlgebra):
    """Mod-2 Steenrod algebra (or a profile subalgebra) in the Milnor basis."""

    def __init__(self, profile: Optional[Profile] = None, name: Optional[str] = None):
        super().__init__()
        self.profile = profile or Profile()
        self.name = name or ("A" if self.profile.heights is None else f"A{self.profile.heights}")

    def _basis(self, n):
        return [r for r in _milnor_basis_all(n) if self.profile.admits(r)]

    def degree(self, x) -> int:
        return milnor_degree(x)

    def unit(self):
        return ()

    def _product(self, x, y):
        return milnor_product(tuple(x), tuple(y))

    def tensor(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        t = self._tensors.get(key)
        if t is None:
            bi, bj, bk = self.basis(i), self.basis(j), self.basis(i + j)
            t = np.zeros((len(bi), len(bj), len(bk)), dtype=np.uint8)
            if len(bi) and len(bj) and len(bk):
                codes = np.array([encode(r) for r in bk], dtype=np.int64)
                _tensor_kernel_jit(_padded(bi), _padded(bj), codes, t)
            self._tensors[key] = t
        return t

    def sq(self, n: int) -> Milnor:
        return (n,) if n else ()

    def top_degree(self) -> Optional[int]:
        if self.profile.heights is None:
            return None
        return sum(((1 << h) - 1) * ((1 << (i + 1)) - 1) for i, h in enumerate(self.profile.heights))


def steenrod_algebra() -> SteenrodAlgebra:
    return SteenrodAlgebra()


def a1_algebra() -> SteenrodAlgebra:
    """The subalgebra generated by Sq1 and Sq2: profile r1 < 4, r2 < 2."""
    return SteenrodAlgebra(Profile((2, 1)), name="A(1)")


class ExteriorAlgebra(ConnectedAlgebra):
    """Λ(x) on homogeneous generators of the given degrees."""

    def __init__(self, degrees: Sequence[int]):
        super().__init__()
        self.degrees = tuple(degrees)
        self.name = f"Lambda{self.degrees}"

    def _basis(self, n):
        out = []
        k = len(self.degrees)
        for mask in range(1 << k):
            if sum(self.degrees[i] for i in range(k) if mask >> i & 1) == n:
                out.append(mask)
        return sorted(out)

    def degree(self, x) -> int:
        return sum(self.degrees[i] for i in range(len(self.degrees)) if x >> i & 1)

    def unit(self):
        return 0

    def _product(self, x, y):
        return frozenset() if x & y else frozenset([x | y])

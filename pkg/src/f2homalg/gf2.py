"""Dense bit-packed linear algebra over GF(2).

Rows are stored as little-endian 64-bit words: column ``j`` lives in word
``j // 64`` at bit ``j % 64``.  Padding bits beyond ``cols`` are always zero.

Two layers live here.  :class:`F2Matrix` wraps a numpy ``uint64`` array and is
used for the large boundary matrices of resolutions and cobar complexes.
:class:`Subspace` keeps an echelon basis of Python integers (arbitrary-width
bit rows) and is used for the many tiny per-degree spaces of spectral
sequence pages, where numpy call overhead would dominate.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64
_ONE = np.uint64(1)


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


class F2Matrix:
    """Immutable-by-convention bit-packed matrix."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: Optional[np.ndarray] = None):
        self.rows = int(rows)
        self.cols = int(cols)
        nw = _nwords(self.cols)
        if words is None:
            words = np.zeros((self.rows, nw), dtype=np.uint64)
        else:
            words = np.ascontiguousarray(words, dtype=np.uint64)
            if words.shape != (self.rows, nw):
                raise ValueError(
                    f"storage shape {words.shape} does not match {self.rows}x{self.cols}"
                )
        self.words = words

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        m = cls(n, n)
        for i in range(n):
            m.words[i, i // WORD] |= _ONE << np.uint64(i % WORD)
        return m

    @classmethod
    def from_dense(cls, arr) -> "F2Matrix":
        a = np.asarray(arr, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = a.shape
        nw = _nwords(cols)
        if rows == 0 or cols == 0:
            return cls(rows, cols)
        packed = np.packbits(a, axis=1, bitorder="little")
        pad = nw * 8 - packed.shape[1]
        if pad:
            packed = np.concatenate(
                [packed, np.zeros((rows, pad), dtype=np.uint8)], axis=1
            )
        words = packed.view("<u8").astype(np.uint64).reshape(rows, nw)
        return cls(rows, cols, words)

    @classmethod
    def from_int_rows(cls, rows: Sequence[int], cols: int) -> "F2Matrix":
        nw = _nwords(cols)
        m = cls(len(rows), cols)
        mask = (1 << WORD) - 1
        for i, v in enumerate(rows):
            if v >> cols:
                raise ValueError("row has bits beyond the column count")
            for k in range(nw):
                m.words[i, k] = (v >> (WORD * k)) & mask
        return m

    @classmethod
    def from_entries(cls, rows: int, cols: int, r_idx, c_idx) -> "F2Matrix":
        """Matrix whose entry (r, c) is the parity of occurrences of (r, c)."""
        dense = np.zeros((rows, cols), dtype=np.uint8)
        if len(r_idx):
            np.bitwise_xor.at(dense, (np.asarray(r_idx), np.asarray(c_idx)), 1)
        return cls.from_dense(dense)

    # inspection -------------------------------------------------------
    def to_dense(self) -> np.ndarray:
        if self.rows == 0 or self.cols == 0:
            return np.zeros((self.rows, self.cols), dtype=np.uint8)
        b = self.words.astype("<u8").view(np.uint8).reshape(self.rows, -1)
        return np.unpackbits(b, axis=1, bitorder="little")[:, : self.cols]

    def int_rows(self) -> list[int]:
        out = []
        for i in range(self.rows):
            v = 0
            for k in range(self.words.shape[1] - 1, -1, -1):
                v = (v << WORD) | int(self.words[i, k])
            out.append(v)
        return out

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j // WORD] >> np.uint64(j % WORD)) & _ONE)

    def copy(self) -> "F2Matrix":
        return F2Matrix(self.rows, self.cols, self.words.copy())

    def padding_clean(self) -> bool:
        rem = self.cols % WORD
        if rem == 0 or self.rows == 0:
            return True
        mask = ~((_ONE << np.uint64(rem)) - _ONE)
        return not np.any(self.words[:, -1] & mask)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, F2Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.words, other.words))
        )

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols})"

    # algebra ----------------------------------------------------------
    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in product")
        a = self.to_dense().astype(np.int64)
        b = other.to_dense().astype(np.int64)
        return F2Matrix.from_dense((a @ b) & 1)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Return m·x for a 0/1 vector x of length cols."""
        x = np.asarray(x, dtype=np.int64) & 1
        if x.shape != (self.cols,):
            raise ValueError("dimension mismatch in apply")
        return (self.to_dense().astype(np.int64) @ x) & 1

    def stack(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return F2Matrix(self.rows + other.rows, self.cols,
                        np.vstack([self.words, other.words]))

    def take_rows(self, idx) -> "F2Matrix":
        idx = np.asarray(idx, dtype=np.int64)
        return F2Matrix(len(idx), self.cols, self.words[idx].copy())


try:  # optional compiled kernel; the numpy path below is the reference
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None


def _eliminate_loop(w, ncols, t, use_t):
    nrows, nw = w.shape
    piv = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        wi = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, nrows):
            if w[i, wi] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                tmp = w[r, k]
                w[r, k] = w[p, k]
                w[p, k] = tmp
            if use_t:
                for k in range(t.shape[1]):
                    tmp = t[r, k]
                    t[r, k] = t[p, k]
                    t[p, k] = tmp
        for i in range(nrows):
            if i != r and (w[i, wi] & bit):
                # row r vanishes left of column c, so start at its word
                for k in range(wi, nw):
                    w[i, k] ^= w[r, k]
                if use_t:
                    for k in range(t.shape[1]):
                        t[i, k] ^= t[r, k]
        piv[r] = c
        r += 1
    return piv[:r]


_eliminate_compiled = njit(cache=True)(_eliminate_loop) if njit is not None else None


def eliminate(words: np.ndarray, ncols: int, track: Optional[np.ndarray] = None,
              backend: str = "auto") -> list[int]:
    """Gauss-Jordan elimination in place; returns pivot columns.

    Pivots are chosen leftmost first and, within a column, from the first
    available row.  ``track`` (same row count) receives the same row
    operations, which is how left kernels are recovered.  ``backend`` is
    "auto", "compiled" or "numpy"; all give identical results.
    """
    if backend != "numpy" and _eliminate_compiled is not None and words.shape[0]:
        t = track if track is not None else words[:0]
        return [int(c) for c in _eliminate_compiled(words, ncols, t, track is not None)]
    return _eliminate_numpy(words, ncols, track)


def _eliminate_numpy(words: np.ndarray, ncols: int, track: Optional[np.ndarray]) -> list[int]:
    nrows = words.shape[0]
    pivots: list[int] = []
    r = 0
    if nrows == 0:
        return pivots
    c = 0
    while c < ncols and r < nrows:
        wi = c // WORD
        # skip whole words with no remaining bits
        if c % WORD == 0 and not np.any(words[r:, wi]):
            c += WORD
            continue
        bit = _ONE << np.uint64(c % WORD)
        hits = np.flatnonzero(words[r:, wi] & bit)
        if hits.size == 0:
            c += 1
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
            if track is not None:
                track[[r, p]] = track[[p, r]]
        sel = np.flatnonzero(words[:, wi] & bit)
        sel = sel[sel != r]
        if sel.size:
            words[sel] ^= words[r]
            if track is not None:
                track[sel] ^= track[r]
        pivots.append(c)
        r += 1
        c += 1
    return pivots


def rref(m: F2Matrix) -> tuple[F2Matrix, list[int], int]:
    """Reduced row-echelon form, pivot columns and rank."""
    w = m.words.copy()
    pivots = eliminate(w, m.cols)
    return F2Matrix(m.rows, m.cols, w), pivots, len(pivots)


def rank(m: F2Matrix) -> int:
    return rref(m)[2]


def kernel_basis(m: F2Matrix) -> F2Matrix:
    """Rows spanning {v : m·vᵀ = 0}, one per free column, in column order."""
    red, pivots, rk = rref(m)
    n = m.cols
    free = [j for j in range(n) if j not in set(pivots)]
    dense = red.to_dense()[:rk]
    out = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        out[k, f] = 1
        if rk:
            out[k, pivots] = dense[:, f]
    return F2Matrix.from_dense(out) if len(free) else F2Matrix(0, n)


def left_kernel(m: F2Matrix) -> F2Matrix:
    """Rows spanning {u : u·m = 0}, in reduced echelon form."""
    w = m.words.copy()
    track = F2Matrix.identity(m.rows).words
    rk = len(eliminate(w, m.cols, track))
    k = F2Matrix(m.rows - rk, m.rows, track[rk:].copy())
    return rref(k)[0]


def solve(m: F2Matrix, b) -> Optional[np.ndarray]:
    """A vector x with m·x = b, or None when b is outside the column space."""
    b = np.asarray(b, dtype=np.uint8) & 1
    if b.shape != (m.rows,):
        raise ValueError(f"right-hand side has length {b.shape}, expected {m.rows}")
    aug = np.concatenate([m.to_dense(), b.reshape(-1, 1)], axis=1)
    red, pivots, rk = rref(F2Matrix.from_dense(aug))
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    dense = red.to_dense()
    for i, p in enumerate(pivots):
        x[p] = dense[i, m.cols]
    return x


# ---------------------------------------------------------------------------
# Small subspaces on Python-integer bit rows.


def int_rref(rows: Iterable[int]) -> list[int]:
    """Fully reduced echelon basis of the span, sorted by decreasing leading bit.

    For integer rows the "pivot" of a row is its highest set bit; callers that
    want leftmost-column semantics index columns so that the most significant
    column is the preferred pivot.
    """
    basis: dict[int, int] = {}
    for v in rows:
        for p, b in basis.items():
            if v >> p & 1:
                v ^= b
        if v:
            p = v.bit_length() - 1
            for q in list(basis):
                if basis[q] >> p & 1:
                    basis[q] ^= v
            basis[p] = v
    return [basis[p] for p in sorted(basis, reverse=True)]


class Subspace:
    """Echelon basis of a subspace of F₂ⁿ, rows encoded as Python ints.

    Every basis row is reduced with respect to the others, so membership
    tests and coordinate extraction are cheap.  Pivot = highest set bit.
    """

    __slots__ = ("n", "_rows")

    def __init__(self, n: int, rows: Iterable[int] = ()):
        self.n = n
        self._rows: dict[int, int] = {}
        for v in rows:
            self.add(v)

    def copy(self) -> "Subspace":
        s = Subspace(self.n)
        s._rows = dict(self._rows)
        return s

    @property
    def dim(self) -> int:
        return len(self._rows)

    def basis(self) -> list[int]:
        return [self._rows[p] for p in sorted(self._rows, reverse=True)]

    def pivots(self) -> list[int]:
        return sorted(self._rows, reverse=True)

    def reduce(self, v: int) -> int:
        for p, b in self._rows.items():
            if v >> p & 1:
                v ^= b
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        p = v.bit_length() - 1
        for q in list(self._rows):
            if self._rows[q] >> p & 1:
                self._rows[q] ^= v
        self._rows[p] = v
        return True

    def __len__(self) -> int:
        return len(self._rows)

"""Grading conventions: which key coordinate plays the role of filtration.

A convention fixes the page-r bidegree law as a constant key shift δ_r:

``motivic``    (stem, fil, ...)        δ_r = (-1, r, 0, ...)
``tate``       (stem, mot, ..., e_t)   δ_r = (-1, 1, ..., r/2)   filtration 2·e_t
``bockstein``  (stem, mot, ..., e_x)   δ_r = (-1, 1, ..., r)     filtration e_x

Tate and homotopy-fixed-point pages only have even r; their filtration is
twice the t-exponent so that every d_r raises it by r.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

KINDS = ("motivic", "tate", "bockstein")


class ConventionError(ValueError):
    pass


@dataclass(frozen=True)
class Convention:
    kind: str
    keylen: int
    position: Optional[int] = None  # key coordinate of the tracked t / tower exponent
    tracked: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConventionError(f"unknown convention {self.kind!r}")
        if self.kind != "motivic" and self.position is None:
            raise ConventionError(f"{self.kind} convention needs a tracked generator")

    @classmethod
    def for_space(cls, kind: str, space, tracked: Optional[str] = None) -> "Convention":
        alg = getattr(space, "algebra", space)
        pos = None
        if kind != "motivic":
            if tracked is None or tracked not in alg.tracked:
                raise ConventionError(f"{kind} convention needs {tracked!r} declared as tracked")
            pos = 2 + alg.tracked.index(tracked)
        return cls(kind, space.keylen, pos, tracked)

    @property
    def first_page(self) -> int:
        return 1 if self.kind == "bockstein" else 2

    @property
    def step(self) -> int:
        return 2 if self.kind == "tate" else 1

    def valid_page(self, r: int) -> bool:
        return r >= self.first_page and (self.kind != "tate" or r % 2 == 0)

    def delta(self, r: int) -> tuple:
        if not self.valid_page(r):
            raise ConventionError(f"page {r} does not exist under the {self.kind} convention")
        d = [0] * self.keylen
        d[0] = -1
        if self.kind == "motivic":
            d[1] = r
        else:
            d[1] = 1
            d[self.position] = r // 2 if self.kind == "tate" else r
        return tuple(d)

    def filtration(self, key) -> int:
        if self.kind == "motivic":
            return key[1]
        e = key[self.position]
        return 2 * e if self.kind == "tate" else e

    def page_of(self, diff) -> Optional[int]:
        """The page r with δ_r = diff, or None when diff obeys no page's law."""
        diff = tuple(diff)
        if len(diff) != self.keylen or diff[0] != -1:
            return None
        if self.kind == "motivic":
            r = diff[1]
        else:
            if diff[1] != 1:
                return None
            e = diff[self.position]
            r = 2 * e if self.kind == "tate" else e
        if not self.valid_page(r):
            return None
        return r if self.delta(r) == diff else None

    def projection(self, key) -> tuple:
        """Key with the tracked coordinate dropped (r-independent part of the law)."""
        if self.position is None:
            return tuple(key)
        return tuple(k for i, k in enumerate(key) if i != self.position)

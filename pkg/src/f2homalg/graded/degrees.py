"""Bidegrees and multidegree keys."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Bidegree:
    """(stem n, filtration s); under the motivic convention w = (n + s) / 2."""

    stem: int
    filtration: int

    def __add__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.stem + other.stem, self.filtration + other.filtration)

    def __sub__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.stem - other.stem, self.filtration - other.filtration)

    @property
    def weight(self) -> int:
        total = self.stem + self.filtration
        if total % 2:
            raise ValueError(f"{self} has odd stem + filtration; no integral weight")
        return total // 2

    @classmethod
    def from_weight(cls, stem: int, weight: int) -> "Bidegree":
        return cls(stem, 2 * weight - stem)

    def __str__(self) -> str:
        return f"({self.stem},{self.filtration})"


Key = tuple  # (stem, filtration, *tracked exponents)


def key_add(a: Key, b: Key) -> Key:
    return tuple(x + y for x, y in zip(a, b))


def key_sub(a: Key, b: Key) -> Key:
    return tuple(x - y for x, y in zip(a, b))

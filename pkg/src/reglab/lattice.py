"""Rank-2 lattice of an elliptic K3 with a section, and singular-fibre counting.

The basis is ``(C, F)`` with ``C^2 = -2``, ``C.F = 1``, ``F^2 = 0``. Classes
are integer coordinate vectors; ``"C+5F"``-style strings parse to them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    gram: tuple
    basis_labels: tuple

    def __post_init__(self):
        g = np.array(self.gram, dtype=object)
        n = len(self.basis_labels)
        if g.shape != (n, n):
            raise LatticeError("gram matrix shape does not match labels")
        if not all(g[i, j] == g[j, i] for i in range(n) for j in range(n)):
            raise LatticeError("gram matrix must be symmetric")
        if len(set(self.basis_labels)) != n:
            raise LatticeError("duplicate basis labels")

    @property
    def rank(self) -> int:
        return len(self.basis_labels)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def cls(self, *coords: int) -> "DivisorClass":
        return DivisorClass(tuple(int(c) for c in coords))

    def parse_class(self, text: str) -> "DivisorClass":
        return parse_class(text, self)


BL_LATTICE = Lattice(gram=((-2, 1), (1, 0)), basis_labels=("C", "F"))


@dataclass(frozen=True)
class DivisorClass:
    coords: tuple

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        if len(self.coords) != len(other.coords):
            raise LatticeError("dimension mismatch")
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-1) * other

    def __rmul__(self, n: int) -> "DivisorClass":
        return DivisorClass(tuple(n * a for a in self.coords))

    def __neg__(self) -> "DivisorClass":
        return (-1) * self

    def label(self, lattice: Lattice = BL_LATTICE) -> str:
        parts = []
        for c, name in zip(self.coords, lattice.basis_labels):
            if c == 0:
                continue
            mag = "" if abs(c) == 1 else str(abs(c))
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign}{mag}{name}")
        if not parts:
            return "0"
        s = "".join(parts)
        return s[1:] if s[0] == "+" else s


def pair(lattice: Lattice, a: DivisorClass, b: DivisorClass) -> int:
    n = lattice.rank
    if len(a.coords) != n or len(b.coords) != n:
        raise LatticeError(f"class dimension does not match lattice rank {n}")
    return int(sum(a.coords[i] * lattice.gram[i][j] * b.coords[j]
                   for i in range(n) for j in range(n)))


def self_intersection(lattice: Lattice, a: DivisorClass) -> int:
    return pair(lattice, a, a)


def primitive_class(g: int, lattice: Lattice = BL_LATTICE) -> DivisorClass:
    """``C + gF``, of self-intersection ``2g - 2``."""
    return DivisorClass((1, int(g)))


_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*([A-Za-z_]\w*)\s*")


def parse_class(text: str, lattice: Lattice = BL_LATTICE) -> DivisorClass:
    s = text.strip()
    if not s:
        raise LatticeError("empty class")
    if s == "0":
        return DivisorClass((0,) * lattice.rank)
    coords = [0] * lattice.rank
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise LatticeError(f"malformed class {text!r}")
        sign, num, name = m.groups()
        if not sign and not first:
            raise LatticeError(f"malformed class {text!r}")
        if name not in lattice.basis_labels:
            raise LatticeError(f"unknown basis label {name!r}")
        k = int(num) if num else 1
        coords[lattice.basis_labels.index(name)] += -k if sign == "-" else k
        pos = m.end()
        first = False
    return DivisorClass(tuple(coords))


@dataclass(frozen=True)
class FiberConfig:
    chains: tuple

    def __post_init__(self):
        if not self.chains:
            raise LatticeError("empty fibre configuration")
        if any(int(r) < 1 for r in self.chains):
            raise LatticeError("every chain needs at least one component")
        object.__setattr__(self, "chains", tuple(sorted((int(r) for r in self.chains), reverse=True)))

    @property
    def nodes(self) -> int:
        # a closed chain of r rational curves has r nodes
        return sum(self.chains)


def picard_number(cfg: FiberConfig) -> int:
    return sum(cfg.chains) - len(cfg.chains) + 2


def _partitions(total: int, parts: int, cap: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    lo = -(-total // parts)
    for first in range(min(cap, total - parts + 1), lo - 1, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def enumerate_max_picard_configs(total_nodes: int = 24, target_rank: int = 20) -> list:
    """All chain multisets with the given node total and Picard number."""
    s = total_nodes - target_rank + 2
    if s < 1:
        return []
    return [FiberConfig(p) for p in _partitions(total_nodes, s, total_nodes)]


def config_from_string(text: str) -> FiberConfig:
    try:
        return FiberConfig(tuple(int(t) for t in text.split(",")))
    except ValueError as exc:
        raise LatticeError(f"malformed fibre configuration {text!r}") from exc


def gram_of(lattice: Lattice, classes: Sequence[DivisorClass]) -> list:
    return [[pair(lattice, a, b) for b in classes] for a in classes]

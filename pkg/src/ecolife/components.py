"""Disjoint-set forest for connected-component statistics."""
from __future__ import annotations

from typing import Hashable, Iterable


class UnionFind:
    """Union by size with path halving.

    >>> uf = UnionFind("abc")
    >>> uf.union("a", "b")
    True
    >>> uf.n_sets
    2
    """

    def __init__(self, items: Iterable[Hashable] = ()):
        self._parent: dict = {}
        self._size: dict = {}
        self.n_sets = 0
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._size[x] = 1
            self.n_sets += 1

    def find(self, x):
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        self.add(a)
        self.add(b)
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        self.n_sets -= 1
        return True

    def size(self, x) -> int:
        return self._size[self.find(x)]

    def component_sizes(self) -> list[int]:
        return sorted((self._size[r] for r in self._parent if self._parent[r] == r), reverse=True)

    def __len__(self):
        return len(self._parent)

    def __contains__(self, x):
        return x in self._parent

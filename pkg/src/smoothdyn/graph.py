"""Mutable simple graph on a fixed node set.

Nodes are dense integer indices in ``[0, n)``.  Edges are canonical
node pairs ``(u, v)`` with ``u < v`` stored in a hash set, so membership,
degree lookup and a single flip are expected O(1); neighbor iteration is
O(degree) through per-node adjacency sets.
"""

from __future__ import annotations

import math
from typing import IO, Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

Pair = Tuple[int, int]


class GraphError(ValueError):
    pass


def pair(u: int, v: int) -> Pair:
    """Canonical node pair: sorted, distinct, nonnegative."""
    if u == v:
        raise GraphError(f"self-loop ({u},{v}) is not a node pair")
    if u < 0 or v < 0:
        raise GraphError(f"negative node index in ({u},{v})")
    return (u, v) if u < v else (v, u)


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def all_pairs(n: int) -> Iterator[Pair]:
    for u in range(n):
        for v in range(u + 1, n):
            yield (u, v)


def _row_start(n: int, u: int) -> int:
    # number of canonical pairs (a, b) with a < u, in row-major order
    return u * (2 * n - u - 1) // 2


def pair_index(n: int, e: Pair) -> int:
    """Row-major index of a canonical pair among the binom(n,2) pairs."""
    u, v = e
    return _row_start(n, u) + (v - u - 1)


def index_pair(n: int, idx: int) -> Pair:
    """Inverse of :func:`pair_index` in O(1) via the triangular-number inverse."""
    if idx < 0 or idx >= pair_count(n):
        raise GraphError(f"pair index {idx} out of range for n={n}")
    # float approximation of the row, then exact integer fixup
    u = int(n - 0.5 - math.sqrt((n - 0.5) ** 2 - 2.0 * idx))
    u = min(max(u, 0), n - 2)
    while _row_start(n, u + 1) <= idx:
        u += 1
    while _row_start(n, u) > idx:
        u -= 1
    v = u + 1 + (idx - _row_start(n, u))
    return (u, v)


def uniform_pair(n: int, rng: np.random.Generator) -> Pair:
    """A uniform canonical pair from binom([n],2), no rejection."""
    return index_pair(n, int(rng.integers(pair_count(n))))


class DynamicGraph:
    """Simple graph with O(1) expected membership/flip and degree table."""

    __slots__ = ("n", "_edges", "_adj")

    def __init__(self, n: int, edges: Iterable[Pair] = ()):
        if n < 0:
            raise GraphError("node count must be nonnegative")
        self.n = n
        self._edges: set[Pair] = set()
        self._adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            e = pair(u, v)
            if e[1] >= n:
                raise GraphError(f"edge {e} out of range for n={n}")
            if e in self._edges:
                raise GraphError(f"duplicate edge {e}")
            self._edges.add(e)
            self._adj[e[0]].add(e[1])
            self._adj[e[1]].add(e[0])

    # -- queries ---------------------------------------------------------

    def has(self, u: int, v: int) -> bool:
        return (u, v) in self._edges if u < v else (v, u) in self._edges

    def has_pair(self, e: Pair) -> bool:
        return e in self._edges

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]  # treated as read-only by callers

    def edge_count(self) -> int:
        return len(self._edges)

    def edges(self) -> Iterator[Pair]:
        return iter(self._edges)

    def edge_set(self) -> frozenset:
        return frozenset(self._edges)

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(self.n)
        g._edges = set(self._edges)
        g._adj = [set(a) for a in self._adj]
        return g

    # -- mutation --------------------------------------------------------

    def flip(self, u: int, v: int) -> bool:
        """Toggle the edge; return whether it is present afterwards."""
        e = pair(u, v)
        if e[1] >= self.n:
            raise GraphError(f"edge {e} out of range for n={self.n}")
        a, b = e
        if e in self._edges:
            self._edges.remove(e)
            self._adj[a].remove(b)
            self._adj[b].remove(a)
            return False
        self._edges.add(e)
        self._adj[a].add(b)
        self._adj[b].add(a)
        return True

    def add(self, u: int, v: int) -> bool:
        """Insert the edge; return False (no-op) if already present."""
        if self.has(u, v):
            return False
        self.flip(u, v)
        return True

    def remove(self, u: int, v: int) -> bool:
        """Delete the edge; return False (no-op) if already absent."""
        if not self.has(u, v):
            return False
        self.flip(u, v)
        return True


def random_graph(
    n: int,
    rng: np.random.Generator,
    restriction: Optional[Sequence[Pair]] = None,
) -> DynamicGraph:
    """Each allowed pair present independently with probability 1/2."""
    if restriction is not None:
        allowed = list(restriction)
        if not allowed:
            return DynamicGraph(n)
        mask = rng.random(len(allowed)) < 0.5
        return DynamicGraph(n, [e for e, keep in zip(allowed, mask) if keep])
    m = pair_count(n)
    mask = rng.random(m) < 0.5
    return DynamicGraph(n, [index_pair(n, i) for i in np.flatnonzero(mask)])


# -- serialization (plain-text edge list) --------------------------------


def write_edge_list(g: DynamicGraph, fp: IO[str]) -> None:
    fp.write(f"{g.n} {g.edge_count()}\n")
    for u, v in sorted(g.edges()):
        fp.write(f"{u} {v}\n")


def read_edge_list(fp: IO[str]) -> DynamicGraph:
    header = fp.readline().split()
    if len(header) != 2:
        raise GraphError("edge list header must be 'n m'")
    n, m = int(header[0]), int(header[1])
    edges = []
    for _ in range(m):
        parts = fp.readline().split()
        if len(parts) != 2:
            raise GraphError("edge line must be 'u v'")
        edges.append(pair(int(parts[0]), int(parts[1])))
    return DynamicGraph(n, edges)

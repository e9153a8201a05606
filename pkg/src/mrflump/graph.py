"""Undirected graphs on vertices 1..N and the combinatorics the lumping conditions need."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

from .errors import MrfLumpError, NotChordalError, VertexError

Clique = frozenset  # frozenset[int], nonempty

MAX_ORDER_VERTICES = 8
MAX_ORDERINGS = 10**6


def clique_key(c: Iterable[int]) -> tuple:
    """Canonical sort key: size first, then lexicographic."""
    s = sorted(c)
    return (len(s), s)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise VertexError(f"vertex count must be a positive integer, got {self.n!r}")
        norm = set()
        for e in self.edges:
            i, j = tuple(e)
            self._check(i)
            self._check(j)
            if i == j:
                raise VertexError(f"self-loop at vertex {i}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    def _check(self, i):
        if not isinstance(i, int) or not 1 <= i <= self.n:
            raise VertexError(f"vertex {i!r} out of range 1..{self.n}")

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, frozenset())

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, frozenset(combinations(range(1, n + 1), 2)))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls(n, frozenset((i, i + 1) for i in range(1, n)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls(n, frozenset([(i, i + 1) for i in range(1, n)] + [(1, n)]))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _adj(self) -> tuple:
        adj = [set() for _ in range(self.n + 1)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return tuple(frozenset(a) for a in adj)

    def neighbors(self, i: int) -> frozenset:
        self._check(i)
        return self._adj[i]

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = sorted(vertices)
        if not vs:
            return False
        return all(self.adjacent(a, b) for a, b in combinations(vs, 2))

    @cached_property
    def cliques(self) -> tuple:
        return tuple(enumerate_cliques(self))

    def is_connected(self) -> bool:
        seen = {1}
        todo = [1]
        while todo:
            v = todo.pop()
            for w in self._adj[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def with_edges(self, edges: Iterable) -> Graph:
        return Graph(self.n, frozenset(edges))

    def sorted_edges(self) -> list:
        return sorted(self.edges)


def neighbors(g: Graph, i: int) -> frozenset:
    return g.neighbors(i)


def enumerate_cliques(g: Graph) -> list:
    """All cliques of ``g`` (singletons included), sorted by size then lexicographically.

    Grows cliques one vertex at a time, always appending a vertex larger than every
    current member, so each clique is produced exactly once.
    """
    level = [(v,) for v in g.vertices]
    out = []
    while level:
        out.extend(frozenset(c) for c in level)
        nxt = []
        for c in level:
            for v in range(c[-1] + 1, g.n + 1):
                if all(g.adjacent(u, v) for u in c):
                    nxt.append(c + (v,))
        level = nxt
    out.sort(key=clique_key)
    return out


def _normalize_cycle(cyc: list) -> tuple:
    k = cyc.index(min(cyc))
    cyc = cyc[k:] + cyc[:k]
    if cyc[-1] < cyc[1]:
        cyc = [cyc[0]] + cyc[1:][::-1]
    return tuple(cyc)


def _shortest_path(g: Graph, src: int, dst: int, banned: set):
    prev = {src: None}
    q = deque([src])
    while q:
        v = q.popleft()
        if v == dst:
            path = []
            while v is not None:
                path.append(v)
                v = prev[v]
            return path[::-1]
        for w in sorted(g.neighbors(v)):
            if w not in prev and w not in banned:
                prev[w] = v
                q.append(w)
    return None


def chordless_cycle(g: Graph):
    """A chordless cycle of length >= 4, or None when ``g`` is chordal.

    For every vertex c and non-adjacent pair a, b of its neighbours, a shortest a-b
    path avoiding c's other neighbours closes an induced cycle through c. Every
    chordless cycle of length >= 4 is found this way from any of its vertices.
    """
    for c in g.vertices:
        nb = sorted(g.neighbors(c))
        for a, b in combinations(nb, 2):
            if g.adjacent(a, b):
                continue
            banned = ({c} | set(nb)) - {a, b}
            path = _shortest_path(g, a, b, banned)
            if path is not None:
                return _normalize_cycle([c] + path)
    return None


def is_chordal(g: Graph) -> tuple:
    """Return ``(chordal, witness)``; ``witness`` is a chordless cycle when not chordal."""
    w = chordless_cycle(g)
    return (w is None, w)


@dataclass(frozen=True)
class EliminationOrder:
    permutation: tuple
    prior_neighbor_sets: tuple

    @classmethod
    def from_permutation(cls, g: Graph, perm: Iterable[int]) -> EliminationOrder:
        perm = tuple(perm)
        if sorted(perm) != list(g.vertices):
            raise VertexError(f"{perm} is not a permutation of 1..{g.n}")
        sets = []
        for k, v in enumerate(perm):
            sets.append(frozenset(g.neighbors(v) & set(perm[:k])))
        return cls(perm, tuple(sets))

    def prior(self, v: int) -> frozenset:
        return self.prior_neighbor_sets[self.permutation.index(v)]

    def is_valid_for(self, g: Graph) -> bool:
        try:
            ref = EliminationOrder.from_permutation(g, self.permutation)
        except VertexError:
            return False
        return ref.prior_neighbor_sets == self.prior_neighbor_sets

    def is_perfect(self, g: Graph) -> bool:
        """Every prior-neighbour set induces a complete subgraph."""
        return all(len(a) < 2 or g.is_clique(a) for a in self.prior_neighbor_sets)


def _mcs_walk(g: Graph) -> Iterator[tuple]:
    # depth-first over every tie-break, smallest vertex first
    n = g.n
    weight = [0] * (n + 1)
    order: list = []
    placed = [False] * (n + 1)

    def rec():
        if len(order) == n:
            yield tuple(order)
            return
        best = max(weight[v] for v in g.vertices if not placed[v])
        for v in g.vertices:
            if placed[v] or weight[v] != best:
                continue
            placed[v] = True
            order.append(v)
            for w in g.neighbors(v):
                weight[w] += 1
            yield from rec()
            for w in g.neighbors(v):
                weight[w] -= 1
            order.pop()
            placed[v] = False

    yield from rec()


def mcs_orderings(g: Graph, all: bool = False) -> list:
    """Maximum cardinality search orderings of a chordal graph.

    With ``all=False`` returns the single ordering that breaks every tie toward the
    smallest vertex. With ``all=True`` returns every ordering reachable under some
    tie-breaking, in depth-first order (the first one equals the ``all=False`` result).
    """
    chordal, witness = is_chordal(g)
    if not chordal:
        raise NotChordalError(witness)
    if not all:
        perm = next(_mcs_walk(g))
        return [EliminationOrder.from_permutation(g, perm)]
    if g.n > MAX_ORDER_VERTICES:
        raise MrfLumpError(f"enumerating all MCS orderings is capped at {MAX_ORDER_VERTICES} vertices")
    out = {}
    for perm in _mcs_walk(g):
        out.setdefault(perm, None)
        if len(out) > MAX_ORDERINGS:
            raise MrfLumpError(f"more than {MAX_ORDERINGS} MCS orderings")
    return [EliminationOrder.from_permutation(g, p) for p in out]

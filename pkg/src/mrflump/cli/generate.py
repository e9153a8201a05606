"""Seeded random instances for the property suites."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..dist import AlphabetSpec, JointTable, check_state_space
from ..gibbs import PotentialFamily, _expand
from ..graph import Graph
from ..lump import Lumping
from .instance import Instance

PROFILES = ("generic", "prop1", "chordal")
MAX_VALUE = 4


def _random_graph(rng, n, p=0.5) -> Graph:
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < p]
    return Graph(n, frozenset(edges))


def _random_chordal(rng, n) -> Graph:
    """Random tree, random extra edges, then fill-in along a random elimination order."""
    edges = {(int(rng.integers(1, v)), v) for v in range(2, n + 1)}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rng.random() < 0.3:
                edges.add((i, j))
    adj = {v: set() for v in range(1, n + 1)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    remaining = set(adj)
    for v in rng.permutation(np.arange(1, n + 1)):
        v = int(v)
        later = sorted(adj[v] & remaining - {v})
        for a in later:
            for b in later:
                if a < b:
                    edges.add((a, b))
                    adj[a].add(b)
                    adj[b].add(a)
        remaining.discard(v)
    return Graph(n, frozenset(edges))


def _random_codes(rng, k) -> list:
    """Surjection from k symbols onto a random number of targets."""
    m = int(rng.integers(1, k + 1))
    codes = list(range(m)) + [int(c) for c in rng.integers(0, m, size=k - m)]
    rng.shuffle(codes)
    return codes


def _values(rng, shape, exact, zero_prob=0.0):
    vals = rng.integers(1, MAX_VALUE + 1, size=shape)
    if zero_prob:
        vals = np.where(rng.random(shape) < zero_prob, 0, vals)
    if exact:
        out = np.empty(shape, dtype=object)
        out.flat[:] = [Fraction(int(v)) for v in vals.flat]
        return out
    return vals.astype(np.float64)


def _nonnegative_table(rng, g: Graph, alpha: AlphabetSpec, exact: bool, zero_prob: float) -> JointTable:
    """Normalized product of random nonnegative clique factors (an MRF on ``g``)."""
    # zeros go into maximal-clique factors only, so the product is rarely all zero
    maximal = {c for c in g.cliques if not any(c < d for d in g.cliques)}
    while True:
        # integer factors multiply as Python ints; one division at the end
        w = np.ones(alpha.cards, dtype=object) if exact else np.ones(alpha.cards)
        for c in g.cliques:
            if len(c) > 1 and c not in maximal and rng.random() < 0.3:
                continue
            members = sorted(c)
            shape = tuple(alpha.cards[v - 1] for v in members)
            vals = _values(rng, shape, False, zero_prob if c in maximal else 0.0)
            if exact:
                vals = vals.astype(np.int64).astype(object)
            w = w * _expand(vals, members, g.n)
        total = sum(w.flat) if exact else w.sum()
        if total > 0:
            if exact:
                out = np.empty(alpha.cards, dtype=object)
                out.flat[:] = [Fraction(int(v), int(total)) for v in w.flat]
                return JointTable(alpha, out)
            return JointTable(alpha, w / total)


def _prop1_family(rng, g: Graph, alpha: AlphabetSpec, lump: Lumping, exact: bool) -> PotentialFamily:
    """Each vertex gets one designated clique; every other potential sees it only via y."""
    cliques = list(g.cliques)
    designated = {}
    for v in g.vertices:
        options = [c for c in cliques if v in c]
        designated[v] = options[int(rng.integers(len(options)))]
    chosen = set(designated.values()) | {c for c in cliques if rng.random() < 0.5}
    pots = {}
    for c in sorted(chosen, key=lambda c: (len(c), sorted(c))):
        members = sorted(c)
        shape = [
            alpha.cards[v - 1] if designated[v] == c else len(lump.y_alphabet.symbols[v - 1])
            for v in members
        ]
        arr = _values(rng, tuple(shape), exact)
        for ax, v in enumerate(members):
            if designated[v] != c:
                arr = arr.take(lump.codes[v - 1], axis=ax)
        pots[c] = arr
    return PotentialFamily(g, alpha, pots)


def random_instance(
    seed: int,
    profile: str = "generic",
    max_vertices: int = 4,
    max_alphabet: int = 3,
    exact: bool = True,
    zero_prob: float | None = None,
) -> Instance:
    """Deterministic random instance for ``seed``.

    ``generic``: random graph, nonnegative random factors (zeros allowed), random
    lumping. ``prop1``: positive potential family in which every vertex has at most
    one strictly dependent clique. ``chordal``: random chordal graph with a positive
    MRF on it. ``zero_prob`` overrides the chance of a zero factor entry (default
    0.25 for ``generic``, 0 otherwise).
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    if max_vertices < 1 or max_alphabet < 1:
        raise ValueError("caps must be positive")
    check_state_space([max_alphabet] * max_vertices)
    rng = np.random.default_rng([seed, PROFILES.index(profile)])
    n = int(rng.integers(2, max_vertices + 1)) if max_vertices >= 2 else 1
    alpha = AlphabetSpec(tuple(
        tuple(str(s) for s in range(int(rng.integers(2, max_alphabet + 1)) if max_alphabet >= 2 else 1))
        for _ in range(n)
    ))
    g = _random_chordal(rng, n) if profile == "chordal" else _random_graph(rng, n)
    lump = Lumping.from_codes(g, alpha, [_random_codes(rng, k) for k in alpha.cards])
    names = tuple(f"X{v}" for v in g.vertices)
    name = f"{profile}-{seed}"
    if profile == "prop1":
        fam = _prop1_family(rng, g, alpha, lump, exact)
        return Instance(name, g, alpha, names, family=fam, lumping=lump, seed=seed)
    zp = (0.25 if profile == "generic" else 0.0) if zero_prob is None else zero_prob
    table = _nonnegative_table(rng, g, alpha, exact, zp)
    return Instance(name, g, alpha, names, table=table, lumping=lump, seed=seed)

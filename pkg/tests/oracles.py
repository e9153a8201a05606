"""Brute-force reference implementations in plain Python.

Nothing here imports the package's algorithms; tables are handled as dicts mapping
index tuples to probabilities, so every quantity is a direct sum over configurations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product


def as_dict(weights, cards) -> dict:
    """Dense array (or anything indexable by tuples) to ``{index tuple: prob}``."""
    return {x: weights[x] for x in product(*(range(k) for k in cards))}


def marginal(p: dict, A) -> dict:
    out = {}
    for x, v in p.items():
        key = tuple(x[a - 1] for a in A)
        out[key] = out.get(key, 0) + v
    return out


def entropy(p: dict, A) -> float:
    m = marginal(p, sorted(A))
    return -sum(float(v) * math.log2(float(v)) for v in m.values() if v > 0)


def cond_entropy(p: dict, A, B=()) -> float:
    return entropy(p, set(A) | set(B)) - entropy(p, B)


def is_mrf(p: dict, n: int, edges, tol: float = 1e-9) -> bool:
    """Local Markov property checked configuration by configuration."""
    nb = {v: set() for v in range(1, n + 1)}
    for a, b in edges:
        nb[a].add(b)
        nb[b].add(a)
    exact = all(isinstance(v, (int, Fraction)) for v in p.values())
    for i in range(1, n + 1):
        rest = [v for v in range(1, n + 1) if v != i]
        near = sorted(nb[i])
        m_rest = marginal(p, rest)
        m_i_rest = marginal(p, [i] + rest)
        m_near = marginal(p, near)
        m_i_near = marginal(p, [i] + near)
        for x in p:
            r = tuple(x[v - 1] for v in rest)
            if m_rest[r] == 0:
                continue
            s = tuple(x[v - 1] for v in near)
            lhs = m_i_rest[(x[i - 1],) + r] / m_rest[r]
            rhs = m_i_near[(x[i - 1],) + s] / m_near[s]
            if (lhs != rhs) if exact else abs(float(lhs) - float(rhs)) > tol:
                return False
    return True


def pushforward(p: dict, codes) -> dict:
    out = {}
    for x, v in p.items():
        y = tuple(int(codes[k][x[k]]) for k in range(len(x)))
        out[y] = out.get(y, 0) + v
    return out


def all_edges(n: int) -> list:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def minimal_graphs(p: dict, n: int, tol: float = 1e-9) -> list:
    """Inclusion-minimal edge sets on which ``p`` is an MRF, by enumerating every subset."""
    full = all_edges(n)
    good = []
    for r in range(len(full) + 1):
        for es in combinations(full, r):
            s = frozenset(es)
            if any(g <= s for g in good):
                continue
            if is_mrf(p, n, es, tol):
                good.append(s)
    return sorted(sorted(g) for g in good)


def cliques(n: int, edges) -> list:
    e = {tuple(sorted(x)) for x in edges}
    out = []
    for r in range(1, n + 1):
        for c in combinations(range(1, n + 1), r):
            if all((a, b) in e for a, b in combinations(c, 2)):
                out.append(c)
    return out


def has_chordless_cycle(n: int, edges) -> bool:
    """Some vertex subset of size >= 4 induces a single cycle."""
    e = {tuple(sorted(x)) for x in edges}
    for r in range(4, n + 1):
        for s in combinations(range(1, n + 1), r):
            deg = {v: sum((min(v, u), max(v, u)) in e for u in s if u != v) for v in s}
            if any(d != 2 for d in deg.values()):
                continue
            seen, stack = {s[0]}, [s[0]]
            while stack:
                v = stack.pop()
                for u in s:
                    if u not in seen and (min(u, v), max(u, v)) in e:
                        seen.add(u)
                        stack.append(u)
            if len(seen) == r:
                return True
    return False


def canonical_log_potential(p: dict, cards, A) -> dict:
    """Moebius form of the canonical interaction on ``A`` anchored at index 0, in bits."""
    out = {}
    n = len(cards)
    for xa in product(*(range(cards[a - 1]) for a in A)):
        q = 0.0
        for r in range(len(A) + 1):
            for S in combinations(range(len(A)), r):
                x = [0] * n
                for k in S:
                    x[A[k] - 1] = xa[k]
                sign = -1 if (len(A) - r) % 2 else 1
                q += sign * math.log2(float(p[tuple(x)]))
        out[xa] = q
    return out

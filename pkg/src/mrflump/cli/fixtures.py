"""Built-in worked examples with every free parameter pinned.

Each builder documents the constraint its numbers satisfy. ``EXPECTED`` records the
verdicts the ``examples`` subcommand asserts.
"""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np

from ..dist import AlphabetSpec, JointTable
from ..gibbs import PotentialFamily
from ..graph import Graph
from ..lump import Lumping
from .instance import Instance

NAMES = ("example1", "example2", "example3", "example4", "example5", "infoloss", "mc_remark")


def _obj(rows) -> np.ndarray:
    a = np.empty(np.shape(rows), dtype=object)
    a[...] = [[F(v) for v in r] for r in rows] if np.ndim(rows) == 2 else [F(v) for v in rows]
    return a


def _chain_table(p_mid, cond_left, cond_right) -> np.ndarray:
    """p(x1, x2, x3) = p(x2) p(x1|x2) p(x3|x2); ``cond_*[x2][x]``."""
    k1, k2, k3 = len(cond_left[0]), len(p_mid), len(cond_right[0])
    w = np.empty((k1, k2, k3), dtype=object)
    for a in range(k1):
        for b in range(k2):
            for c in range(k3):
                w[a, b, c] = F(p_mid[b]) * F(cond_left[b][a]) * F(cond_right[b][c])
    return w


def _mod2_map(col):
    return {s: str(int(s) % 2) for s in col}


def example1() -> Instance:
    # Ternary Markov path. p(X1=1|X2=0) = p(X3=1|X2=2) = 0 and
    # p(X1=1|X2=2) = p(X3=1|X2=0) = p = 2/5; p(X2) = (1/4, 1/2, 1/4) so that
    # p(X2=0) = p(X2=2) lies in (0, 1/2). The remaining conditional mass is spread
    # uniformly; X1 and X3 are lumped mod 2.
    p = F(2, 5)
    rest = (1 - p) / 2
    left = [[F(1, 2), 0, F(1, 2)], [F(1, 3)] * 3, [rest, p, rest]]
    right = [[rest, p, rest], [F(1, 3)] * 3, [F(1, 2), 0, F(1, 2)]]
    alpha = AlphabetSpec.uniform(3, 3)
    w = _chain_table([F(1, 4), F(1, 2), F(1, 4)], left, right)
    g = Graph.path(3)
    lump = Lumping(g, alpha, tuple(_mod2_map(c) for c in alpha.symbols))
    return Instance("example1", g, alpha, ("X1", "X2", "X3"), table=JointTable(alpha, w), lumping=lump)


def example2() -> Instance:
    # X1 = X2 + Z1 and X3 = X2 + Z3 with X2 in {-1, 1}, Z1 in {0, 1}, Z3 in {-1, 0}
    # independent and uniform; g1, g3 identities and g2 constant.
    a1 = ("-1", "0", "1", "2")
    a2 = ("-1", "1")
    a3 = ("-2", "-1", "0", "1")
    alpha = AlphabetSpec((a1, a2, a3))
    w = np.full(alpha.cards, F(0), dtype=object)
    for x2 in (-1, 1):
        for z1 in (0, 1):
            for z3 in (-1, 0):
                idx = (a1.index(str(x2 + z1)), a2.index(str(x2)), a3.index(str(x2 + z3)))
                w[idx] += F(1, 8)
    g = Graph.path(3)
    maps = ({s: s for s in a1}, {s: "0" for s in a2}, {s: s for s in a3})
    return Instance("example2", g, alpha, ("X1", "X2", "X3"), table=JointTable(alpha, w), lumping=Lumping(g, alpha, maps))


def example3() -> Instance:
    # X2 = (X1, Z2, X3) with X1, Z2, X3 independent uniform bits; g2 keeps Z2.
    bits = ("0", "1")
    triples = tuple(a + b + c for a in bits for b in bits for c in bits)
    alpha = AlphabetSpec((bits, triples, bits))
    w = np.full(alpha.cards, F(0), dtype=object)
    for z in triples:
        w[int(z[0]), triples.index(z), int(z[2])] = F(1, 8)
    g = Graph.path(3)
    maps = ({s: s for s in bits}, {z: z[1] for z in triples}, {s: s for s in bits})
    return Instance("example3", g, alpha, ("X1", "X2", "X3"), table=JointTable(alpha, w), lumping=Lumping(g, alpha, maps))


# Example 4 potentials on ternary vertices lumped mod 2. The edge potentials are
# functions of the lumped values, U(y, y') = 1 + [y = y']; the singleton potentials
# depend strictly on x (0 and 2 share an image). psi_2 is a square so that the
# rewritten family stays rational.
_EX4_SINGLE = {1: (1, 2, 3), 2: (1, 4, 9), 3: (3, 1, 2)}
_EX4_SQRT2 = (1, 2, 3)


def _ex4_edge() -> np.ndarray:
    return _obj([[1 + (a % 2 == b % 2) for b in range(3)] for a in range(3)])


def _ex4_parts():
    alpha = AlphabetSpec.uniform(3, 3)
    g = Graph.path(3)
    lump = Lumping(g, alpha, tuple(_mod2_map(c) for c in alpha.symbols))
    return alpha, g, lump


def example4() -> Instance:
    alpha, g, lump = _ex4_parts()
    pots = {frozenset({v}): _obj(vals) for v, vals in _EX4_SINGLE.items()}
    pots[frozenset({1, 2})] = _ex4_edge()
    pots[frozenset({2, 3})] = _ex4_edge()
    fam = PotentialFamily(g, alpha, pots)
    return Instance("example4", g, alpha, ("X1", "X2", "X3"), family=fam, lumping=lump)


def example4_rewrite() -> Instance:
    """Same distribution as ``example4`` with sqrt(psi_2) moved into both edge potentials."""
    alpha, g, lump = _ex4_parts()
    root = _obj(_EX4_SQRT2)
    pots = {
        frozenset({1}): _obj(_EX4_SINGLE[1]),
        frozenset({3}): _obj(_EX4_SINGLE[3]),
        frozenset({1, 2}): _ex4_edge() * root[None, :],
        frozenset({2, 3}): _ex4_edge() * root[:, None],
    }
    fam = PotentialFamily(g, alpha, pots)
    return Instance("example4_rewrite", g, alpha, ("X1", "X2", "X3"), family=fam, lumping=lump)


def example5() -> Instance:
    # Two vertices; X1 uniform on {0, 1, 2}, X2 = X1 mod 2. g1 merges 0 and 1, g2 is
    # the identity, so p(Y2 | X1) differs on the merged pair.
    alpha = AlphabetSpec((("0", "1", "2"), ("0", "1")))
    w = np.full(alpha.cards, F(0), dtype=object)
    for x1 in range(3):
        w[x1, x1 % 2] = F(1, 3)
    g = Graph.path(2)
    maps = ({"0": "0", "1": "0", "2": "1"}, {"0": "0", "1": "1"})
    return Instance("example5", g, alpha, ("X1", "X2"), table=JointTable(alpha, w), lumping=Lumping(g, alpha, maps))


def infoloss() -> Instance:
    # X1 = X2 uniform on {0, 1, 2}; both lumped by the same mod-2 map, which merges
    # the support points (0, 0) and (2, 2).
    alpha = AlphabetSpec.uniform(2, 3)
    w = np.full(alpha.cards, F(0), dtype=object)
    for x in range(3):
        w[x, x] = F(1, 3)
    g = Graph.path(2)
    lump = Lumping(g, alpha, tuple(_mod2_map(c) for c in alpha.symbols))
    return Instance("infoloss", g, alpha, ("X1", "X2"), table=JointTable(alpha, w), lumping=lump)


def mc_remark() -> Instance:
    # Stationary three-step chain on {0, 1, 2, 3}: from a it moves to a or a+1 (mod 4)
    # with probability 1/2, so the uniform start is invariant. The successors of any
    # state differ in parity, hence H(X2 | Y2, X1) = 0 under the mod-2 map. The first
    # vertex keeps its identity map so the finite path has no boundary loss.
    k = 4
    trans = [[F(1, 2) if b in (a, (a + 1) % k) else F(0) for b in range(k)] for a in range(k)]
    alpha = AlphabetSpec.uniform(3, k)
    w = np.empty(alpha.cards, dtype=object)
    for a in range(k):
        for b in range(k):
            for c in range(k):
                w[a, b, c] = F(1, k) * trans[a][b] * trans[b][c]
    g = Graph.path(3)
    ident = {s: s for s in alpha.symbols[0]}
    lump = Lumping(g, alpha, (ident, _mod2_map(alpha.symbols[1]), _mod2_map(alpha.symbols[2])))
    return Instance("mc_remark", g, alpha, ("X1", "X2", "X3"), table=JointTable(alpha, w), lumping=lump)


_BUILDERS = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "example4": example4,
    "example5": example5,
    "infoloss": infoloss,
    "mc_remark": mc_remark,
}


def builtin_fixture(name: str) -> Instance:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}") from None


# (lumpable, preserving) plus fixture-specific claims checked by ``examples``.
EXPECTED = {
    "example1": {"lumpable": False, "preserving": False, "minimal_graphs": [[(1, 2), (1, 3), (2, 3)]]},
    "example2": {"lumpable": False, "preserving": True, "minimal_graphs": [[(1, 3)]]},
    "example3": {"lumpable": True, "preserving": True, "minimal_graphs": [[]]},
    "example4": {"lumpable": True, "preserving": False, "certificate": "prop1", "rewrite_offenders": {2: [(1, 2), (2, 3)]}},
    "example5": {"lumpable": True, "preserving": True, "certificate": "none", "prop2_fails_at": [2]},
    "infoloss": {"lumpable": True, "preserving": False, "necessary_holds": True, "sufficient_witness": None},
    "mc_remark": {"lumpable": True, "preserving": True, "sufficient_witness": (1, 2, 3), "minimal_graphs": [[]]},
}

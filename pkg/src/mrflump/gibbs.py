"""Gibbs-field representation: clique potentials, partition function, canonical fitting.

Each potential is a numpy array whose axes follow the sorted members of its clique.
Cliques missing from a family carry the constant-one potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .dist import (
    DEFAULT_TOL,
    AlphabetSpec,
    JointTable,
    check_state_space,
    is_exact_array,
)
from .errors import MrfLumpError, NotMRFError, VertexError
from .graph import Graph, clique_key

if TYPE_CHECKING:
    from .lump import Lumping

STRICT_RTOL = 1e-9


def _expand(arr: np.ndarray, members: list, n: int) -> np.ndarray:
    """View a clique table as an N-dimensional array broadcastable over all vertices."""
    shape = [1] * n
    for v, k in zip(members, arr.shape):
        shape[v - 1] = k
    return arr.reshape(shape)


@dataclass(frozen=True, eq=False)
class PotentialFamily:
    graph: Graph
    alphabet: AlphabetSpec
    potentials: dict = field(default_factory=dict)  # frozenset clique -> ndarray

    def __post_init__(self):
        if self.alphabet.n != self.graph.n:
            raise VertexError("alphabet and graph disagree on the vertex count")
        clean = {}
        for c, arr in self.potentials.items():
            c = frozenset(c)
            if not self.graph.is_clique(c):
                raise MrfLumpError(f"{sorted(c)} is not a clique of the graph")
            arr = np.asarray(arr)
            if arr.dtype != object:
                arr = arr.astype(np.float64)
            shape = tuple(self.alphabet.cards[v - 1] for v in sorted(c))
            if arr.shape != shape:
                raise MrfLumpError(f"potential on {sorted(c)} has shape {arr.shape}, expected {shape}")
            if not all(x > 0 for x in arr.flat):
                raise MrfLumpError(f"potential on {sorted(c)} is not strictly positive")
            arr.setflags(write=False)
            clean[c] = arr
        object.__setattr__(self, "potentials", dict(sorted(clean.items(), key=lambda kv: clique_key(kv[0]))))

    @property
    def exact(self) -> bool:
        return all(is_exact_array(a) for a in self.potentials.values())

    def potential(self, c: Iterable[int]) -> np.ndarray:
        """The table of clique ``c`` (constant one when absent)."""
        c = frozenset(c)
        if c in self.potentials:
            return self.potentials[c]
        shape = tuple(self.alphabet.cards[v - 1] for v in sorted(c))
        if self.exact:
            return np.full(shape, Fraction(1), dtype=object)
        return np.ones(shape)

    def scaled(self, c: Iterable[int], factor) -> PotentialFamily:
        pots = dict(self.potentials)
        pots[frozenset(c)] = self.potential(c) * factor
        return PotentialFamily(self.graph, self.alphabet, pots)


def unnormalized(f: PotentialFamily) -> np.ndarray:
    """Product of all clique potentials as a dense array over the full alphabet."""
    cards = f.alphabet.cards
    check_state_space(cards)
    exact = f.exact
    out = np.full(cards, Fraction(1), dtype=object) if exact else np.ones(cards)
    for c, arr in f.potentials.items():
        if exact:
            out = out * _expand(arr, sorted(c), f.graph.n)
        else:
            out = out * _expand(arr.astype(np.float64), sorted(c), f.graph.n)
    return out


def partition_function(f: PotentialFamily):
    w = unnormalized(f)
    return sum(w.flat, Fraction(0)) if f.exact else float(w.sum())


def synthesize_pmf(f: PotentialFamily) -> JointTable:
    w = unnormalized(f)
    z = sum(w.flat, Fraction(0)) if f.exact else w.sum()
    return JointTable(f.alphabet, w / z)


def _reference_slice(w: np.ndarray, S: tuple, A: tuple) -> np.ndarray:
    """``w(x_S, x*_{V minus S})`` shaped to broadcast over the axes of ``A``."""
    idx = tuple(slice(None) if ax + 1 in S else 0 for ax in range(w.ndim))
    sl = np.asarray(w[idx], dtype=w.dtype)
    return sl.reshape([w.shape[v - 1] if v in S else 1 for v in A])


def _subsets(A: tuple):
    for r in range(len(A) + 1):
        yield from combinations(A, r)


def canonical_log_potential(t: JointTable, A: Iterable[int]) -> np.ndarray:
    """``Q_A(x_A) = sum_{S subset of A} (-1)^{|A - S|} log2 p(x_S, x*_{V - S})``.

    The reference symbol ``x*`` of every vertex is its first alphabet symbol. Values
    are in bits, computed in doubles; ``t`` must be strictly positive.
    """
    A = tuple(sorted(A))
    logp = np.log2(t.floats)
    shape = tuple(t.alphabet.cards[v - 1] for v in A)
    q = np.zeros(shape)
    for S in _subsets(A):
        sign = -1.0 if (len(A) - len(S)) % 2 else 1.0
        q = q + sign * _reference_slice(logp, S, A)
    return q


def canonical_potential_exact(t: JointTable, A: Iterable[int]) -> np.ndarray:
    """Multiplicative form of the canonical potential, exact for rational tables."""
    A = tuple(sorted(A))
    shape = tuple(t.alphabet.cards[v - 1] for v in A)
    num = np.full(shape, Fraction(1), dtype=object)
    den = np.full(shape, Fraction(1), dtype=object)
    for S in _subsets(A):
        sl = _reference_slice(t.weights, S, A)
        if (len(A) - len(S)) % 2:
            den = den * sl
        else:
            num = num * sl
    return num / den


def nonclique_interactions(t: JointTable, g: Graph) -> dict:
    """Largest ``|Q_A|`` (bits) for every vertex set ``A`` that is not a clique of ``g``.

    In exact mode a value is reported as exactly ``0.0`` iff the multiplicative
    canonical potential is identically one.
    """
    if not t.is_positive():
        raise MrfLumpError("canonical potentials need a strictly positive table")
    out = {}
    for r in range(2, g.n + 1):
        for A in combinations(g.vertices, r):
            if g.is_clique(A):
                continue
            if t.exact:
                psi = canonical_potential_exact(t, A)
                if all(x == 1 for x in psi.flat):
                    out[frozenset(A)] = 0.0
                    continue
            out[frozenset(A)] = float(np.abs(canonical_log_potential(t, A)).max())
    return out


def fit_canonical_potentials(t: JointTable, g: Graph, tol: float = DEFAULT_TOL) -> PotentialFamily:
    """Canonical potentials of a positive MRF, restricted to the cliques of ``g``.

    Raises ``NotMRFError`` naming the first non-clique set whose interaction does not
    vanish.
    """
    if t.n != g.n:
        raise VertexError("table and graph disagree on the vertex count")
    inter = nonclique_interactions(t, g)
    bad = [A for A, r in inter.items() if (r != 0.0 if t.exact else r > tol)]
    if bad:
        first = min(bad, key=clique_key)
        raise NotMRFError(
            f"non-clique set {sorted(first)} has a nonzero canonical interaction "
            f"({inter[first]:.3g} bits); the table is not an MRF on this graph",
            offending=first,
        )
    pots = {}
    for c in g.cliques:
        if t.exact:
            pots[c] = canonical_potential_exact(t, c)
        else:
            pots[c] = np.exp2(canonical_log_potential(t, c))
    return PotentialFamily(g, t.alphabet, pots)


def _equal(a: np.ndarray, b: np.ndarray, exact: bool) -> bool:
    if exact:
        return bool(np.array_equal(a, b))
    return bool(np.allclose(a.astype(np.float64), b.astype(np.float64), rtol=STRICT_RTOL, atol=0))


def constant_on_blocks(arr: np.ndarray, axis: int, blocks, exact: bool) -> bool:
    """Whether ``arr`` is unchanged when index ``axis`` moves within any block."""
    for block in blocks:
        ref = arr.take(block[0], axis=axis)
        for k in block[1:]:
            if not _equal(ref, arr.take(k, axis=axis), exact):
                return False
    return True


def depends_only_via(f: PotentialFamily, clique: Iterable[int], i: int, lump: Lumping) -> bool:
    """True iff the potential of ``clique`` depends on ``x_i`` only through ``g_i(x_i)``."""
    members = sorted(clique)
    if i not in members:
        raise VertexError(f"vertex {i} is not in clique {members}")
    c = frozenset(members)
    if c not in f.potentials:
        return True
    return constant_on_blocks(f.potentials[c], members.index(i), lump.preimages(i), f.exact)


def strict_cliques(f: PotentialFamily, lump: Lumping, i: int) -> list:
    return [c for c in f.potentials if i in c and not depends_only_via(f, c, i, lump)]


@dataclass(frozen=True)
class DependencyAssignment:
    assignment: dict  # vertex -> frozenset clique
    classes: tuple  # tuple of frozenset vertex classes, one per distinct clique

    @property
    def L(self) -> int:
        return len(self.classes)

    def clique_of(self, vertex_class: frozenset) -> frozenset:
        return self.assignment[min(vertex_class)]

    def is_injective(self) -> bool:
        return len(self.classes) == len(self.assignment)

    def __bool__(self):
        return True


@dataclass(frozen=True)
class AssignmentFailure:
    offenders: dict  # vertex -> tuple of strict cliques (two or more)

    def __bool__(self):
        return False


def assign_cliques(f: PotentialFamily, lump: Lumping):
    """Map each vertex to the one clique allowed to depend strictly on it.

    Returns a ``DependencyAssignment`` or, when some vertex has two or more strict
    cliques, an ``AssignmentFailure`` listing them. A vertex with no strict clique
    is assigned the smallest clique that contains it.
    """
    g = f.graph
    assignment = {}
    offenders = {}
    for i in g.vertices:
        strict = strict_cliques(f, lump, i)
        if len(strict) >= 2:
            offenders[i] = tuple(sorted(strict, key=clique_key))
        elif strict:
            assignment[i] = strict[0]
        else:
            assignment[i] = min((c for c in g.cliques if i in c), key=clique_key)
    if offenders:
        return AssignmentFailure(offenders)
    by_clique = {}
    for i, c in assignment.items():
        by_clique.setdefault(c, set()).add(i)
    classes = tuple(sorted((frozenset(s) for s in by_clique.values()), key=min))
    return DependencyAssignment(assignment, classes)

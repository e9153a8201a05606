"""Coordinate-wise functions of Markov random fields and their lumpability."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .dist import (
    DEFAULT_TOL,
    AlphabetSpec,
    JointTable,
    entropy_of_array,
    is_mrf,
    local_deviation,
    marginal_array,
    MrfVerdict,
)
from .errors import IllDefinedPotentialError, InvariantViolation, MrfLumpError, NotMRFError, VertexError
from .gibbs import (
    DependencyAssignment,
    PotentialFamily,
    assign_cliques,
    constant_on_blocks,
    fit_canonical_potentials,
    synthesize_pmf,
)
from .graph import Graph, clique_key

MAX_MINIMAL_VERTICES = 8
MAX_COMBINATIONS = 10**5


@dataclass(frozen=True, eq=False)
class Lumping:
    """Per-vertex maps ``g_i`` from ``X_i`` onto their images ``Y_i``.

    The output alphabet of each vertex lists the image symbols in order of first
    appearance along the input alphabet, so every ``g_i`` is surjective.
    """

    graph: Graph
    alphabet: AlphabetSpec
    maps: tuple  # one dict symbol -> symbol per vertex
    y_alphabet: AlphabetSpec = field(init=False)
    codes: tuple = field(init=False)

    def __post_init__(self):
        if len(self.maps) != self.graph.n or self.alphabet.n != self.graph.n:
            raise VertexError("lumping, alphabet and graph disagree on the vertex count")
        maps, ys, codes = [], [], []
        for v, (syms, m) in enumerate(zip(self.alphabet.symbols, self.maps), start=1):
            m = {str(k): str(val) for k, val in m.items()}
            missing = [s for s in syms if s not in m]
            if missing:
                raise MrfLumpError(f"g_{v} is undefined on {missing}")
            extra = [s for s in m if s not in syms]
            if extra:
                raise MrfLumpError(f"g_{v} maps unknown symbols {extra}")
            image = list(dict.fromkeys(m[s] for s in syms))
            maps.append(m)
            ys.append(tuple(image))
            codes.append(np.array([image.index(m[s]) for s in syms], dtype=np.intp))
        object.__setattr__(self, "maps", tuple(maps))
        object.__setattr__(self, "y_alphabet", AlphabetSpec(tuple(ys)))
        object.__setattr__(self, "codes", tuple(codes))

    @classmethod
    def identity(cls, graph: Graph, alphabet: AlphabetSpec) -> Lumping:
        return cls(graph, alphabet, tuple({s: s for s in col} for col in alphabet.symbols))

    @classmethod
    def from_codes(cls, graph: Graph, alphabet: AlphabetSpec, codes: Sequence[Sequence[int]]) -> Lumping:
        """Build from integer targets, ``codes[v-1][k]`` being the image of symbol ``k``."""
        maps = tuple(
            {s: str(int(c)) for s, c in zip(col, cs)} for col, cs in zip(alphabet.symbols, codes)
        )
        return cls(graph, alphabet, maps)

    def g(self, v: int, symbol: str) -> str:
        return self.maps[v - 1][str(symbol)]

    def apply(self, config: Sequence[str]) -> tuple:
        return tuple(self.g(v, s) for v, s in enumerate(config, start=1))

    def preimages(self, v: int) -> tuple:
        """For each output symbol of vertex ``v``, the input indices mapped to it."""
        c = self.codes[v - 1]
        return tuple(tuple(int(k) for k in np.nonzero(c == y)[0]) for y in range(len(self.y_alphabet.symbols[v - 1])))

    def is_injective(self, v: int) -> bool:
        return len(self.y_alphabet.symbols[v - 1]) == len(self.alphabet.symbols[v - 1])

    def then(self, other: Lumping) -> Lumping:
        """Apply ``self`` first, then ``other`` (defined on ``self``'s outputs)."""
        if other.alphabet != self.y_alphabet:
            raise MrfLumpError("second lumping must act on the outputs of the first")
        maps = tuple(
            {s: other.g(v, self.g(v, s)) for s in col}
            for v, col in enumerate(self.alphabet.symbols, start=1)
        )
        return Lumping(self.graph, self.alphabet, maps)


def is_nontrivial(lump: Lumping) -> bool:
    return any(not lump.is_injective(v) for v in lump.graph.vertices)


def group_sum(arr: np.ndarray, axis: int, blocks) -> np.ndarray:
    return np.stack([arr.take(list(b), axis=axis).sum(axis=axis) for b in blocks], axis=axis)


def pushforward_array(w: np.ndarray, lump: Lumping, axis_vertices: Sequence[int], which: Iterable[int]) -> np.ndarray:
    """Aggregate the axes of ``w`` (labelled by ``axis_vertices``) whose vertex is in ``which``."""
    which = set(which)
    for ax, v in enumerate(axis_vertices):
        if v in which:
            w = group_sum(w, ax, lump.preimages(v))
    return w


def pushforward(t: JointTable, lump: Lumping) -> JointTable:
    if t.alphabet != lump.alphabet:
        raise MrfLumpError("table and lumping alphabets differ")
    vs = list(lump.graph.vertices)
    return JointTable(lump.y_alphabet, pushforward_array(t.weights, lump, vs, vs))


def mixed_entropy(t: JointTable, lump: Lumping, xs: Iterable[int] = (), ys: Iterable[int] = ()) -> float:
    """Joint entropy ``H(X_xs, Y_ys)`` in bits (``Y_v`` is redundant when ``v`` is in ``xs``)."""
    xs, ys = set(xs), set(ys)
    keep = sorted(xs | ys)
    if not keep:
        return 0.0
    m = marginal_array(t.floats, keep)
    return entropy_of_array(pushforward_array(m, lump, keep, ys - xs))


def mixed_conditional_entropy(t, lump, xs=(), ys=(), given_xs=(), given_ys=()) -> float:
    """``H(X_xs, Y_ys | X_given_xs, Y_given_ys)``."""
    gx, gy = set(given_xs), set(given_ys)
    return mixed_entropy(t, lump, set(xs) | gx, set(ys) | gy) - mixed_entropy(t, lump, gx, gy)


def constant_on_preimages(f: PotentialFamily, lump: Lumping) -> bool:
    """Every clique potential is constant on every preimage ``g^{-1}(y)``."""
    for c, arr in f.potentials.items():
        for ax, v in enumerate(sorted(c)):
            if not constant_on_blocks(arr, ax, lump.preimages(v), f.exact):
                return False
    return True


def _representatives(arr: np.ndarray, members: list, lump: Lumping, axes_vertices: Iterable[int], exact: bool, c):
    for v in axes_vertices:
        ax = members.index(v)
        blocks = lump.preimages(v)
        if not constant_on_blocks(arr, ax, blocks, exact):
            raise IllDefinedPotentialError(
                f"lumped potential on {sorted(c)} is not a function of y_{v}; "
                "the dependency assignment does not satisfy its precondition"
            )
        arr = arr.take([b[0] for b in blocks], axis=ax)
    return arr


def lumped_potentials(f: PotentialFamily, lump: Lumping, d: DependencyAssignment) -> PotentialFamily:
    """Potentials ``U_C`` over the lumped alphabet whose product is ``Z * p_Y``.

    An assigned clique sums its potential over the joint preimage of its vertex
    class; every other clique keeps its potential, read off at any preimage point.
    """
    if not isinstance(d, DependencyAssignment):
        raise MrfLumpError("lumped potentials need a successful dependency assignment")
    owner = {d.clique_of(cls): cls for cls in d.classes}
    cliques = sorted(set(f.potentials) | set(owner), key=clique_key)
    exact = f.exact
    out = {}
    for c in cliques:
        members = sorted(c)
        arr = f.potential(c)
        summed = owner.get(c, frozenset())
        for v in summed:
            arr = group_sum(arr, members.index(v), lump.preimages(v))
        arr = _representatives(arr, members, lump, [v for v in members if v not in summed], exact, c)
        out[c] = arr
    return PotentialFamily(f.graph, lump.y_alphabet, out)


def corollary_potentials(f: PotentialFamily, lump: Lumping, d: DependencyAssignment) -> PotentialFamily:
    """Lumped potentials when every potential is constant on preimages.

    The potential of each assigned clique is multiplied by the size of its class's
    joint preimage; every potential is read off at the first preimage point.
    """
    if not constant_on_preimages(f, lump):
        raise MrfLumpError("potentials are not constant on preimages")
    owner = {d.clique_of(cls): cls for cls in d.classes}
    out = {}
    for c in sorted(set(f.potentials) | set(owner), key=clique_key):
        members = sorted(c)
        arr = f.potential(c)
        for ax, v in enumerate(members):
            arr = arr.take([b[0] for b in lump.preimages(v)], axis=ax)
        if c in owner:
            sizes = np.ones(arr.shape, dtype=np.int64)
            for ax, v in enumerate(members):
                if v in owner[c]:
                    shape = [1] * len(members)
                    shape[ax] = arr.shape[ax]
                    sizes = sizes * np.array([len(b) for b in lump.preimages(v)]).reshape(shape)
            arr = arr * (sizes.astype(object) if exact_arr(arr) else sizes)
        out[c] = arr
    return PotentialFamily(f.graph, lump.y_alphabet, out)


def exact_arr(a: np.ndarray) -> bool:
    return a.dtype == object


def _local_ok(t: JointTable, i: int, nb, tol: float) -> bool:
    dev, _ = local_deviation(t, i, nb)
    return dev == 0 if t.exact else float(dev) <= tol


def minimal_neighborhoods(t: JointTable, i: int, tol: float = DEFAULT_TOL) -> list:
    """Inclusion-minimal sets ``S`` with ``X_i`` independent of the rest given ``X_S``.

    Admissible sets are closed under supersets (weak union), so supersets of a
    found minimal set are never tested.
    """
    others = [v for v in range(1, t.n + 1) if v != i]
    found = []
    for r in range(len(others) + 1):
        for S in combinations(others, r):
            S = frozenset(S)
            if any(m <= S for m in found):
                continue
            if _local_ok(t, i, S, tol):
                found.append(S)
    return found


def _graph_key(g: Graph):
    return (len(g.edges), g.sorted_edges())


def minimal_graphs(t: JointTable, tol: float = DEFAULT_TOL) -> list:
    """All inclusion-minimal graphs on which ``t`` is an MRF, canonically sorted.

    A graph is an MRF graph iff each vertex's neighbourhood contains one of its
    minimal admissible neighbourhoods; every minimal graph is the symmetric closure
    of one such choice per vertex.
    """
    n = t.n
    if n > MAX_MINIMAL_VERTICES:
        raise MrfLumpError(f"minimal-graph search is capped at {MAX_MINIMAL_VERTICES} vertices")
    choices = [minimal_neighborhoods(t, i, tol) for i in range(1, n + 1)]
    total = 1
    for c in choices:
        total *= len(c)
    if total > MAX_COMBINATIONS:
        raise MrfLumpError(f"{total} neighbourhood combinations exceed the cap {MAX_COMBINATIONS}")
    candidates = set()
    for pick in product(*choices):
        edges = frozenset((min(i, j), max(i, j)) for i, S in enumerate(pick, start=1) for j in S)
        candidates.add(edges)
    minimal = [e for e in candidates if not any(o < e for o in candidates)]
    graphs = [Graph(n, e) for e in minimal]
    graphs.sort(key=_graph_key)
    return graphs


@dataclass(frozen=True, eq=False)
class LumpabilityReport:
    is_lumpable: bool
    certificate: str  # "allequal" | "prop1" | "prop2" | "none"
    lumped_potentials: PotentialFamily | None = None
    minimal_graphs: list | None = None
    lumped_verdict: MrfVerdict | None = None
    family_source: str | None = None  # "supplied" | "canonical" | None
    assignment: object = None  # DependencyAssignment | AssignmentFailure | None
    note: str = ""


def check_lumpable(
    t: JointTable,
    lump: Lumping,
    family: PotentialFamily | None = None,
    tol: float = DEFAULT_TOL,
    find_minimal: bool = True,
) -> LumpabilityReport:
    """Brute-force lumpability verdict plus the first sufficient condition that fires.

    Conditions are tried cheapest first: potentials constant on preimages, then the
    at-most-one-strict-clique assignment, then the conditional-entropy condition.
    Without a supplied family, positive tables are tried with their canonical family.
    """
    from .info import prop2_condition

    g = lump.graph
    p_y = pushforward(t, lump)
    verdict = is_mrf(p_y, g, tol=tol)
    x_is_mrf = is_mrf(t, g, tol=tol).holds
    notes = []
    source = None
    if family is not None:
        if not synthesize_pmf(family).same_as(t, tol):
            raise MrfLumpError("supplied potential family does not represent the table")
        source = "supplied"
    elif t.is_positive():
        try:
            family = fit_canonical_potentials(t, g, tol)
            source = "canonical"
        except NotMRFError as exc:
            notes.append(f"no canonical family: {exc}")
    else:
        notes.append("table not strictly positive; potential conditions not applicable")

    certificate = "none"
    U = None
    d = None
    if family is not None:
        d = assign_cliques(family, lump)
        if constant_on_preimages(family, lump):
            certificate = "allequal"
        elif d:
            certificate = "prop1"
        elif source == "canonical":
            notes.append("canonical family failed")
        if certificate != "none":
            U = lumped_potentials(family, lump, d)
            if not synthesize_pmf(U).same_as(p_y, tol):
                raise InvariantViolation("lumped potentials do not reproduce the lumped table")
    if certificate == "none" and x_is_mrf:
        holds, _ = prop2_condition(t, lump, g, tol)
        if holds:
            certificate = "prop2"
    if certificate != "none" and not verdict.holds:
        raise InvariantViolation(f"certificate {certificate} fired but the lumped table is not an MRF")
    return LumpabilityReport(
        is_lumpable=verdict.holds,
        certificate=certificate,
        lumped_potentials=U,
        minimal_graphs=minimal_graphs(p_y, tol) if find_minimal else None,
        lumped_verdict=verdict,
        family_source=source,
        assignment=d,
        note="; ".join(notes),
    )

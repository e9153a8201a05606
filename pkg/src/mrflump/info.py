"""Entropy conditions for lumpability and for information-preserving lumpings."""

from __future__ import annotations

from dataclasses import dataclass

from .dist import DEFAULT_TOL, JointTable, entropy, is_mrf, support
from .errors import InvariantViolation, MrfLumpError, NotMRFError
from .gibbs import DependencyAssignment, PotentialFamily, strict_cliques
from .graph import EliminationOrder, Graph, is_chordal, mcs_orderings
from .lump import Lumping, mixed_conditional_entropy, mixed_entropy


def _require_mrf(t: JointTable, g: Graph, tol: float):
    v = is_mrf(t, g, tol=tol)
    if not v.holds:
        raise NotMRFError(f"table is not an MRF on the graph (witness {v.witness})", offending=v.witness)


def prop2_residuals(t: JointTable, lump: Lumping, g: Graph) -> dict:
    """``H(Y_i|Y_N) - H(Y_i|X_N)`` per vertex; nonnegative up to rounding."""
    out = {}
    for i in g.vertices:
        nb = g.neighbors(i)
        out[i] = mixed_conditional_entropy(t, lump, ys={i}, given_ys=nb) - mixed_conditional_entropy(
            t, lump, ys={i}, given_xs=nb
        )
    return out


def prop2_condition(t: JointTable, lump: Lumping, g: Graph, tol: float = DEFAULT_TOL):
    """Whether ``H(Y_i|Y_N) = H(Y_i|X_N)`` holds at every vertex, with the residuals.

    When it holds, the lumped field is an MRF on ``g``.
    """
    _require_mrf(t, g, tol)
    res = prop2_residuals(t, lump, g)
    return all(r <= tol for r in res.values()), res


def strict_cliques_are_singletons(f: PotentialFamily, lump: Lumping) -> bool:
    """Whether every potential that strictly depends on some ``x_i`` is the singleton ``{i}``."""
    return all(len(c) == 1 for i in f.graph.vertices for c in strict_cliques(f, lump, i))


def prop3_check(f: PotentialFamily, lump: Lumping, d: DependencyAssignment, t: JointTable, tol: float = DEFAULT_TOL):
    """``(injective, residuals)`` for ``H(Y_i|Y_N) = H(Y_i|X_N)`` under an injective ``C'``.

    ``residuals`` is ``None`` when the assignment is not injective. Injectivity alone
    does not force the equalities: a clique assigned to a neighbour ``j`` may carry
    ``x_j`` into the conditional of ``Y_i``. When every strictly dependent potential is
    a singleton the equalities do hold, and a residual above ``tol`` then raises
    ``InvariantViolation``.
    """
    if not isinstance(d, DependencyAssignment):
        raise MrfLumpError("prop3_check needs a successful dependency assignment")
    if f.alphabet != t.alphabet or f.graph != lump.graph:
        raise MrfLumpError("family, lumping and table are inconsistent")
    if not d.is_injective():
        return False, None
    res = prop2_residuals(t, lump, f.graph)
    bad = {i: r for i, r in res.items() if abs(r) > tol}
    if bad and strict_cliques_are_singletons(f, lump):
        raise InvariantViolation(f"singleton strict potentials but entropy residuals {bad}")
    return True, res


def _injective_on_support(t: JointTable, lump: Lumping) -> bool:
    seen = set()
    for x in support(t):
        y = lump.apply(x)
        if y in seen:
            return False
        seen.add(y)
    return True


def is_information_preserving(t: JointTable, lump: Lumping, tol: float = DEFAULT_TOL):
    """``(preserving, H(X|Y))``; cross-checked against injectivity of ``g`` on the support."""
    vs = list(range(1, t.n + 1))
    h_x = entropy(t, vs)
    h_y = mixed_entropy(t, lump, ys=vs)
    residual = h_x - h_y
    preserving = residual <= tol
    if preserving != _injective_on_support(t, lump):
        raise InvariantViolation(f"H(X|Y) = {residual} disagrees with the support injectivity test")
    return preserving, residual


def necessary_residuals(t: JointTable, lump: Lumping, g: Graph, tol: float = DEFAULT_TOL) -> dict:
    """``H(X_i | Y_i, X_N)`` per vertex; all vanish whenever the lumping preserves information."""
    _require_mrf(t, g, tol)
    return {
        i: mixed_conditional_entropy(t, lump, xs={i}, given_xs=g.neighbors(i), given_ys={i})
        for i in g.vertices
    }


necessary_condition = necessary_residuals


def chordal_entropy_decomposition(
    t: JointTable, g: Graph, order: EliminationOrder, tol: float = DEFAULT_TOL, check_mrf: bool = True
) -> float:
    """``sum_i H(X_{v_i} | X_{A_{v_i}})``; equals ``H(X)`` for an MRF on a chordal graph.

    Raises ``InvariantViolation`` when the sum and ``H(X)`` differ by more than ``tol``.
    ``check_mrf=False`` skips the MRF precondition for callers that verified it.
    """
    if not order.is_valid_for(g) or not order.is_perfect(g):
        raise MrfLumpError(f"{order.permutation} is not a perfect elimination order of the graph")
    if check_mrf:
        _require_mrf(t, g, tol)
    total = 0.0
    for v, A in zip(order.permutation, order.prior_neighbor_sets):
        total += entropy(t, A | {v}) - (entropy(t, A) if A else 0.0)
    h = entropy(t, range(1, t.n + 1))
    if abs(total - h) > tol:
        raise InvariantViolation(f"chordal decomposition {total} != H(X) = {h} for order {order.permutation}")
    return total


def sufficient_terms(t: JointTable, lump: Lumping, order: EliminationOrder) -> list:
    """``H(X_{v_i} | Y_{v_i}, X_{A_{v_i}})`` along ``order``."""
    return [
        mixed_conditional_entropy(t, lump, xs={v}, given_xs=A, given_ys={v})
        for v, A in zip(order.permutation, order.prior_neighbor_sets)
    ]


def sufficient_condition_chordal(t: JointTable, lump: Lumping, g: Graph, tol: float = DEFAULT_TOL):
    """First MCS ordering whose every sufficient term vanishes, or ``None``.

    Every ordering is first checked against the chordal entropy decomposition. A
    returned witness implies the lumping preserves information (asserted).
    """
    _require_mrf(t, g, tol)
    for order in mcs_orderings(g, all=True):
        chordal_entropy_decomposition(t, g, order, tol, check_mrf=False)
        if all(r <= tol for r in sufficient_terms(t, lump, order)):
            preserving, residual = is_information_preserving(t, lump, tol)
            if not preserving:
                raise InvariantViolation(f"witness {order.permutation} but H(X|Y) = {residual}")
            return order
    return None


def proof_chain_prop2(t: JointTable, lump: Lumping, g: Graph, tol: float = DEFAULT_TOL) -> dict:
    """Per vertex ``(H(Y_i|X_N), H(Y_i|Y_rest), H(Y_i|Y_N))``, asserted nondecreasing.

    Also asserts ``H(Y_i|X_N) = H(Y_i|X_rest)``.
    """
    _require_mrf(t, g, tol)
    out = {}
    for i in g.vertices:
        nb = g.neighbors(i)
        rest = set(g.vertices) - {i}
        a = mixed_conditional_entropy(t, lump, ys={i}, given_xs=nb)
        a_full = mixed_conditional_entropy(t, lump, ys={i}, given_xs=rest)
        b = mixed_conditional_entropy(t, lump, ys={i}, given_ys=rest)
        c = mixed_conditional_entropy(t, lump, ys={i}, given_ys=nb)
        if abs(a - a_full) > tol or a > b + tol or b > c + tol:
            raise InvariantViolation(f"entropy chain broken at vertex {i}: {a_full}, {a}, {b}, {c}")
        out[i] = (a, b, c)
    return out


@dataclass(frozen=True)
class InfoReport:
    preserving: bool
    residual: float  # H(X|Y) in bits
    necessary_residuals: dict | None
    sufficient_witness: EliminationOrder | None
    prop2_residuals: dict | None
    chordal: bool = False
    note: str = ""


def analyze_information(t: JointTable, lump: Lumping, g: Graph | None = None, tol: float = DEFAULT_TOL) -> InfoReport:
    g = g or lump.graph
    preserving, residual = is_information_preserving(t, lump, tol)
    if not is_mrf(t, g, tol=tol).holds:
        return InfoReport(preserving, residual, None, None, None, note="table is not an MRF on the graph")
    chordal, _ = is_chordal(g)
    witness = sufficient_condition_chordal(t, lump, g, tol) if chordal else None
    return InfoReport(
        preserving=preserving,
        residual=residual,
        necessary_residuals=necessary_residuals(t, lump, g, tol),
        sufficient_witness=witness,
        prop2_residuals=prop2_residuals(t, lump, g),
        chordal=chordal,
    )

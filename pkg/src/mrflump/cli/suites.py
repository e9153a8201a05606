"""Per-instance property checks run by ``random-suite``."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..dist import DEFAULT_TOL, entropy, is_mrf
from ..errors import MrfLumpError
from ..gibbs import (
    DependencyAssignment,
    assign_cliques,
    fit_canonical_potentials,
    partition_function,
    synthesize_pmf,
    unnormalized,
)
from ..graph import is_chordal, mcs_orderings
from ..info import (
    chordal_entropy_decomposition,
    is_information_preserving,
    necessary_residuals,
    prop2_condition,
    prop3_check,
    sufficient_condition_chordal,
)
from ..lump import lumped_potentials, pushforward
from .instance import Instance


@dataclass
class SuiteResult:
    counts: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)

    def fail(self, inst: Instance, message: str):
        self.failures.append(f"{inst.name}: {message}")

    def merge(self, other: SuiteResult):
        self.counts.update(other.counts)
        self.failures.extend(other.failures)


def check_prop1(inst: Instance, tol: float = DEFAULT_TOL) -> SuiteResult:
    """Lumped potentials reproduce ``Z * p_Y`` and the lumped table is an MRF."""
    res = SuiteResult()
    f, lump = inst.family, inst.lumping
    t = synthesize_pmf(f)
    d = assign_cliques(f, lump)
    if not isinstance(d, DependencyAssignment):
        res.fail(inst, f"assignment failed: {d.offenders}")
        return res
    U = lumped_potentials(f, lump, d)
    z = partition_function(f)
    p_y = pushforward(t, lump)
    prod_u = unnormalized(U)
    target = p_y.weights * z
    if f.exact:
        ok = bool(np.array_equal(prod_u, target))
    else:
        ok = bool(np.allclose(prod_u, target.astype(float), rtol=tol, atol=0))
    if not ok:
        res.fail(inst, "product of lumped potentials differs from Z * p_Y")
    if not is_mrf(p_y, inst.graph, tol=tol).holds:
        res.fail(inst, "lumped table is not an MRF on the graph")
    res.counts["prop1"] += 1
    if d.is_injective():
        try:
            _, r = prop3_check(f, lump, d, t, tol)
        except MrfLumpError as exc:
            res.fail(inst, f"prop3: {exc}")
        else:
            res.counts["prop3_injective"] += 1
            bad = {i: v for i, v in r.items() if abs(v) > tol}
            if bad:
                res.fail(inst, f"prop3: injective C' but H(Y_i|Y_N) - H(Y_i|X_N) = {bad}")
    return res


def check_generic(inst: Instance, tol: float = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult()
    t, lump, g = inst.distribution, inst.lumping, inst.graph
    a = is_mrf(t, g, "definition", tol).holds
    b = is_mrf(t, g, "entropy", tol).holds
    if a != b:
        res.fail(inst, "definition and entropy MRF checks disagree")
    res.counts["mrf_methods"] += 1
    if not a:
        return res
    p_y = pushforward(t, lump)
    holds, _ = prop2_condition(t, lump, g, tol)
    if holds:
        res.counts["prop2_fired"] += 1
        if not is_mrf(p_y, g, tol=tol).holds:
            res.fail(inst, "prop2 condition held but the lumped table is not an MRF")
    preserving, _ = is_information_preserving(t, lump, tol)
    if preserving:
        res.counts["preserving"] += 1
        bad = {i: r for i, r in necessary_residuals(t, lump, g, tol).items() if r > tol}
        if bad:
            res.fail(inst, f"preserving but necessary residuals {bad}")
    vs = range(1, t.n + 1)
    if entropy(p_y, vs) > entropy(t, vs) + tol:
        res.fail(inst, "H(Y) > H(X)")
    return res


def check_chordal(inst: Instance, tol: float = DEFAULT_TOL) -> SuiteResult:
    res = check_generic(inst, tol)
    t, lump, g = inst.distribution, inst.lumping, inst.graph
    if not is_chordal(g)[0]:
        res.fail(inst, "chordal profile produced a non-chordal graph")
        return res
    if not is_mrf(t, g, tol=tol).holds:
        res.fail(inst, "chordal profile produced a table that is not an MRF on its graph")
        return res
    try:
        for order in mcs_orderings(g, all=True):
            chordal_entropy_decomposition(t, g, order, tol, check_mrf=False)
            res.counts["lemma3_orders"] += 1
        w = sufficient_condition_chordal(t, lump, g, tol)
        if w is not None:
            res.counts["sufficient_witness"] += 1
    except MrfLumpError as exc:
        res.fail(inst, str(exc))
    return res


def check_hc_roundtrip(inst: Instance, tol: float = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult()
    t = synthesize_pmf(inst.family)
    fam = fit_canonical_potentials(t, inst.graph, tol)
    back = synthesize_pmf(fam)
    if not back.same_as(t, tol):
        res.fail(inst, "canonical potentials do not reproduce the table")
    res.counts["hc_roundtrip"] += 1
    return res


CHECKS = {
    "generic": [check_generic],
    "prop1": [check_prop1, check_hc_roundtrip],
    "chordal": [check_chordal],
}


def run_checks(inst: Instance, profile: str, tol: float = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult()
    for check in CHECKS[profile]:
        try:
            res.merge(check(inst, tol))
        except MrfLumpError as exc:
            res.fail(inst, f"{check.__name__}: {exc}")
    return res

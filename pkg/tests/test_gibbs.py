from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from mrflump import (
    AlphabetSpec,
    AssignmentFailure,
    DependencyAssignment,
    Graph,
    JointTable,
    Lumping,
    PotentialFamily,
    assign_cliques,
    depends_only_via,
    fit_canonical_potentials,
    is_mrf,
    partition_function,
    synthesize_pmf,
)
from mrflump.cli import fixtures
from mrflump.errors import MrfLumpError, NotMRFError
from mrflump.gibbs import canonical_log_potential, canonical_potential_exact, nonclique_interactions, unnormalized

from . import oracles
from .conftest import random_family, random_graph, random_table


def test_family_validation():
    g, a = Graph.path(3), AlphabetSpec.uniform(3, 2)
    with pytest.raises(MrfLumpError, match="not a clique"):
        PotentialFamily(g, a, {frozenset({1, 3}): np.ones((2, 2))})
    with pytest.raises(MrfLumpError, match="strictly positive"):
        PotentialFamily(g, a, {frozenset({1}): np.array([1.0, 0.0])})
    with pytest.raises(MrfLumpError, match="shape"):
        PotentialFamily(g, a, {frozenset({1}): np.ones(3)})


def test_missing_potentials_are_one():
    f = PotentialFamily(Graph.path(2), AlphabetSpec.uniform(2, 2), {})
    assert partition_function(f) == 4
    assert synthesize_pmf(f).weights.tolist() == [[F(1, 4)] * 2] * 2


def test_example4_partition_function():
    # Z = sum_x psi1(x1) psi2(x2) psi3(x3) (1 + [x1 = x2 mod 2]) (1 + [x2 = x3 mod 2])
    f = fixtures.example4().family
    z = 0
    for x in product(range(3), repeat=3):
        z += (x[0] + 1) * (x[1] + 1) ** 2 * (3, 1, 2)[x[2]] * (1 + (x[0] % 2 == x[1] % 2)) * (1 + (x[1] % 2 == x[2] % 2))
    assert partition_function(f) == z


def test_synthesized_tables_are_positive_mrfs(rng):
    for _ in range(40):
        f = random_family(rng)
        t = synthesize_pmf(f)
        assert t.is_positive()
        assert sum(t.weights.flat) == 1
        assert is_mrf(t, f.graph).holds


def test_scaling_leaves_distribution_unchanged(rng):
    for _ in range(10):
        f = random_family(rng)
        c = f.graph.cliques[-1]
        assert synthesize_pmf(f.scaled(c, F(7, 3))).same_as(synthesize_pmf(f))


def test_canonical_log_potential_matches_moebius_oracle(rng):
    for _ in range(10):
        t = random_table(rng, (2, 3, 2), exact=True)
        p = oracles.as_dict(t.weights, t.alphabet.cards)
        for A in [(1,), (1, 2), (1, 3), (1, 2, 3)]:
            q = canonical_log_potential(t, A)
            ref = oracles.canonical_log_potential(p, t.alphabet.cards, A)
            for idx, v in ref.items():
                assert q[idx] == pytest.approx(v, abs=1e-9)
            psi = canonical_potential_exact(t, A)
            assert np.allclose(np.log2(psi.astype(float)), q, atol=1e-9)


def test_canonical_potential_is_one_at_reference(rng):
    t = random_table(rng, (3, 2, 2))
    for A in [(1, 2), (2, 3), (1, 2, 3)]:
        psi = canonical_potential_exact(t, A)
        for idx in np.ndindex(psi.shape):
            if 0 in idx:
                assert psi[idx] == 1


def test_round_trip_exact(rng):
    for _ in range(25):
        f = random_family(rng)
        t = synthesize_pmf(f)
        back = synthesize_pmf(fit_canonical_potentials(t, f.graph))
        assert back.same_as(t)


def test_round_trip_float(rng):
    for _ in range(10):
        f = random_family(rng, exact=False)
        t = synthesize_pmf(f)
        assert synthesize_pmf(fit_canonical_potentials(t, f.graph)).same_as(t, 1e-9)


def test_nonclique_interactions_vanish_iff_mrf(rng):
    for _ in range(25):
        f = random_family(rng)
        t = synthesize_pmf(f)
        other = random_graph(rng, f.graph.n)
        vanish = all(v == 0 for v in nonclique_interactions(t, other).values())
        assert vanish == is_mrf(t, other).holds


def test_fit_on_wrong_graph_names_a_set():
    t = synthesize_pmf(fixtures.example4().family)
    with pytest.raises(NotMRFError) as err:
        fit_canonical_potentials(t, Graph.empty(3))
    assert err.value.offending == frozenset({1, 2})


def test_fit_needs_positive_table():
    with pytest.raises(MrfLumpError):
        fit_canonical_potentials(fixtures.example3().table, Graph.path(3))


def test_only_via_on_example4():
    inst = fixtures.example4()
    f, lump = inst.family, inst.lumping
    assert not depends_only_via(f, {2}, 2, lump)
    assert depends_only_via(f, {1, 2}, 1, lump) and depends_only_via(f, {1, 2}, 2, lump)
    d = assign_cliques(f, lump)
    assert isinstance(d, DependencyAssignment)
    assert d.assignment == {v: frozenset({v}) for v in (1, 2, 3)}
    assert d.is_injective() and d.L == 3


def test_rewrite_breaks_assignment_at_vertex_two():
    rw = fixtures.example4_rewrite()
    assert synthesize_pmf(rw.family).same_as(synthesize_pmf(fixtures.example4().family))
    d = assign_cliques(rw.family, rw.lumping)
    assert isinstance(d, AssignmentFailure) and not d
    assert d.offenders == {2: (frozenset({1, 2}), frozenset({2, 3}))}


def test_injective_lumping_assigns_smallest_clique(rng):
    f = random_family(rng, n=3)
    d = assign_cliques(f, Lumping.identity(f.graph, f.alphabet))
    assert d.assignment == {v: frozenset({v}) for v in f.graph.vertices}


def test_projection_property(rng):
    # only-via at two members means constant on the joint preimage blocks
    from mrflump.cli.generate import random_instance

    for seed in range(40):
        inst = random_instance(seed, "prop1")
        f, lump = inst.family, inst.lumping
        for c, arr in f.potentials.items():
            members = sorted(c)
            ok = [v for v in members if depends_only_via(f, c, v, lump)]
            for a in ok:
                for b in ok:
                    if a >= b:
                        continue
                    ia, ib = members.index(a), members.index(b)
                    for idx in np.ndindex(arr.shape):
                        for xa in lump.preimages(a)[lump.codes[a - 1][idx[ia]]]:
                            for xb in lump.preimages(b)[lump.codes[b - 1][idx[ib]]]:
                                j = list(idx)
                                j[ia], j[ib] = xa, xb
                                assert arr[tuple(j)] == arr[idx]


def test_unnormalized_shape():
    f = fixtures.example4().family
    assert unnormalized(f).shape == (3, 3, 3)
    assert isinstance(synthesize_pmf(f), JointTable)

import math
from fractions import Fraction as F
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given

from mrflump import AlphabetSpec, Graph, JointTable, conditional, conditional_entropy, entropy, is_mrf, marginal, support
from mrflump.cli import fixtures
from mrflump.dist import MAX_STATES, check_state_space, local_cmi
from mrflump.errors import MrfLumpError, StateSpaceError, UndefinedConditionalError, VertexError

from . import oracles
from .conftest import random_graph, random_table, tables


def _uniform(n, k):
    a = AlphabetSpec.uniform(n, k)
    w = np.full(a.cards, F(1, k**n), dtype=object)
    return JointTable(a, w)


def test_exact_table_must_sum_to_one():
    a = AlphabetSpec.uniform(1, 2)
    with pytest.raises(MrfLumpError):
        JointTable(a, np.array([F(1, 2), F(1, 3)], dtype=object))
    with pytest.raises(MrfLumpError):
        JointTable(a, np.array([F(3, 2), F(-1, 2)], dtype=object))


def test_float_table_tolerance():
    a = AlphabetSpec.uniform(1, 2)
    JointTable(a, np.array([0.5, 0.5 + 1e-13]))
    with pytest.raises(MrfLumpError):
        JointTable(a, np.array([0.5, 0.499]))


def test_weights_are_read_only():
    t = _uniform(2, 2)
    with pytest.raises(ValueError):
        t.weights[0, 0] = F(1)


def test_state_space_cap():
    with pytest.raises(StateSpaceError):
        check_state_space([10] * 8)
    check_state_space([10] * 7)
    assert MAX_STATES == 10**7


def test_marginal_and_conditional_of_example3():
    t = fixtures.example3().table
    assert marginal(t, [1]).weights.tolist() == [F(1, 2), F(1, 2)]
    c = conditional(t, [1], [2], ["101"])
    assert c.weights.tolist() == [0, 1]
    c = conditional(t, [1], [2], {2: "011"})
    assert c.weights.tolist() == [1, 0]


def test_conditional_on_zero_probability_event():
    t = fixtures.example3().table
    with pytest.raises(UndefinedConditionalError):
        conditional(t, [2], [1, 3], ["0", "1"]) and conditional(t, [1], [2, 3], ["101", "0"])


def test_conditional_rejects_overlap():
    t = _uniform(2, 2)
    with pytest.raises(VertexError):
        conditional(t, [1], [1], ["0"])


def test_entropy_of_uniform():
    t = _uniform(3, 3)
    assert entropy(t, [1, 2, 3]) == pytest.approx(3 * math.log2(3), abs=1e-12)
    assert conditional_entropy(t, [1], [2]) == pytest.approx(math.log2(3), abs=1e-12)
    assert conditional_entropy(t, [1]) == pytest.approx(math.log2(3), abs=1e-12)


def test_support_of_example3():
    s = support(fixtures.example3().table)
    assert len(s) == 8
    assert all(x[0] == x[1][0] and x[2] == x[1][2] for x in s)


def test_example1_frozen_entropies():
    # values derived by direct summation over the 27 configurations
    t = fixtures.example1().table
    assert entropy(t, [2]) == pytest.approx(1.5, abs=1e-12)
    assert conditional_entropy(t, [1], [2]) == pytest.approx(
        0.25 * 1 + 0.5 * math.log2(3) + 0.25 * (-(0.4 * math.log2(0.4)) - 2 * 0.3 * math.log2(0.3)), abs=1e-12
    )


@given(tables())
def test_entropy_matches_dict_oracle(t):
    p = oracles.as_dict(t.weights, t.alphabet.cards)
    for r in range(1, t.n + 1):
        for A in combinations(range(1, t.n + 1), r):
            assert entropy(t, A) == pytest.approx(oracles.entropy(p, A), abs=1e-9)


@given(tables())
def test_conditioning_reduces_entropy(t):
    vs = list(range(1, t.n + 1))
    for a in vs:
        for b in vs:
            for c in vs:
                if len({a, b, c}) == 3:
                    assert conditional_entropy(t, [a], [b, c]) <= conditional_entropy(t, [a], [b]) + 1e-9


def test_path_chain_is_mrf_on_path_not_on_empty():
    t = fixtures.example1().table
    assert is_mrf(t, Graph.path(3)).holds
    v = is_mrf(t, Graph.empty(3))
    assert not v.holds and v.witness is not None
    assert not is_mrf(t, Graph.empty(3), "entropy").holds


def test_complete_graph_always_mrf(rng):
    for _ in range(20):
        t = random_table(rng, (2, 3, 2), zero_prob=0.3)
        assert is_mrf(t, Graph.complete(3)).holds
        assert is_mrf(t, Graph.complete(3), "entropy").holds


def test_local_cmi_zero_for_independent():
    t = _uniform(3, 2)
    assert local_cmi(t, 1, []) == pytest.approx(0, abs=1e-12)


def test_unknown_method():
    with pytest.raises(ValueError):
        is_mrf(_uniform(2, 2), Graph.path(2), "magic")


@given(tables(max_n=3, max_k=3))
def test_definition_matches_configuration_oracle(t):
    p = oracles.as_dict(t.weights, t.alphabet.cards)
    for g in [Graph.empty(t.n), Graph.path(t.n), Graph.complete(t.n)]:
        assert is_mrf(t, g).holds == oracles.is_mrf(p, t.n, g.edges)


@given(tables(max_n=3, exact=False))
def test_float_methods_agree(t):
    for g in [Graph.empty(t.n), Graph.path(t.n)]:
        assert is_mrf(t, g, "definition").holds == is_mrf(t, g, "entropy").holds


def test_supergraph_monotonicity(rng):
    for _ in range(15):
        n = int(rng.integers(2, 6))
        g = random_graph(rng, n, 0.3)
        t = random_table(rng, (2,) * n, zero_prob=0.2)
        if not is_mrf(t, g).holds:
            continue
        missing = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if (i, j) not in g.edges]
        for r in range(1, len(missing) + 1):
            for extra in combinations(missing, r):
                assert is_mrf(t, g.with_edges(g.edges | set(extra))).holds


def test_exact_and_float_views_agree():
    t = fixtures.example1().table
    f = t.as_float()
    assert f.mode == "float" and t.mode == "exact"
    assert t.same_as(f)
    back = f.as_exact()
    # exact comparison is exact: the float's binary rationals are not 3/80
    assert not back.same_as(t)
    assert back.as_float().same_as(f, 1e-15)

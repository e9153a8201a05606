from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from mrflump import AlphabetSpec, Graph, JointTable, Lumping, PotentialFamily

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_table(rng, cards, zero_prob=0.0, exact=True) -> JointTable:
    """Uniformly random integer weights in 1..5, some zeroed, normalized."""
    while True:
        w = rng.integers(1, 6, size=cards)
        if zero_prob:
            w = np.where(rng.random(cards) < zero_prob, 0, w)
        if w.sum() > 0:
            break
    alpha = AlphabetSpec(tuple(tuple(str(s) for s in range(k)) for k in cards))
    if exact:
        arr = np.empty(cards, dtype=object)
        arr.flat[:] = [Fraction(int(v)) for v in w.flat]
        return JointTable.from_unnormalized(alpha, arr)
    return JointTable.from_unnormalized(alpha, w.astype(float))


def random_graph(rng, n, p=0.5) -> Graph:
    return Graph(n, frozenset((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < p))


def random_family(rng, n=None, exact=True):
    n = n or int(rng.integers(2, 5))
    g = random_graph(rng, n)
    alpha = AlphabetSpec(tuple(tuple(str(s) for s in range(int(rng.integers(2, 4)))) for _ in range(n)))
    pots = {}
    for c in g.cliques:
        if rng.random() < 0.7:
            shape = tuple(alpha.cards[v - 1] for v in sorted(c))
            vals = rng.integers(1, 6, size=shape)
            if exact:
                arr = np.empty(shape, dtype=object)
                arr.flat[:] = [Fraction(int(v)) for v in vals.flat]
            else:
                arr = vals.astype(float)
            pots[c] = arr
    return PotentialFamily(g, alpha, pots)


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, frozenset(chosen))


@st.composite
def tables(draw, max_n=3, max_k=3, exact=True, positive=False):
    n = draw(st.integers(1, max_n))
    cards = tuple(draw(st.integers(1, max_k)) for _ in range(n))
    size = int(np.prod(cards))
    lo = 1 if positive else 0
    vals = draw(st.lists(st.integers(lo, 4), min_size=size, max_size=size).filter(lambda v: sum(v) > 0))
    alpha = AlphabetSpec(tuple(tuple(str(s) for s in range(k)) for k in cards))
    if exact:
        arr = np.empty(cards, dtype=object)
        arr.flat[:] = [Fraction(v) for v in vals]
    else:
        arr = np.array(vals, dtype=float).reshape(cards)
    return JointTable.from_unnormalized(alpha, arr)


@st.composite
def lumpings_for(draw, t: JointTable, g: Graph | None = None):
    g = g or Graph.empty(t.n)
    codes = []
    for k in t.alphabet.cards:
        codes.append([draw(st.integers(0, k - 1)) for _ in range(k)])
    return Lumping.from_codes(g, t.alphabet, codes)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance reporting: one line per criterion in the terminal summary

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _CRITERIA[num] = (title, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")

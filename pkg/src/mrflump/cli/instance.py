"""Instance files: a graph, named variables, a table or potential family, and a lumping."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from ..dist import AlphabetSpec, JointTable
from ..errors import MrfLumpError
from ..gibbs import PotentialFamily, synthesize_pmf
from ..graph import Graph
from ..lump import Lumping

SUM_TOL = 1e-9


class InstanceError(MrfLumpError):
    """Invalid instance document. ``code`` is one of the constants below."""

    JSON_SYNTAX = "JSON_SYNTAX"
    SCHEMA = "SCHEMA"
    PROB_SUM = "PROB_SUM"
    NEGATIVE_PROB = "NEGATIVE_PROB"
    NONPOSITIVE_POTENTIAL = "NONPOSITIVE_POTENTIAL"
    DANGLING_VERTEX = "DANGLING_VERTEX"
    PARTIAL_MAP = "PARTIAL_MAP"
    UNKNOWN_SYMBOL = "UNKNOWN_SYMBOL"
    DUPLICATE_ENTRY = "DUPLICATE_ENTRY"
    NOT_CLIQUE = "NOT_CLIQUE"

    def __init__(self, code: str, message: str, where: str = ""):
        self.code = code
        self.where = where
        super().__init__(f"{code}: {message}" + (f" (at {where})" if where else ""))


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    graph: Graph
    alphabet: AlphabetSpec
    variable_names: tuple
    table: JointTable | None = None
    family: PotentialFamily | None = None
    lumping: Lumping | None = None
    seed: int | None = None

    @property
    def distribution(self) -> JointTable:
        if self.table is not None:
            return self.table
        return synthesize_pmf(self.family)

    @property
    def source(self) -> str:
        return "table" if self.table is not None else "gibbs"

    def lumping_or_identity(self) -> Lumping:
        return self.lumping or Lumping.identity(self.graph, self.alphabet)


# -- parsing -------------------------------------------------------------------------


def _number(value, where: str):
    if isinstance(value, bool):
        raise InstanceError(InstanceError.SCHEMA, f"expected a number, got {value!r}", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(InstanceError.SCHEMA, f"cannot parse number {value!r}", where) from None
    raise InstanceError(InstanceError.SCHEMA, f"expected a number, got {value!r}", where)


def _require(doc, key, kind, where):
    if not isinstance(doc, dict) or key not in doc:
        raise InstanceError(InstanceError.SCHEMA, f"missing key {key!r}", where)
    val = doc[key]
    if not isinstance(val, kind):
        raise InstanceError(InstanceError.SCHEMA, f"{key!r} has the wrong type", f"{where}.{key}" if where else key)
    return val


def _vertex(idx, n, where):
    if isinstance(idx, bool) or not isinstance(idx, int) or not 0 <= idx < n:
        raise InstanceError(InstanceError.DANGLING_VERTEX, f"no variable with index {idx!r}", where)
    return idx + 1


def _finish(values: list, rational: bool):
    """Choose the arithmetic: floats if any value is a float, unless ``rational``."""
    if rational:
        return [Fraction(repr(v)) if isinstance(v, float) else v for v in values], True
    if any(isinstance(v, float) for v in values):
        return [float(v) for v in values], False
    return values, True


def _config_index(alphabet: AlphabetSpec, members: list, x, where: str):
    if not isinstance(x, list) or len(x) != len(members):
        raise InstanceError(InstanceError.SCHEMA, f"configuration must list {len(members)} symbols", where)
    idx = []
    for v, s in zip(members, x):
        s = str(s)
        if s not in alphabet.symbols[v - 1]:
            raise InstanceError(InstanceError.UNKNOWN_SYMBOL, f"{s!r} is not in the alphabet of variable {v - 1}", where)
        idx.append(alphabet.index(v, s))
    return tuple(idx)


def instance_from_dict(doc: dict, rational: bool = False) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError(InstanceError.SCHEMA, "top level must be an object")
    name = _require(doc, "name", str, "")
    variables = _require(doc, "variables", list, "")
    if not variables:
        raise InstanceError(InstanceError.SCHEMA, "at least one variable is required", "variables")
    names, symbols = [], []
    for k, var in enumerate(variables):
        where = f"variables[{k}]"
        names.append(_require(var, "name", str, where))
        alpha = _require(var, "alphabet", list, where)
        col = [str(s) for s in alpha]
        if not col or len(set(col)) != len(col):
            raise InstanceError(InstanceError.SCHEMA, "alphabet must be nonempty with distinct symbols", where)
        symbols.append(tuple(col))
    if len(set(names)) != len(names):
        raise InstanceError(InstanceError.SCHEMA, "variable names must be distinct", "variables")
    n = len(names)
    alphabet = AlphabetSpec(tuple(symbols))
    edges = set()
    for k, e in enumerate(doc.get("edges", [])):
        where = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 2:
            raise InstanceError(InstanceError.SCHEMA, "an edge is a pair of variable indices", where)
        i, j = (_vertex(v, n, where) for v in e)
        if i == j:
            raise InstanceError(InstanceError.SCHEMA, "self-loops are not allowed", where)
        edges.add((min(i, j), max(i, j)))
    graph = Graph(n, frozenset(edges))

    dist = _require(doc, "distribution", dict, "")
    kind = dist.get("type")
    table = family = None
    if kind == "table":
        table = _parse_table(dist, alphabet, rational)
    elif kind == "gibbs":
        family = _parse_gibbs(dist, graph, alphabet, rational)
    else:
        raise InstanceError(InstanceError.SCHEMA, f"distribution type must be 'table' or 'gibbs', got {kind!r}", "distribution.type")

    lumping = None
    if "lumping" in doc:
        lumping = _parse_lumping(doc["lumping"], graph, alphabet)
    return Instance(name, graph, alphabet, tuple(names), table, family, lumping, doc.get("seed"))


def _parse_table(dist, alphabet, rational):
    entries = _require(dist, "entries", list, "distribution")
    members = list(range(1, alphabet.n + 1))
    idxs, values = [], []
    for k, ent in enumerate(entries):
        where = f"distribution.entries[{k}]"
        idx = _config_index(alphabet, members, _require(ent, "x", list, where), where)
        if idx in idxs:
            raise InstanceError(InstanceError.DUPLICATE_ENTRY, "configuration listed twice", where)
        if "p" not in ent:
            raise InstanceError(InstanceError.SCHEMA, "missing key 'p'", where)
        p = _number(ent["p"], where + ".p")
        if p < 0:
            raise InstanceError(InstanceError.NEGATIVE_PROB, f"negative probability {p}", where)
        idxs.append(idx)
        values.append(p)
    # float inputs are approximate in either mode: tolerate and renormalize
    approx = any(isinstance(v, float) for v in values)
    values, exact = _finish(values, rational)
    w = np.full(alphabet.cards, Fraction(0), dtype=object) if exact else np.zeros(alphabet.cards)
    for idx, p in zip(idxs, values):
        w[idx] = p
    total = sum(w.flat, Fraction(0)) if exact else float(w.sum())
    if (not approx and total != 1) or (approx and abs(float(total) - 1.0) > SUM_TOL):
        raise InstanceError(InstanceError.PROB_SUM, f"probabilities sum to {total}, not 1", "distribution.entries")
    return JointTable(alphabet, w / total)


def _parse_gibbs(dist, graph, alphabet, rational):
    pots = _require(dist, "potentials", list, "distribution")
    raw = {}
    for k, pot in enumerate(pots):
        where = f"distribution.potentials[{k}]"
        clique = [_vertex(v, graph.n, where + ".clique") for v in _require(pot, "clique", list, where)]
        if not clique or len(set(clique)) != len(clique) or not graph.is_clique(clique):
            raise InstanceError(InstanceError.NOT_CLIQUE, f"{[v - 1 for v in clique]} is not a clique of the graph", where)
        c = frozenset(clique)
        if c in raw:
            raise InstanceError(InstanceError.DUPLICATE_ENTRY, "clique listed twice", where)
        members = sorted(c)
        order = [clique.index(v) for v in members]
        vals = {}
        for e, ent in enumerate(_require(pot, "table", list, where)):
            ew = f"{where}.table[{e}]"
            x = _require(ent, "x", list, ew)
            if len(x) == len(clique):
                x = [x[o] for o in order]
            idx = _config_index(alphabet, members, x, ew)
            if idx in vals:
                raise InstanceError(InstanceError.DUPLICATE_ENTRY, "configuration listed twice", ew)
            if "value" not in ent:
                raise InstanceError(InstanceError.SCHEMA, "missing key 'value'", ew)
            val = _number(ent["value"], ew + ".value")
            if val <= 0:
                raise InstanceError(InstanceError.NONPOSITIVE_POTENTIAL, f"potential value {val} is not positive", ew)
            vals[idx] = val
        raw[c] = (members, vals)
    flat = [v for _, vals in raw.values() for v in vals.values()]
    _, exact = _finish(flat, rational)
    out = {}
    for c, (members, vals) in raw.items():
        shape = tuple(alphabet.cards[v - 1] for v in members)
        arr = np.full(shape, Fraction(1), dtype=object) if exact else np.ones(shape)
        for idx, v in vals.items():
            if exact:
                arr[idx] = Fraction(repr(v)) if isinstance(v, float) else v
            else:
                arr[idx] = float(v)
        out[c] = arr
    return PotentialFamily(graph, alphabet, out)


def _parse_lumping(spec, graph, alphabet):
    if not isinstance(spec, list):
        raise InstanceError(InstanceError.SCHEMA, "lumping must be a list", "lumping")
    maps = [{s: s for s in col} for col in alphabet.symbols]
    seen = set()
    for k, ent in enumerate(spec):
        where = f"lumping[{k}]"
        v = _vertex(_require(ent, "vertex", int, where), graph.n, where + ".vertex")
        if v in seen:
            raise InstanceError(InstanceError.DUPLICATE_ENTRY, "vertex lumped twice", where)
        seen.add(v)
        m = _require(ent, "map", dict, where)
        m = {str(a): str(b) for a, b in m.items()}
        syms = alphabet.symbols[v - 1]
        unknown = [s for s in m if s not in syms]
        if unknown:
            raise InstanceError(InstanceError.UNKNOWN_SYMBOL, f"map of variable {v - 1} mentions {unknown}", where)
        missing = [s for s in syms if s not in m]
        if missing:
            raise InstanceError(InstanceError.PARTIAL_MAP, f"map of variable {v - 1} misses {missing}", where)
        if "codomain" in ent:
            codomain = [str(s) for s in ent["codomain"]]
            stray = set(m.values()) - set(codomain)
            if stray:
                raise InstanceError(InstanceError.UNKNOWN_SYMBOL, f"images {sorted(stray)} not in codomain", where)
            unused = [s for s in codomain if s not in set(m.values())]
            if unused:
                warnings.warn(f"variable {v - 1}: codomain shrunk to the image; dropped {unused}", stacklevel=2)
        maps[v - 1] = m
    return Lumping(graph, alphabet, tuple(maps))


def parse_instance(path, rational: bool = False) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(InstanceError.SCHEMA, f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(InstanceError.JSON_SYNTAX, exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return instance_from_dict(doc, rational)


# -- serialization -------------------------------------------------------------------


def _value(x):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def instance_to_dict(inst: Instance) -> dict:
    a = inst.alphabet
    doc = {
        "name": inst.name,
        "variables": [{"name": nm, "alphabet": list(col)} for nm, col in zip(inst.variable_names, a.symbols)],
        "edges": [[i - 1, j - 1] for i, j in inst.graph.sorted_edges()],
    }
    if inst.table is not None:
        w = inst.table.weights
        entries = []
        for idx in product(*(range(k) for k in a.cards)):
            p = w[idx]
            if p > 0:
                entries.append({"x": list(a.config(idx)), "p": _value(p)})
        doc["distribution"] = {"type": "table", "entries": entries}
    else:
        pots = []
        for c, arr in inst.family.potentials.items():
            members = sorted(c)
            table = []
            for idx in product(*(range(k) for k in arr.shape)):
                x = [a.symbols[v - 1][k] for v, k in zip(members, idx)]
                table.append({"x": x, "value": _value(arr[idx])})
            pots.append({"clique": [v - 1 for v in members], "table": table})
        doc["distribution"] = {"type": "gibbs", "potentials": pots}
    if inst.lumping is not None:
        doc["lumping"] = [{"vertex": v - 1, "map": dict(m)} for v, m in enumerate(inst.lumping.maps, start=1)]
    if inst.seed is not None:
        doc["seed"] = inst.seed
    return doc


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, ensure_ascii=False) + "\n"


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(serialize_instance(inst), encoding="utf-8")

"""Machine-readable (JSON) and human-readable verdict reports."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from itertools import product

from .. import __version__
from ..dist import MrfVerdict
from ..gibbs import AssignmentFailure, DependencyAssignment, PotentialFamily
from ..graph import Graph
from ..info import InfoReport
from ..lump import LumpabilityReport
from .instance import Instance

SIG_DIGITS = 12


def canonical(obj):
    """Recursively round floats to 12 significant digits and stringify fractions."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        r = float(format(obj, f".{SIG_DIGITS}g"))
        return 0.0 if r == 0 else r
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if hasattr(obj, "item"):
        return canonical(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _names(inst: Instance, vs) -> list:
    return [inst.variable_names[v - 1] for v in sorted(vs)]


def graph_dict(inst: Instance, g: Graph) -> list:
    return [_names(inst, e) for e in g.sorted_edges()]


def verdict_dict(inst: Instance, v: MrfVerdict) -> dict:
    wit = None
    if v.witness is not None:
        wit = {"variable": inst.variable_names[v.witness[0] - 1], "x": list(v.witness[1])}
    return {
        "holds": v.holds,
        "method": v.method,
        "residuals": {inst.variable_names[i - 1]: r for i, r in v.residuals.items()},
        "witness": wit,
    }


def family_dict(inst: Instance, f: PotentialFamily) -> list:
    out = []
    for c, arr in f.potentials.items():
        members = sorted(c)
        rows = []
        for idx in product(*(range(k) for k in arr.shape)):
            x = [f.alphabet.symbols[v - 1][k] for v, k in zip(members, idx)]
            rows.append({"x": x, "value": arr[idx]})
        out.append({"clique": _names(inst, members), "table": rows})
    return out


def assignment_dict(inst: Instance, d) -> dict | None:
    if isinstance(d, DependencyAssignment):
        return {
            "ok": True,
            "clique_of": {inst.variable_names[v - 1]: _names(inst, c) for v, c in sorted(d.assignment.items())},
            "classes": [_names(inst, s) for s in d.classes],
        }
    if isinstance(d, AssignmentFailure):
        return {
            "ok": False,
            "offenders": {inst.variable_names[v - 1]: [_names(inst, c) for c in cs] for v, cs in sorted(d.offenders.items())},
        }
    return None


def lump_dict(inst: Instance, r: LumpabilityReport) -> dict:
    return {
        "is_lumpable": r.is_lumpable,
        "certificate": r.certificate,
        "family_source": r.family_source,
        "assignment": assignment_dict(inst, r.assignment),
        "lumped_potentials": family_dict(inst, r.lumped_potentials) if r.lumped_potentials else None,
        "lumped_mrf": verdict_dict(inst, r.lumped_verdict) if r.lumped_verdict else None,
        "minimal_graphs": [graph_dict(inst, g) for g in r.minimal_graphs] if r.minimal_graphs is not None else None,
        "note": r.note,
    }


def info_dict(inst: Instance, r: InfoReport) -> dict:
    def per_vertex(d):
        return None if d is None else {inst.variable_names[i - 1]: v for i, v in d.items()}

    w = r.sufficient_witness
    return {
        "preserving": r.preserving,
        "residual_bits": r.residual,
        "necessary_residuals": per_vertex(r.necessary_residuals),
        "prop2_residuals": per_vertex(r.prop2_residuals),
        "chordal": r.chordal,
        "sufficient_witness": None if w is None else {
            "order": _names_ordered(inst, w.permutation),
            "prior_neighbors": [_names(inst, a) for a in w.prior_neighbor_sets],
        },
        "note": r.note,
    }


def _names_ordered(inst, vs):
    return [inst.variable_names[v - 1] for v in vs]


def build_report(inst: Instance, lumpability=None, information=None, extra=None, timing=None) -> dict:
    rep = {
        "instance": inst.name,
        "tool_version": __version__,
        "seed": inst.seed,
        "mode": inst.distribution.mode,
        "lumpability": lump_dict(inst, lumpability) if lumpability is not None else None,
        "information": info_dict(inst, information) if information is not None else None,
    }
    if extra:
        rep.update(extra)
    if timing is not None:
        rep["timing_seconds"] = timing
    return rep


def _fmt(x) -> str:
    return format(float(x), ".6g")


def text_report(inst: Instance, lumpability=None, information=None) -> str:
    lines = [f"instance {inst.name}: {inst.graph.n} variables, edges {graph_dict(inst, inst.graph)}"]
    if lumpability is not None:
        r = lumpability
        lines.append(f"  lumpable: {'yes' if r.is_lumpable else 'no'} (certificate: {r.certificate})")
        if r.lumped_verdict is not None and r.lumped_verdict.witness is not None:
            v, x = r.lumped_verdict.witness
            lines.append(f"  local Markov property of Y fails at {inst.variable_names[v - 1]}, y = {list(x)}")
        if r.minimal_graphs is not None:
            for g in r.minimal_graphs:
                lines.append(f"  minimal graph for Y: {graph_dict(inst, g)}")
        if r.note:
            lines.append(f"  note: {r.note}")
    if information is not None:
        r = information
        lines.append(f"  information-preserving: {'yes' if r.preserving else 'no'} (H(X|Y) = {_fmt(r.residual)} bits)")
        if r.necessary_residuals is not None:
            res = ", ".join(f"{inst.variable_names[i - 1]}={_fmt(v)}" for i, v in r.necessary_residuals.items())
            lines.append(f"  H(X_i | Y_i, X_N(i)): {res}")
        if r.chordal:
            w = r.sufficient_witness
            lines.append(f"  chordal sufficient condition: {'order ' + str(_names_ordered(inst, w.permutation)) if w else 'no MCS ordering satisfies it'}")
        if r.note:
            lines.append(f"  note: {r.note}")
    return "\n".join(lines)

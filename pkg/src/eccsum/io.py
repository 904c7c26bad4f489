"""JSON/CSV formats for spaces, molecules, sequences, graphs and reports."""

import csv
import io as _io
import json
import math

import jsonschema
import numpy as np

from .errors import InputError
from .graphs import WeightedGraph
from .metric import FiniteMetricSpace, Molecule, PairSequence
from .summing import MetricMap, ProbabilityMeasure

_ID = {"type": ["string", "integer"]}
_NUM = {"type": "number"}

SPACE_SCHEMA = {
    "type": "object",
    "required": ["points", "d"],
    "properties": {
        "points": {"type": "array", "items": _ID, "minItems": 1},
        "d": {"type": "array", "items": {"type": "array", "items": _NUM}},
        "base_point": _ID,
        "pseudometric": {"type": "boolean"},
    },
}
MOLECULE_SCHEMA = {
    "type": "object",
    "required": ["coefficients"],
    "properties": {"coefficients": {"type": "object", "additionalProperties": _NUM}},
}
SEQUENCE_SCHEMA = {
    "type": "object",
    "required": ["pairs"],
    "properties": {
        "pairs": {
            "type": "array",
            "items": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2},
        },
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
}
GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {"type": "array", "items": _ID, "minItems": 1},
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["u", "v", "w"],
                "properties": {"u": _ID, "v": _ID, "w": {"type": "number", "exclusiveMinimum": 0}},
            },
        },
    },
}
INDEX_SCHEMA = {
    "type": "object",
    "required": ["values"],
    "properties": {"values": {"type": "object", "additionalProperties": _NUM}},
}
MEASURE_SCHEMA = {
    "type": "object",
    "required": ["measure"],
    "properties": {
        "measure": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}}
    },
}
MAP_SCHEMA = {
    "type": "object",
    "required": ["mapping"],
    "properties": {"mapping": {"type": "object", "additionalProperties": _ID}},
}
CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["p", "constant", "measure", "slack", "dual_witness", "witness_pair"],
    "properties": {
        "p": _NUM,
        "constant": {"oneOf": [_NUM, {"const": "inf"}]},
        "measure": {"type": "object", "additionalProperties": _NUM},
        "slack": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pair", "value"],
                "properties": {
                    "pair": {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2},
                    "value": _NUM,
                },
            },
        },
        "dual_witness": {"oneOf": [SEQUENCE_SCHEMA, {"type": "null"}]},
        "witness_pair": {
            "oneOf": [
                {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2},
                {"type": "null"},
            ]
        },
    },
}


def _check(doc, schema, source):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "$" + "".join(
            f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path
        )
        raise InputError(f"{source}: {where}: {exc.message}") from None


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


# ---------------------------------------------------------------------------
# parsing


def space_from_json(doc, source="<space>"):
    _check(doc, SPACE_SCHEMA, source)
    ids = [str(p) for p in doc["points"]]
    d = doc["d"]
    if len(d) != len(ids) or any(len(r) != len(ids) for r in d):
        raise InputError(f"{source}: $.d: expected a {len(ids)}x{len(ids)} matrix")
    base = doc.get("base_point")
    base_idx = 0
    if base is not None:
        if str(base) not in ids:
            raise InputError(f"{source}: $.base_point: unknown id {base!r}")
        base_idx = ids.index(str(base))
    return FiniteMetricSpace(tuple(ids), np.array(d, dtype=float), base_idx,
                             bool(doc.get("pseudometric", False)))


def space_to_json(space):
    return {
        "points": list(space.points),
        "d": space.d.tolist(),
        "base_point": space.points[space.base_point],
        "pseudometric": space.pseudometric,
    }


def _lookup(ids, key, source, where):
    key = str(key)
    if key not in ids:
        raise InputError(f"{source}: {where}: unknown id {key!r}")
    return ids.index(key)


def molecule_from_json(doc, space, source="<molecule>"):
    _check(doc, MOLECULE_SCHEMA, source)
    coeffs = {}
    for k, v in doc["coefficients"].items():
        i = _lookup(space.points, k, source, f"$.coefficients.{k}")
        coeffs[i] = coeffs.get(i, 0.0) + float(v)
    return Molecule(coeffs)


def molecule_to_json(m, space):
    return {"coefficients": {space.points[i]: c for i, c in sorted(m.coefficients.items())}}


def sequence_from_json(doc, ids, source="<sequence>"):
    _check(doc, SEQUENCE_SCHEMA, source)
    pairs = [
        (_lookup(ids, a, source, f"$.pairs[{i}][0]"), _lookup(ids, b, source, f"$.pairs[{i}][1]"))
        for i, (a, b) in enumerate(doc["pairs"])
    ]
    w = doc.get("weights")
    if w is not None and len(w) != len(pairs):
        raise InputError(f"{source}: $.weights: {len(w)} weights for {len(pairs)} pairs")
    return PairSequence(pairs, w)


def sequence_to_json(seq, ids):
    out = {"pairs": [[ids[a], ids[b]] for a, b in seq.pairs]}
    out["weights"] = list(seq.weight_array().tolist())
    return out


def graph_from_json(doc, source="<graph>"):
    _check(doc, GRAPH_SCHEMA, source)
    ids = [str(v) for v in doc["vertices"]]
    edges = []
    for i, e in enumerate(doc["edges"]):
        u = _lookup(ids, e["u"], source, f"$.edges[{i}].u")
        v = _lookup(ids, e["v"], source, f"$.edges[{i}].v")
        edges.append((u, v, float(e["w"])))
    try:
        return WeightedGraph(tuple(ids), tuple(edges))
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def graph_to_json(g):
    return {
        "vertices": list(g.vertices),
        "edges": [{"u": g.vertices[u], "v": g.vertices[v], "w": w} for u, v, w in g.edges],
    }


def index_from_json(doc, ids, source="<index>"):
    _check(doc, INDEX_SCHEMA, source)
    vals = {str(k): float(v) for k, v in doc["values"].items()}
    for k in vals:
        _lookup(ids, k, source, f"$.values.{k}")
    missing = [v for v in ids if v not in vals]
    if missing:
        raise InputError(f"{source}: $.values: no value for {missing[:5]}")
    return np.array([vals[v] for v in ids])


def index_to_json(values, ids):
    return {"values": {v: float(x) for v, x in zip(ids, values)}}


def measure_from_json(doc, ids, source="<measure>"):
    _check(doc, MEASURE_SCHEMA, source)
    sup = {}
    for k, v in doc["measure"].items():
        sup[_lookup(ids, k, source, f"$.measure.{k}")] = float(v)
    try:
        return ProbabilityMeasure(sup)
    except InputError as exc:
        raise InputError(f"{source}: $.measure: {exc}") from None


def measure_to_json(mu, ids):
    return {ids[i]: w for i, w in sorted(mu.support.items())}


def map_from_json(doc, domain, codomain, source="<map>"):
    _check(doc, MAP_SCHEMA, source)
    mp = doc["mapping"]
    images = []
    for x in domain.points:
        if x not in mp:
            raise InputError(f"{source}: $.mapping: no image for {x!r}")
        images.append(_lookup(codomain.points, mp[x], source, f"$.mapping.{x}"))
    return MetricMap(domain, codomain, tuple(images))


def _num(x):
    return "inf" if math.isinf(x) else float(x)


def certificate_to_json(cert, ids):
    return {
        "p": float(cert.p),
        "constant": _num(cert.constant),
        "measure": measure_to_json(cert.measure, ids) if cert.measure else {},
        "slack": [{"pair": [ids[a], ids[b]], "value": float(v)} for (a, b), v in cert.slack],
        "dual_witness": sequence_to_json(cert.dual_witness, ids) if cert.dual_witness else None,
        "witness_pair": [ids[a] for a in cert.witness_pair] if cert.witness_pair else None,
        "test_points": [ids[i] for i in cert.test_points],
        "skipped_zero": cert.skipped_zero,
        "skipped_tiny": [[ids[a], ids[b]] for a, b in cert.skipped_tiny],
    }


def matrix_to_csv(ids, values):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(ids))
    for v, row in zip(ids, values):
        w.writerow([v] + [repr(float(x)) for x in row])
    return buf.getvalue()


def matrix_from_csv(text):
    rows = list(csv.reader(_io.StringIO(text)))
    ids = rows[0][1:]
    vals = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    return ids, vals

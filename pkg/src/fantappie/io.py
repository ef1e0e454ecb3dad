"""JSON and CSV interchange with schema validation and deterministic output."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction
from typing import Any

import jsonschema
import numpy as np

from .funcalc import OperatorTuple
from .measures import DiscreteMeasure
from .series import TruncatedSeries

__all__ = [
    "SchemaError",
    "SERIES_SCHEMA",
    "MEASURE_SCHEMA",
    "TUPLE_SCHEMA",
    "validate",
    "series_from_json",
    "series_to_json",
    "measure_from_json",
    "measure_to_json",
    "tuple_from_json",
    "tuple_to_json",
    "to_jsonable",
    "dumps",
    "format_float",
    "write_csv",
]


class SchemaError(ValueError):
    """Input JSON does not match its schema; ``pointer`` locates the field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


_NUMBER = {"type": "number"}
_COMPLEX_PAIR = {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2}
_INDEX = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}

SERIES_SCHEMA = {
    "type": "object",
    "required": ["dim", "max_degree", "coeffs"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "max_degree": {"type": "integer", "minimum": 0},
        "coeffs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["alpha"],
                "properties": {"alpha": _INDEX, "re": _NUMBER, "im": _NUMBER},
                "additionalProperties": False,
            },
        },
    },
}

MEASURE_SCHEMA = {
    "type": "object",
    "required": ["dim", "atoms"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["point", "weight"],
                "properties": {
                    "point": {"type": "array", "items": _COMPLEX_PAIR},
                    "weight": {"type": "number", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
    },
}

TUPLE_SCHEMA = {
    "type": "object",
    "required": ["n", "d", "matrices"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1},
        "matrices": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "array", "items": _COMPLEX_PAIR}},
        },
    },
}


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate(doc: Any, schema: dict) -> None:
    """Raise :class:`SchemaError` for the first (deepest-path) violation."""
    errors = sorted(
        jsonschema.Draft7Validator(schema).iter_errors(doc), key=lambda e: (-len(e.path), list(map(str, e.path)))
    )
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _pointer(err.absolute_path))


def series_from_json(doc: dict) -> TruncatedSeries:
    validate(doc, SERIES_SCHEMA)
    dim, D = doc["dim"], doc["max_degree"]
    coeffs = {}
    for k, entry in enumerate(doc["coeffs"]):
        alpha = tuple(entry["alpha"])
        where = f"/coeffs/{k}/alpha"
        if len(alpha) != dim:
            raise SchemaError(f"length {len(alpha)} does not match dim {dim}", where)
        if sum(alpha) > D:
            raise SchemaError(f"degree {sum(alpha)} exceeds max_degree {D}", where)
        if alpha in coeffs:
            raise SchemaError("duplicate multi-index", where)
        coeffs[alpha] = complex(entry.get("re", 0.0), entry.get("im", 0.0))
    return TruncatedSeries(dim, D, coeffs)


def series_to_json(f: TruncatedSeries) -> dict:
    out = []
    for a, c in f.coeffs.items():
        c = complex(c)
        out.append({"alpha": list(a), "re": c.real, "im": c.imag})
    return {"dim": f.dim, "max_degree": f.max_degree, "coeffs": out}


def measure_from_json(doc: dict) -> DiscreteMeasure:
    validate(doc, MEASURE_SCHEMA)
    n = doc["dim"]
    pts, wts = [], []
    for k, atom in enumerate(doc["atoms"]):
        if len(atom["point"]) != n:
            raise SchemaError(f"point has {len(atom['point'])} coordinates, expected {n}", f"/atoms/{k}/point")
        pts.append([complex(re, im) for re, im in atom["point"]])
        wts.append(atom["weight"])
    if not pts:
        return DiscreteMeasure.zero(n)
    return DiscreteMeasure(np.array(pts), np.array(wts, dtype=float))


def measure_to_json(mu: DiscreteMeasure) -> dict:
    atoms = [
        {"point": [[z.real, z.imag] for z in p], "weight": float(w)}
        for p, w in zip(mu.points, mu.weights)
    ]
    return {"dim": mu.dim, "atoms": atoms}


def tuple_from_json(doc: dict) -> OperatorTuple:
    validate(doc, TUPLE_SCHEMA)
    n, d = doc["n"], doc["d"]
    if len(doc["matrices"]) != n:
        raise SchemaError(f"{len(doc['matrices'])} matrices, expected n = {n}", "/matrices")
    mats = []
    for i, M in enumerate(doc["matrices"]):
        if len(M) != d or any(len(row) != d for row in M):
            raise SchemaError(f"matrix is not {d} x {d}", f"/matrices/{i}")
        mats.append(np.array([[complex(re, im) for re, im in row] for row in M]))
    return OperatorTuple(tuple(mats))


def tuple_to_json(T: OperatorTuple) -> dict:
    return {
        "n": T.n,
        "d": T.d,
        "matrices": [[[[z.real, z.imag] for z in row] for row in M] for M in T],
    }


# deterministic writers


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def to_jsonable(obj: Any) -> Any:
    """Reduce reports, arrays and numbers to plain JSON types (floats stay floats)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, TruncatedSeries):
        return series_to_json(obj)
    if isinstance(obj, OperatorTuple):
        return tuple_to_json(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, Fraction)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    return json.dumps(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(to_jsonable(obj), indent, 0) + "\n"


def write_csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        out = []
        for v in row:
            v = to_jsonable(v)
            if isinstance(v, float):
                out.append(format_float(v).strip('"'))
            elif isinstance(v, (list, dict)):
                out.append(json.dumps(v, separators=(",", ":")))
            else:
                out.append(v)
        writer.writerow(out)
    return buf.getvalue()

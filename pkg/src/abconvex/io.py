"""Problem files: JSON with exact rationals, one object per file.

Rationals are written as "p/q" strings (integers as plain strings) and may
be read from ints, "p/q" strings or [num, den] pairs.  Floating literals are
refused.  Every parse error names the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .calculus import OperatorFamily
from .core.geometry import PolyCone, Polytope
from .core.scalars import ExtScalar, LexScalar, Q, fmt_q
from .generation import AffineFunctional, GeneratorSet, PolyFunc, SampledFunc

SCHEMA_VERSION = "1"
KINDS = ("function", "generator_set", "cone", "polytope", "operator_family",
         "convolution", "sandwich", "composition")


class ProblemError(ValueError):
    """Malformed problem file; ``where`` is a field path or a line/column."""

    def __init__(self, where, message):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------- reading


def _rational(value, where) -> Fraction:
    if isinstance(value, float):
        raise ProblemError(where, f"floating literal {value!r} refused; write it as \"p/q\"")
    try:
        return Q(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ProblemError(where, str(exc)) from None


def _lex_or_rational(value, where):
    if isinstance(value, dict):
        _fields(value, {"std", "inf"}, set(), where)
        return LexScalar(_rational(value["std"], f"{where}.std"), _rational(value["inf"], f"{where}.inf"))
    return _rational(value, where)


def _ext(value, where) -> ExtScalar:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf"):
        return ExtScalar.of("inf")
    return ExtScalar(_rational(value, where))


def _list(value, where, nonempty=True):
    if not isinstance(value, list):
        raise ProblemError(where, f"expected a list, got {type(value).__name__}")
    if nonempty and not value:
        raise ProblemError(where, "must not be empty")
    return value


def _vector(value, where, dim=None, conv=_rational):
    items = _list(value, where, nonempty=False)
    if dim is not None and len(items) != dim:
        raise ProblemError(where, f"expected {dim} entries, got {len(items)}")
    return tuple(conv(v, f"{where}[{i}]") for i, v in enumerate(items))


def _int(value, where):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ProblemError(where, "expected a nonnegative integer")
    return value


def _fields(obj, required, optional, where):
    if not isinstance(obj, dict):
        raise ProblemError(where, f"expected an object, got {type(obj).__name__}")
    missing = sorted(required - obj.keys())
    if missing:
        raise ProblemError(where, f"missing field(s) {', '.join(missing)}")
    unknown = sorted(obj.keys() - required - optional)
    if unknown:
        raise ProblemError(where, f"unknown field(s) {', '.join(unknown)}")


def _pieces(value, dim, where, lex_ok=False):
    conv = _lex_or_rational if lex_ok else _rational
    out = []
    for i, piece in enumerate(_list(value, where)):
        w = f"{where}[{i}]"
        _fields(piece, {"slope"}, {"offset"}, w)
        slope = _vector(piece["slope"], f"{w}.slope", dim, conv)
        offset = conv(piece.get("offset", 0), f"{w}.offset")
        out.append((slope, offset))
    return tuple(out)


def _function(p, where):
    if isinstance(p, dict) and "grid" in p:
        _fields(p, {"grid", "values"}, set(), where)
        grid = [_vector(x, f"{where}.grid[{i}]") for i, x in enumerate(_list(p["grid"], f"{where}.grid"))]
        if len({len(x) for x in grid}) != 1:
            raise ProblemError(f"{where}.grid", "grid points of different dimensions")
        vals = _vector(p["values"], f"{where}.values", len(grid), _ext)
        return {"grid": tuple(grid), "values": vals}
    _fields(p, {"dim", "pieces"}, set(), where)
    dim = _int(p["dim"], f"{where}.dim")
    return {"dim": dim, "pieces": _pieces(p["pieces"], dim, f"{where}.pieces", lex_ok=True)}


def _matrix(value, where):
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(_list(value, where))]
    if len({len(r) for r in rows}) != 1:
        raise ProblemError(where, "ragged matrix")
    return tuple(rows)


def _payload(kind, p, where="payload"):
    if kind == "function":
        return _function(p, where)
    if kind == "generator_set":
        _fields(p, {"dim", "members"}, set(), where)
        dim = _int(p["dim"], f"{where}.dim")
        return {"dim": dim, "members": _pieces(p["members"], dim, f"{where}.members")}
    if kind == "cone":
        _fields(p, {"dim", "rays"}, set(), where)
        dim = _int(p["dim"], f"{where}.dim")
        rays = _list(p["rays"], f"{where}.rays", nonempty=False)
        return {"dim": dim, "rays": tuple(_vector(r, f"{where}.rays[{i}]", dim) for i, r in enumerate(rays))}
    if kind == "polytope":
        _fields(p, {"dim", "vertices"}, set(), where)
        dim = _int(p["dim"], f"{where}.dim")
        verts = _list(p["vertices"], f"{where}.vertices")
        return {"dim": dim,
                "vertices": tuple(_vector(v, f"{where}.vertices[{i}]", dim) for i, v in enumerate(verts))}
    if kind == "operator_family":
        _fields(p, {"members"}, set(), where)
        return {"members": tuple(_matrix(m, f"{where}.members[{i}]")
                                 for i, m in enumerate(_list(p["members"], f"{where}.members")))}
    if kind == "sandwich":
        _fields(p, {"P", "Q"}, set(), where)
        return {"P": _function(p["P"], f"{where}.P"), "Q": _function(p["Q"], f"{where}.Q")}
    if kind == "composition":
        _fields(p, {"p1", "p2"}, set(), where)
        p1 = tuple(_function(f, f"{where}.p1[{i}]") for i, f in enumerate(_list(p["p1"], f"{where}.p1")))
        return {"p1": p1, "p2": _function(p["p2"], f"{where}.p2")}
    if kind == "convolution":
        _fields(p, {"f1", "f2", "mode"}, {"y_grid", "point"}, where)
        if p["mode"] not in ("grid", "polyhedral"):
            raise ProblemError(f"{where}.mode", "expected \"grid\" or \"polyhedral\"")
        out = {"f1": _function(p["f1"], f"{where}.f1"), "f2": _function(p["f2"], f"{where}.f2"),
               "mode": p["mode"]}
        if "y_grid" in p:
            out["y_grid"] = tuple(_vector(y, f"{where}.y_grid[{i}]")
                                  for i, y in enumerate(_list(p["y_grid"], f"{where}.y_grid")))
        if "point" in p:
            out["point"] = _vector(p["point"], f"{where}.point", 3)
        return out
    raise ProblemError("kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")


@dataclass(frozen=True)
class ProblemFile:
    kind: str
    payload: dict
    metadata: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def build(self):
        """The in-memory object the payload describes."""
        return _build(self.kind, self.payload)

    def to_json(self) -> str:
        return dumps(self)


def loads(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    _fields(doc, {"schema_version", "kind", "payload"}, {"metadata"}, "file")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ProblemError("schema_version", f"unsupported version {doc['schema_version']!r}")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ProblemError("kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise ProblemError("metadata", "expected an object")
    return ProblemFile(kind, _payload(kind, doc["payload"]), meta)


def load(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads(text)
    except ProblemError as exc:
        raise ProblemError(f"{path}: {exc.where}", str(exc).split(": ", 1)[1]) from None


# ---------------------------------------------------------------- building


def _has_lex(pieces):
    return any(isinstance(a, LexScalar) for s, b in pieces for a in s + (b,))


def build_function(p):
    if "grid" in p:
        return SampledFunc(p["grid"], p["values"])
    if _has_lex(p["pieces"]):
        from .approximation import LexPolyFunc
        return LexPolyFunc(p["dim"], p["pieces"])
    return PolyFunc(p["dim"], tuple(AffineFunctional(s, b) for s, b in p["pieces"]))


def _build(kind, p):
    try:
        if kind == "function":
            return build_function(p)
        if kind == "generator_set":
            return GeneratorSet(p["dim"], tuple(AffineFunctional(s, b) for s, b in p["members"]))
        if kind == "cone":
            return PolyCone(p["dim"], p["rays"])
        if kind == "polytope":
            return Polytope(p["dim"], p["vertices"])
        if kind == "operator_family":
            return OperatorFamily(p["members"])
        if kind == "sandwich":
            return build_function(p["P"]), build_function(p["Q"])
        if kind == "composition":
            return [build_function(f) for f in p["p1"]], build_function(p["p2"])
        if kind == "convolution":
            return {**p, "f1": build_function(p["f1"]), "f2": build_function(p["f2"])}
    except ValueError as exc:
        raise ProblemError("payload", str(exc)) from None
    raise ProblemError("kind", f"unknown kind {kind!r}")


# ---------------------------------------------------------------- writing


def to_plain(value):
    """JSON-ready form: rationals become "p/q", TOP becomes "inf"."""
    if isinstance(value, (bool, int)) or value is None:
        return value  # counts such as dims; every rational is a Fraction by now
    if isinstance(value, Fraction):
        return fmt_q(value)
    if isinstance(value, ExtScalar):
        return str(value)
    if isinstance(value, LexScalar):
        return {"std": fmt_q(value.std), "inf": fmt_q(value.inf)}
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, str):
        return value
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _function_payload(f):
    if isinstance(f, SampledFunc):
        return {"grid": tuple(f.grid), "values": tuple(f.values)}
    if isinstance(f, PolyFunc):
        return {"dim": f.dim, "pieces": tuple((p.slope, p.offset) for p in f.pieces)}
    from .approximation import LexPolyFunc
    if isinstance(f, LexPolyFunc):
        return {"dim": f.dim, "pieces": f.pieces}
    raise TypeError(f"not a function: {type(f).__name__}")


def _plain_function(p):
    if "grid" in p:
        return {"grid": p["grid"], "values": p["values"]}
    return {"dim": p["dim"], "pieces": [{"slope": s, "offset": b} for s, b in p["pieces"]]}


def from_object(obj, metadata=None) -> ProblemFile:
    """ProblemFile describing a function, generator set, cone, polytope or family."""
    meta = dict(metadata or {})
    if isinstance(obj, PolyCone):
        return ProblemFile("cone", {"dim": obj.dim, "rays": tuple(obj.rays)}, meta)
    if isinstance(obj, Polytope):
        return ProblemFile("polytope", {"dim": obj.dim, "vertices": tuple(obj.vertices)}, meta)
    if isinstance(obj, GeneratorSet):
        return ProblemFile("generator_set", {
            "dim": obj.dim, "members": tuple((h.slope, h.offset) for h in obj.members)}, meta)
    if isinstance(obj, OperatorFamily):
        return ProblemFile("operator_family", {"members": tuple(m.rows for m in obj.members)}, meta)
    return ProblemFile("function", _function_payload(obj), meta)


def _plain_payload(k, p):
    if k == "function":
        return _plain_function(p)
    if k == "generator_set":
        return {"dim": p["dim"], "members": [{"slope": s, "offset": b} for s, b in p["members"]]}
    if k == "sandwich":
        return {"P": _plain_function(p["P"]), "Q": _plain_function(p["Q"])}
    if k == "composition":
        return {"p1": [_plain_function(f) for f in p["p1"]], "p2": _plain_function(p["p2"])}
    if k == "convolution":
        return {**p, "f1": _plain_function(p["f1"]), "f2": _plain_function(p["f2"])}
    return p


def dumps(problem: ProblemFile) -> str:
    doc = {"schema_version": problem.schema_version, "kind": problem.kind,
           "payload": to_plain(_plain_payload(problem.kind, problem.payload)),
           "metadata": problem.metadata}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


__all__ = ["KINDS", "SCHEMA_VERSION", "ProblemError", "ProblemFile", "build_function", "dumps",
           "from_object", "load", "loads", "to_plain"]

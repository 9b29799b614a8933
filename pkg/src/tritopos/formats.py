"""Loaders and savers for the on-disk record formats.

All formats are JSON. Algebra files are normalized on load by taking the
reflexive-transitive closure of the declared order; saving a loaded
algebra reproduces the normalized file byte for byte.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .heyting import HeytingAlgebra, build_heyting

BUNDLED_ALGEBRAS = ("chain2", "chain3", "diamond4", "m3")


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top-level value must be an object")
    return data


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ParseError(f"{where}: missing required field {key!r}")
    value = data[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}: field {key!r} has the wrong type")
    return value


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture file inside the installed package."""
    root = resources.files("tritopos").joinpath("fixtures")
    path = Path(str(root.joinpath(name)))
    if not path.exists():
        raise ParseError(f"no bundled fixture named {name!r}")
    return path


def algebra_from_dict(data: dict, where: str = "algebra") -> HeytingAlgebra:
    elements = _require(data, "elements", list, where)
    leq = _require(data, "leq", list, where)
    for pair in leq:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError(f"{where}: 'leq' entries must be pairs")
    return build_heyting([str(e) for e in elements],
                         [(str(a), str(b)) for a, b in leq])


def load_algebra(spec: str) -> HeytingAlgebra:
    """Load an algebra from a file path or a bundled fixture name."""
    if spec in BUNDLED_ALGEBRAS:
        path = fixture_path(f"{spec}.json")
    else:
        path = Path(spec)
    return algebra_from_dict(_read_json(path), where=str(path))


def algebra_to_dict(algebra: HeytingAlgebra) -> dict:
    pairs = [[algebra.elements[a], algebra.elements[b]]
             for a in range(len(algebra))
             for b in range(len(algebra))
             if algebra.leq[a, b]]
    return {"elements": list(algebra.elements), "leq": pairs}


def save_algebra(algebra: HeytingAlgebra, path) -> None:
    Path(path).write_text(json.dumps(algebra_to_dict(algebra), indent=2) + "\n")


def predicate_from_dict(algebra, data: dict, where: str = "predicate"):
    from .tripos import FinSetObj, Predicate

    base = _require(data, "base", list, where)
    values = _require(data, "values", dict, where)
    obj = FinSetObj(tuple(str(e) for e in base))
    missing = [e for e in obj.elements if e not in values]
    if missing:
        raise ParseError(f"{where}: no value for base element {missing[0]!r}")
    codes = [algebra.index(values[e]) for e in obj.elements]
    return Predicate(algebra, obj, np.array(codes, dtype=np.uint8))


def predicate_to_dict(pred) -> dict:
    return {
        "base": [str(e) for e in pred.base.elements],
        "values": {str(e): pred.algebra.name(c)
                   for e, c in zip(pred.base.elements, pred.values)},
    }


def load_predicate(algebra, path):
    return predicate_from_dict(algebra, _read_json(path), where=str(path))


def per_from_dict(algebra, data: dict, where: str = "per"):
    from .per_topos import PerObject, Relation, validate_per
    from .tripos import FinSetObj

    carrier = _require(data, "carrier", list, where)
    matrix = _require(data, "matrix", list, where)
    obj = FinSetObj(tuple(str(e) for e in carrier))
    n = len(obj.elements)
    if len(matrix) != n * n:
        raise ParseError(
            f"{where}: matrix must hold {n * n} row-major entries")
    codes = np.array([algebra.index(v) for v in matrix],
                     dtype=np.uint8).reshape(n, n)
    per = PerObject(obj, Relation(algebra, obj, obj, codes), validate=False)
    failure = validate_per(per)
    if failure is not None:
        raise ValidationError(f"{where}: {failure['reason']}",
                              witness=failure)
    return per


def per_to_dict(per) -> dict:
    names = [per.algebra.name(c) for c in per.e.matrix.reshape(-1)]
    return {"carrier": [str(e) for e in per.carrier.elements],
            "matrix": names}


def load_per(algebra, path):
    return per_from_dict(algebra, _read_json(path), where=str(path))


def save_per(per, path) -> None:
    Path(path).write_text(json.dumps(per_to_dict(per), indent=2) + "\n")


def funrel_from_dict(algebra, data: dict, where: str = "funrel"):
    from .per_topos import FunRel, validate_funrel

    dom = per_from_dict(algebra, _require(data, "dom", dict, where),
                        where=f"{where}.dom")
    cod = per_from_dict(algebra, _require(data, "cod", dict, where),
                        where=f"{where}.cod")
    matrix = _require(data, "matrix", list, where)
    n = len(dom.carrier.elements)
    m = len(cod.carrier.elements)
    if len(matrix) != n * m:
        raise ParseError(
            f"{where}: matrix must hold {n * m} row-major entries")
    codes = np.array([algebra.index(v) for v in matrix],
                     dtype=np.uint8).reshape(n, m)
    mor = FunRel(dom, cod, codes, validate=False)
    failure = validate_funrel(mor)
    if failure is not None:
        raise ValidationError(f"{where}: {failure['reason']}",
                              witness=failure)
    return mor


def funrel_to_dict(mor) -> dict:
    return {
        "dom": per_to_dict(mor.dom),
        "cod": per_to_dict(mor.cod),
        "matrix": [mor.algebra.name(c) for c in mor.matrix.reshape(-1)],
    }


def load_funrel(algebra, path):
    return funrel_from_dict(algebra, _read_json(path), where=str(path))


def pseq_from_dict(data: dict, where: str = "pseq", algebra=None):
    """Load a pseudoequivalence span for the finset or btopos instance.

    Returns ``(category_name, x1, x0, d0, d1)`` with objects and morphisms
    of the named instance; validation of the span happens in
    ``exact_completion.validate_pseudoeq``.
    """
    category = _require(data, "category", str, where)
    if category == "finset":
        from .tripos import FinMap, FinSetObj

        x1 = FinSetObj(tuple(str(e) for e in _require(data, "x1", list, where)))
        x0 = FinSetObj(tuple(str(e) for e in _require(data, "x0", list, where)))
        maps = []
        for key in ("d0", "d1"):
            graph = _require(data, key, dict, where)
            try:
                maps.append(FinMap.from_dict(x1, x0, graph))
            except KeyError as exc:
                raise ParseError(
                    f"{where}: {key} does not map element {exc}") from exc
        return category, x1, x0, maps[0], maps[1]
    if category == "btopos":
        if algebra is None:
            raise ParseError(f"{where}: btopos records need --heyting")
        from .per_topos import FunRel, validate_funrel

        x1 = per_from_dict(algebra, _require(data, "x1", dict, where),
                           where=f"{where}.x1")
        x0 = per_from_dict(algebra, _require(data, "x0", dict, where),
                           where=f"{where}.x0")
        maps = []
        n, m = len(x1.carrier.elements), len(x0.carrier.elements)
        for key in ("d0", "d1"):
            matrix = _require(data, key, list, where)
            if len(matrix) != n * m:
                raise ParseError(f"{where}: {key} must hold {n * m} entries")
            codes = np.array([algebra.index(v) for v in matrix],
                             dtype=np.uint8).reshape(n, m)
            mor = FunRel(x1, x0, codes, validate=False)
            failure = validate_funrel(mor)
            if failure is not None:
                raise ValidationError(f"{where}.{key}: {failure['reason']}",
                                      witness=failure)
            maps.append(mor)
        return category, x1, x0, maps[0], maps[1]
    raise ParseError(f"{where}: unknown category {category!r}")


def load_pseq(path, algebra=None):
    return pseq_from_dict(_read_json(path), where=str(path), algebra=algebra)

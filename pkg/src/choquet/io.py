"""JSON documents for capacities, datasets, value functions, grids and models.

Floats are written with ``repr`` precision, so anything written here parses
back to bit-identical values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .capacity import Capacity, members
from .exceptions import MalformedInputError
from .learn import (
    Deltas,
    InteractionStatement,
    Preference,
    PreferenceDataset,
    ShapleyComparison,
)
from .values import ValueFunctionSet


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def load_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise MalformedInputError(f"{path}: file not found") from None
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: not valid JSON (line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise MalformedInputError(f"{path}: top level must be an object")
    return doc


def save_document(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc) + "\n")


# --------------------------------------------------------------------------
# field helpers
# --------------------------------------------------------------------------

def _field(doc: dict, key: str, where: str = ""):
    if key not in doc:
        raise MalformedInputError(f"{where}{key}: missing")
    return doc[key]


def _int(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedInputError(f"{name}: expected an integer, got {v!r}")
    return v


def _real(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise MalformedInputError(f"{name}: expected a finite real, got {v!r}")
    return float(v)


def _list(v, name: str) -> list:
    if not isinstance(v, list):
        raise MalformedInputError(f"{name}: expected a list")
    return v


def _label(v, name: str):
    if isinstance(v, (bool, list, dict)) or v is None:
        raise MalformedInputError(f"{name}: a level label must be a number or a string")
    return v


# --------------------------------------------------------------------------
# capacities
# --------------------------------------------------------------------------

def capacity_to_doc(cap: Capacity) -> dict:
    nu = [{"set": list(members(a)), "value": float(cap.values[a])}
          for a in range(1, 1 << cap.n)]
    return {"n": cap.n, "nu": nu}


def capacity_from_doc(doc: dict) -> Capacity:
    n = _int(_field(doc, "n"), "n")
    if not 1 <= n <= 20:
        raise MalformedInputError(f"n: must lie in 1..20, got {n}")
    values = np.full(1 << n, np.nan)
    values[0] = 0.0
    seen = set()
    for k, rec in enumerate(_list(_field(doc, "nu"), "nu")):
        if not isinstance(rec, dict):
            raise MalformedInputError(f"nu[{k}]: expected an object")
        s = _list(_field(rec, "set", f"nu[{k}]."), f"nu[{k}].set")
        idx = [_int(i, f"nu[{k}].set") for i in s]
        if idx != sorted(set(idx)) or any(not 0 <= i < n for i in idx):
            raise MalformedInputError(f"nu[{k}].set: must be sorted distinct indices in 0..{n - 1}")
        mask = sum(1 << i for i in idx)
        if mask in seen:
            raise MalformedInputError(f"nu[{k}].set: {idx} appears twice")
        seen.add(mask)
        values[mask] = _real(_field(rec, "value", f"nu[{k}]."), f"nu[{k}].value")
    missing = np.flatnonzero(np.isnan(values))
    if missing.size:
        raise MalformedInputError(f"nu: subset {list(members(int(missing[0])))} is missing")
    return Capacity(n, values)


def read_capacity(path) -> Capacity:
    return capacity_from_doc(load_document(path))


def write_capacity(cap: Capacity, path) -> None:
    save_document(capacity_to_doc(cap), path)


# --------------------------------------------------------------------------
# value functions and grids
# --------------------------------------------------------------------------

def values_to_doc(vf: ValueFunctionSet) -> dict:
    return {"values": [[[lab, val] for lab, val in crit] for crit in vf.pairs()]}


def values_from_doc(doc: dict) -> ValueFunctionSet:
    levels, vals = [], []
    for i, crit in enumerate(_list(_field(doc, "values"), "values")):
        lv, v = [], []
        for k, pair in enumerate(_list(crit, f"values[{i}]")):
            if not isinstance(pair, list) or len(pair) != 2:
                raise MalformedInputError(f"values[{i}][{k}]: expected a [level, value] pair")
            lv.append(_label(pair[0], f"values[{i}][{k}]"))
            v.append(_real(pair[1], f"values[{i}][{k}]"))
        levels.append(tuple(lv))
        vals.append(np.array(v))
    return ValueFunctionSet(tuple(levels), tuple(vals))


def read_values(path) -> ValueFunctionSet:
    return values_from_doc(load_document(path))


def write_values(vf: ValueFunctionSet, path) -> None:
    save_document(values_to_doc(vf), path)


def grid_from_doc(doc: dict) -> tuple[tuple, ...]:
    """``{"levels": [[...], ...]}``; a values document also works."""
    if "levels" not in doc and "values" in doc:
        return values_from_doc(doc).levels
    out = []
    for i, lv in enumerate(_list(_field(doc, "levels"), "levels")):
        labels = tuple(_label(x, f"levels[{i}]") for x in _list(lv, f"levels[{i}]"))
        if not labels or len(set(labels)) != len(labels):
            raise MalformedInputError(f"levels[{i}]: need distinct labels")
        out.append(labels)
    return tuple(out)


def read_grid(path) -> tuple[tuple, ...]:
    return grid_from_doc(load_document(path))


def grid_to_doc(levels) -> dict:
    return {"levels": [list(lv) for lv in levels]}


# --------------------------------------------------------------------------
# preference datasets
# --------------------------------------------------------------------------

def _pair(v, name: str) -> tuple[int, int]:
    v = _list(v, name)
    if len(v) != 2:
        raise MalformedInputError(f"{name}: expected two criteria")
    return _int(v[0], name), _int(v[1], name)


def dataset_from_doc(doc: dict) -> PreferenceDataset:
    n = _int(_field(doc, "n"), "n")
    levels = labels = alternatives = None
    if "levels" in doc:
        levels = grid_from_doc({"levels": doc["levels"]})
    if "labels" in doc:
        labels = tuple(tuple(_label(x, f"labels[{k}]") for x in _list(row, f"labels[{k}]"))
                       for k, row in enumerate(_list(doc["labels"], "labels")))
    if "alternatives" in doc:
        rows = _list(doc["alternatives"], "alternatives")
        parsed = [[_real(x, f"alternatives[{k}]") for x in _list(row, f"alternatives[{k}]")]
                  for k, row in enumerate(rows)]
        for k, row in enumerate(parsed):
            if len(row) != n:
                raise MalformedInputError(f"alternatives[{k}]: expected {n} entries, got {len(row)}")
        alternatives = np.array(parsed, dtype=float).reshape(len(parsed), n)
    elif labels is None:
        raise MalformedInputError("alternatives: missing")
    prefs = []
    for k, p in enumerate(_list(doc.get("preferences", []), "preferences")):
        if not isinstance(p, dict):
            raise MalformedInputError(f"preferences[{k}]: expected an object")
        prefs.append(Preference(_int(_field(p, "better", f"preferences[{k}]."), f"preferences[{k}].better"),
                                _int(_field(p, "worse", f"preferences[{k}]."), f"preferences[{k}].worse"),
                                p.get("kind", "strict")))
    shap = []
    for k, s in enumerate(_list(doc.get("shapley_comparisons", []), "shapley_comparisons")):
        where = f"shapley_comparisons[{k}]"
        if not isinstance(s, dict):
            raise MalformedInputError(f"{where}: expected an object")
        shap.append(ShapleyComparison(_int(_field(s, "i", where + "."), where + ".i"),
                                      _int(_field(s, "j", where + "."), where + ".j"),
                                      s.get("kind", "more_important")))
    inter = []
    for k, s in enumerate(_list(doc.get("interaction_statements", []), "interaction_statements")):
        where = f"interaction_statements[{k}]"
        if not isinstance(s, dict):
            raise MalformedInputError(f"{where}: expected an object")
        other = s.get("other")
        inter.append(InteractionStatement(
            _pair(_field(s, "pair", where + "."), where + ".pair"),
            _field(s, "kind", where + "."),
            None if other is None else _pair(other, where + ".other")))
    deltas = Deltas()
    if "deltas" in doc:
        d = doc["deltas"]
        if not isinstance(d, dict):
            raise MalformedInputError("deltas: expected an object")
        deltas = Deltas(**{key: _real(d[key], f"deltas.{key}")
                           for key in ("shapley", "interaction", "learning_set") if key in d})
    veto = [_int(i, "veto") for i in _list(doc.get("veto", []), "veto")]
    favour = [_int(i, "favour") for i in _list(doc.get("favour", []), "favour")]
    return PreferenceDataset(n, alternatives, tuple(prefs), tuple(shap), tuple(inter),
                             frozenset(veto), frozenset(favour), deltas, levels, labels)


def dataset_to_doc(data: PreferenceDataset) -> dict:
    doc: dict = {"n": data.n}
    if data.alternatives is not None:
        doc["alternatives"] = data.alternatives.tolist()
    doc["preferences"] = [{"better": p.better, "worse": p.worse, "kind": p.kind}
                          for p in data.preferences]
    if data.shapley_comparisons:
        doc["shapley_comparisons"] = [{"i": s.i, "j": s.j, "kind": s.kind}
                                      for s in data.shapley_comparisons]
    if data.interaction_statements:
        doc["interaction_statements"] = [
            {"pair": list(s.pair), "kind": s.kind, **({"other": list(s.other)} if s.other else {})}
            for s in data.interaction_statements]
    if data.veto:
        doc["veto"] = sorted(data.veto)
    if data.favour:
        doc["favour"] = sorted(data.favour)
    d = data.deltas
    doc["deltas"] = {"shapley": d.shapley, "interaction": d.interaction,
                     "learning_set": d.learning_set}
    if data.levels is not None:
        doc["levels"] = [list(lv) for lv in data.levels]
    if data.labels is not None:
        doc["labels"] = [list(x) for x in data.labels]
    return doc


def read_dataset(path) -> PreferenceDataset:
    return dataset_from_doc(load_document(path))


def write_dataset(data: PreferenceDataset, path) -> None:
    save_document(dataset_to_doc(data), path)

"""Declarative run specifications (TOML, with a JSON mirror).

A spec names one symbolic system, any number of measures and partitions,
and a list of tasks that refer to them by name.  Parsing produces a
normalized :class:`RunSpec` whose ``to_dict`` output re-parses to an equal
spec.  Fractions stay strings (``"2/3"``) so nothing is rounded.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

DEFAULT_MAX_DEPTH = 16

PARSE, SEMANTIC, DEPTH = 2, 3, 4

TASK_KEYS: dict[str, dict[str, tuple]] = {
    # type -> {key: (required, kind)}
    "entropy": {"measure": (True, "name"), "partition": (True, "name"), "depth": (True, "depth")},
    "isomorphism": {"measure": (True, "name"), "depth": (True, "depth")},
    "conditional": {"measure": (True, "name"), "partition": (True, "name"), "depth": (True, "depth")},
    "decompose": {"measure": (True, "name"), "partition": (True, "name"), "depth": (True, "depth")},
    "pesin": {"matrix": (True, "matrix")},
    "rn": {"nu": (True, "name"), "mu": (True, "name"), "depth": (True, "depth")},
    "square-chart": {"measure": (True, "name"), "depth": (True, "depth"),
                     "fiber_depth": (False, "depth"), "null": (False, "null")},
    "peano": {"depth": (True, "depth")},
}
NAME_KIND = {"measure": "measures", "partition": "partitions", "nu": "measures", "mu": "measures"}


class SpecError(Exception):
    """A spec problem with its exit code (2 parse, 3 semantic, 4 depth limit)."""

    def __init__(self, message: str, code: int = PARSE):
        super().__init__(message)
        self.code = code


@dataclass
class RunSpec:
    system: dict
    measures: dict[str, dict] = field(default_factory=dict)
    partitions: dict[str, dict] = field(default_factory=dict)
    tasks: list[dict] = field(default_factory=list)
    max_depth: int = DEFAULT_MAX_DEPTH

    def to_dict(self) -> dict:
        return {"system": self.system, "measures": self.measures, "partitions": self.partitions,
                "tasks": self.tasks, "limits": {"max_depth": self.max_depth}}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# helpers; every failure names its key path

def _fail(path: str, msg: str, code: int = PARSE):
    raise SpecError(f"{path}: {msg}", code)


def _table(value, path: str) -> dict:
    if not isinstance(value, dict):
        _fail(path, "expected a table")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, "expected an array")
    return value


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected a string, got {value!r}")
    return value


_NUM = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(\s*/\s*\d+)?\s*$")


def _number(value, path: str) -> str:
    """Normalize a scalar to its exact fraction string."""
    if isinstance(value, bool):
        _fail(path, f"expected a number, got {value!r}")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return str(Fraction(repr(value)))
    if isinstance(value, str) and _NUM.match(value):
        try:
            return str(Fraction(value.replace(" ", "")))
        except (ValueError, ZeroDivisionError):
            pass
    _fail(path, f"expected a number or fraction string, got {value!r}")


def _unknown(tbl: dict, allowed, path: str):
    extra = sorted(set(tbl) - set(allowed))
    if extra:
        _fail(f"{path}.{extra[0]}", "unknown key")


def _system(raw, path="system") -> dict:
    tbl = _table(raw, path)
    _unknown(tbl, ("alphabet", "transition", "sidedness"), path)
    if "alphabet" not in tbl:
        _fail(f"{path}.alphabet", "missing")
    alpha = [str(_int(s, f"{path}.alphabet[{i}]")) if not isinstance(s, str) else s
             for i, s in enumerate(_list(tbl["alphabet"], f"{path}.alphabet"))]
    out: dict[str, Any] = {"alphabet": alpha, "sidedness": "two-sided"}
    if "sidedness" in tbl:
        side = _str(tbl["sidedness"], f"{path}.sidedness")
        if side not in ("one-sided", "two-sided"):
            _fail(f"{path}.sidedness", f"must be 'one-sided' or 'two-sided', got {side!r}")
        out["sidedness"] = side
    if "transition" in tbl:
        rows = _list(tbl["transition"], f"{path}.transition")
        mat = []
        for i, r in enumerate(rows):
            row = []
            for j, v in enumerate(_list(r, f"{path}.transition[{i}]")):
                if v not in (0, 1) or not isinstance(v, (int, bool)):
                    _fail(f"{path}.transition[{i}][{j}]", f"expected 0/1, got {v!r}")
                row.append(int(v))
            mat.append(row)
        out["transition"] = mat
    return out


def _measure(raw, path: str) -> dict:
    tbl = _table(raw, path)
    kind = _str(tbl.get("kind"), f"{path}.kind") if "kind" in tbl else _fail(f"{path}.kind", "missing")
    if kind == "bernoulli":
        _unknown(tbl, ("kind", "weights"), path)
        if "weights" not in tbl:
            _fail(f"{path}.weights", "missing")
        return {"kind": kind, "weights": [_number(v, f"{path}.weights[{i}]")
                                          for i, v in enumerate(_list(tbl["weights"], f"{path}.weights"))]}
    if kind == "markov":
        _unknown(tbl, ("kind", "P", "p"), path)
        if "P" not in tbl:
            _fail(f"{path}.P", "missing")
        P = [[_number(v, f"{path}.P[{i}][{j}]") for j, v in enumerate(_list(r, f"{path}.P[{i}]"))]
             for i, r in enumerate(_list(tbl["P"], f"{path}.P"))]
        out = {"kind": kind, "P": P}
        if "p" in tbl:
            out["p"] = [_number(v, f"{path}.p[{i}]") for i, v in enumerate(_list(tbl["p"], f"{path}.p"))]
        return out
    if kind == "table":
        _unknown(tbl, ("kind", "weights", "start"), path)
        if "weights" not in tbl:
            _fail(f"{path}.weights", "missing")
        w = _table(tbl["weights"], f"{path}.weights")
        return {"kind": kind, "start": _int(tbl.get("start", 0), f"{path}.start"),
                "weights": {k: _number(v, f"{path}.weights.{k}") for k, v in sorted(w.items())}}
    _fail(f"{path}.kind", f"unknown measure kind {kind!r} (bernoulli, markov, table)")


def _partition(raw, path: str) -> dict:
    tbl = _table(raw, path)
    kind = _str(tbl.get("kind"), f"{path}.kind") if "kind" in tbl else _fail(f"{path}.kind", "missing")
    if kind == "trivial":
        _unknown(tbl, ("kind",), path)
        return {"kind": kind}
    if kind == "symbol":
        _unknown(tbl, ("kind", "coord"), path)
        return {"kind": kind, "coord": _int(tbl.get("coord", 0), f"{path}.coord")}
    if kind == "points":
        _unknown(tbl, ("kind", "length", "start"), path)
        if "length" not in tbl:
            _fail(f"{path}.length", "missing")
        return {"kind": kind, "length": _int(tbl["length"], f"{path}.length"),
                "start": _int(tbl.get("start", 0), f"{path}.start")}
    if kind == "words":
        _unknown(tbl, ("kind", "elements", "start"), path)
        if "elements" not in tbl:
            _fail(f"{path}.elements", "missing")
        el = _table(tbl["elements"], f"{path}.elements")
        elements = {}
        for label, words in el.items():
            ws = _list(words, f"{path}.elements.{label}")
            elements[label] = [_str(w, f"{path}.elements.{label}[{i}]") for i, w in enumerate(ws)]
        return {"kind": kind, "start": _int(tbl.get("start", 0), f"{path}.start"), "elements": elements}
    _fail(f"{path}.kind", f"unknown partition kind {kind!r} (symbol, words, points, trivial)")


def _task(raw, path: str, spec: RunSpec, index: int) -> dict:
    tbl = _table(raw, path)
    if "type" not in tbl:
        _fail(f"{path}.type", "missing")
    ttype = _str(tbl["type"], f"{path}.type")
    if ttype not in TASK_KEYS:
        _fail(f"{path}.type", f"unknown task type {ttype!r} ({', '.join(TASK_KEYS)})")
    keys = TASK_KEYS[ttype]
    _unknown(tbl, ("type", "name", *keys), path)
    out: dict[str, Any] = {"type": ttype, "name": _str(tbl.get("name", f"{index:02d}-{ttype}"), f"{path}.name")}
    for key, (required, kind) in keys.items():
        kp = f"{path}.{key}"
        if key not in tbl:
            if required:
                _fail(kp, "missing")
            continue
        v = tbl[key]
        if kind == "name":
            v = _str(v, kp)
            pool = getattr(spec, NAME_KIND[key])
            if v not in pool:
                _fail(kp, f"unresolved {NAME_KIND[key][:-1]} name {v!r}", SEMANTIC)
        elif kind == "depth":
            v = _int(v, kp)
            if v < 0:
                _fail(kp, "depth must be >= 0", SEMANTIC)
        elif kind == "matrix":
            v = [[_int(x, f"{kp}[{i}][{j}]") for j, x in enumerate(_list(r, f"{kp}[{i}]"))]
                 for i, r in enumerate(_list(v, kp))]
        elif kind == "null":
            v = _str(v, kp)
            if v not in ("error", "skip"):
                _fail(kp, "must be 'error' or 'skip'", SEMANTIC)
        out[key] = v
    if ttype == "square-chart":
        out.setdefault("fiber_depth", 1)
        out.setdefault("null", "error")
    return out


def check_depth(value: int, limit: int, path: str):
    if value > limit:
        raise SpecError(f"{path}: depth {value} exceeds the limit {limit} (raise limits.max_depth)", DEPTH)


def from_dict(data: dict) -> RunSpec:
    data = _table(data, "<root>")
    _unknown(data, ("system", "measures", "partitions", "tasks", "limits"), "<root>")
    if "system" not in data:
        _fail("system", "missing")
    spec = RunSpec(_system(data["system"]))
    limits = _table(data.get("limits", {}), "limits")
    _unknown(limits, ("max_depth",), "limits")
    spec.max_depth = _int(limits.get("max_depth", DEFAULT_MAX_DEPTH), "limits.max_depth")
    for name, m in sorted(_table(data.get("measures", {}), "measures").items()):
        spec.measures[name] = _measure(m, f"measures.{name}")
    for name, p in sorted(_table(data.get("partitions", {}), "partitions").items()):
        spec.partitions[name] = _partition(p, f"partitions.{name}")
    names = set()
    for i, t in enumerate(_list(data.get("tasks", []), "tasks")):
        task = _task(t, f"tasks[{i}]", spec, i)
        if task["name"] in names:
            _fail(f"tasks[{i}].name", f"duplicate task name {task['name']!r}", SEMANTIC)
        names.add(task["name"])
        for key in ("depth", "fiber_depth"):
            if key in task:
                check_depth(task[key], spec.max_depth, f"tasks[{i}].{key}")
        spec.tasks.append(task)
    return spec


_TOML_POS = re.compile(r"line (\d+), column (\d+)")


def _toml_error(text: str, err: Exception) -> SpecError:
    msg = str(err)
    m = _TOML_POS.search(msg)
    where = ""
    if m:
        line = int(m.group(1))
        src = text.splitlines()[line - 1] if 0 < line <= len(text.splitlines()) else ""
        key = re.match(r"\s*([A-Za-z0-9_\-.\"']+)\s*=", src)
        if key:
            where = f" (key {key.group(1).strip()!r})"
    return SpecError(f"TOML parse error: {msg}{where}", PARSE)


def parse_text(text: str, fmt: str = "toml") -> RunSpec:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"JSON parse error at line {e.lineno}, column {e.colno}: {e.msg}", PARSE) from None
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise _toml_error(text, e) from None
    return from_dict(data)


def bundled_specs() -> list[str]:
    return sorted(p.name for p in resources.files("measpart.specs").iterdir() if p.name.endswith((".toml", ".json")))


def resolve(path: str | Path) -> tuple[str, str]:
    """Text and format of a spec file, falling back to a bundled spec by name."""
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), ("json" if p.suffix == ".json" else "toml")
    name = p.name if p.suffix else p.name + ".toml"
    if str(p.parent) in ("", ".") and name in bundled_specs():
        res = resources.files("measpart.specs") / name
        return res.read_text(encoding="utf-8"), ("json" if name.endswith(".json") else "toml")
    raise SpecError(f"{path}: no such spec file (bundled: {', '.join(bundled_specs())})", PARSE)


def load(path: str | Path) -> RunSpec:
    text, fmt = resolve(path)
    return parse_text(text, fmt)

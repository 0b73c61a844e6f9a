"""Uniform reports and fixture loading."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import UsageError

FIXTURE_CATEGORIES = ("norms", "operators", "sequences", "functionals", "tensors")


@dataclass
class Report:
    kind: str
    passed: bool
    values: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if not self.passed and not (self.witnesses or self.notes):
            raise ValueError("a failing report must carry a witness or a note")

    def to_dict(self):
        return {
            "kind": self.kind,
            "pass": bool(self.passed),
            "values": {k: _jsonable(v) for k, v in self.values.items()},
            "witnesses": {k: _vector(v) for k, v in self.witnesses.items()},
            "notes": [str(n) for n in self.notes],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)

    def to_text(self):
        lines = [f"{self.kind}: {'PASS' if self.passed else 'FAIL'}"]
        for k in sorted(self.values):
            lines.append(f"  {k} = {_jsonable(self.values[k])}")
        for k in sorted(self.witnesses):
            lines.append(f"  {k} = {_vector(self.witnesses[k])}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _vector(v):
    arr = np.asarray(v)
    if arr.ndim == 0:
        return _jsonable(arr.item())
    return [[float(np.real(z)), float(np.imag(z))] for z in arr.ravel()]


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if v is None:
        return None
    return str(v)


def load_json(source):
    """Parse inline JSON text or the JSON file at ``source``."""
    text = str(source).strip()
    try:
        if text.startswith("{") or text.startswith("["):
            return json.loads(text)
        return json.loads(Path(text).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {text}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {text[:40]!r}: {exc}") from None


def fixture_path(category, name):
    if category not in FIXTURE_CATEGORIES:
        raise UsageError(f"unknown fixture category {category!r}")
    return resources.files("normkit") / "fixtures" / category / name


def list_fixtures(category):
    root = resources.files("normkit") / "fixtures" / category
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_fixture(category, name):
    return json.loads(fixture_path(category, name).read_text())

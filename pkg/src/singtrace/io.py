"""Input ingestion and canonical report serialization.

Sequence files:

* CSV with one value per row, or a single comma-separated row (both accepted,
  blank lines and ``#`` comments ignored);
* JSON holding an array of numbers or ``{"values": [...]}``.

Step-function files hold (value, measure) pieces: CSV rows ``value,measure``
or JSON ``{"pieces": [[value, measure], ...]}``.  Pieces may come in any
order; they are rearranged on ingestion.

Reports are written as canonical JSON: sorted keys, shortest round-trip float
formatting, non-finite floats as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .errors import DomainError, InputError
from .families import FAMILIES, build_family, parse_call
from .marcinkiewicz import KAPPA_CATALOGUE, PSI_CATALOGUE, get_kappa, get_psi
from .singular_values import SequenceData, decreasing_rearrangement, validate_sequence

KINDS = ("csv_sequence", "json_sequence", "step_function", "named_family")
TARGETS = ("sequence", "psi", "kappa")
SCHEMA_PATH = Path(__file__).with_name("report.schema.json")


@dataclass
class InputSpec:
    """What to analyse: a file or a named family, plus horizon and tolerances."""

    kind: str
    family: Optional[dict] = None
    path: Optional[str] = None
    horizon: float = 1e7
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown input kind {self.kind!r}; expected one of {KINDS}")
        if (self.family is None) == (self.path is None):
            raise InputError("exactly one of path / family must be given")
        if self.kind == "named_family" and self.family is None:
            raise InputError("named_family input needs a family")
        if self.kind != "named_family" and self.path is None:
            raise InputError(f"{self.kind} input needs a path")
        if self.family is not None:
            _check_family(self.family)
        if not (isinstance(self.horizon, (int, float)) and math.isfinite(self.horizon) and self.horizon > 0):
            raise InputError(f"horizon must be a positive finite number, got {self.horizon!r}")

    def echo(self):
        return {"kind": self.kind, "family": self.family, "path": self.path,
                "horizon": float(self.horizon), "tolerances": dict(self.tolerances)}


def _check_family(family):
    """Resolve the family name against the catalogue without building it."""
    if not isinstance(family, dict) or "name" not in family:
        raise InputError("family must be a mapping with a 'name'")
    target = family.get("type", "sequence")
    if target not in TARGETS:
        raise InputError(f"unknown family type {target!r}; expected one of {TARGETS}")
    known = {"sequence": FAMILIES, "psi": PSI_CATALOGUE, "kappa": KAPPA_CATALOGUE}[target]
    if family["name"] not in known:
        raise InputError(f"unknown {target} family {family['name']!r}; known: {sorted(known)}")


def family_spec(text, target="sequence", scale=1.0):
    """``'power(1.5)'`` -> a family mapping for :class:`InputSpec`."""
    name, params = parse_call(text)
    fam = {"name": name, "params": params, "type": target}
    if scale != 1.0:
        fam["scale"] = float(scale)
    return fam


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def _read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _parse_float(token, line):
    try:
        return float(token)
    except ValueError:
        raise InputError(f"not a number: {token.strip()!r} on line {line}") from None


def read_csv_values(text):
    """(values, line_of_index) from one-per-row or comma-separated CSV text."""
    values, lines = [], []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        cells = [c for c in row if c.strip()]
        if not cells or cells[0].lstrip().startswith("#"):
            continue
        for c in cells:
            values.append(_parse_float(c, lineno))
            lines.append(lineno)
    if not values:
        raise InputError("empty input: no values found")
    return values, lines


def _validated(values, lines=None):
    try:
        return validate_sequence(values)
    except InputError as exc:
        if lines is not None and exc.index is not None:
            raise InputError(f"{exc} (line {lines[exc.index - 1]})", index=exc.index) from None
        raise


def _json_load(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None


def read_json_values(text):
    data = _json_load(text)
    if isinstance(data, dict):
        if "values" not in data:
            raise InputError("JSON object must carry a 'values' array")
        data = data["values"]
    if not isinstance(data, list):
        raise InputError("JSON sequence must be an array of numbers or {\"values\": [...]}")
    if not data:
        raise InputError("empty input: no values found")
    out = []
    for i, v in enumerate(data, start=1):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"not a number at index {i}: {v!r}", index=i)
        out.append(float(v))
    return out


def read_pieces(text, path=""):
    """Step-function pieces from JSON ``{"pieces": ...}`` or ``value,measure`` CSV rows."""
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        data = _json_load(text)
        raw = data.get("pieces") if isinstance(data, dict) else data
        if not isinstance(raw, list):
            raise InputError("step-function JSON must carry a 'pieces' array")
        pieces = []
        for i, p in enumerate(raw, start=1):
            if not (isinstance(p, (list, tuple)) and len(p) == 2):
                raise InputError(f"piece {i} is not a [value, measure] pair", index=i)
            pieces.append((float(p[0]), float(p[1])))
    else:
        pieces = []
        for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
            cells = [c for c in row if c.strip()]
            if not cells or cells[0].lstrip().startswith("#"):
                continue
            if len(cells) != 2:
                raise InputError(f"expected 'value,measure' on line {lineno}")
            pieces.append((_parse_float(cells[0], lineno), _parse_float(cells[1], lineno)))
    if not pieces:
        raise InputError("empty input: no pieces found")
    return pieces


def _build_named(family):
    target = family.get("type", "sequence")
    name, params = family["name"], list(family.get("params", []) or [])
    try:
        if target == "psi":
            if len(params) > 1:
                raise InputError(f"psi {name} takes at most one parameter")
            return get_psi(name, params[0] if params else None)
        if target == "kappa":
            psi = family.get("psi")
            if psi:
                pname, pparams = parse_call(psi)
                psi = get_psi(pname, pparams[0] if pparams else None)
            return get_kappa(name, psi or None)
    except (DomainError, TypeError) as exc:
        raise InputError(f"{target} {name}: {exc}") from None
    text = name + ("(" + ", ".join(repr(float(p)) for p in params) + ")" if params else "")
    return build_family(text, float(family.get("scale", 1.0)))


def ingest(spec: InputSpec):
    """Validated :class:`SingularValueData`, :class:`KappaFunction` or :class:`PsiFunction`."""
    if spec.kind == "named_family":
        return _build_named(spec.family)
    text = _read_text(spec.path)
    label = Path(spec.path).name
    if spec.kind == "csv_sequence":
        values, lines = read_csv_values(text)
        return SequenceData(_validated(values, lines), label=label)
    if spec.kind == "json_sequence":
        return SequenceData(_validated(read_json_values(text)), label=label)
    return decreasing_rearrangement(read_pieces(text), label=label)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _float(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def to_jsonable(obj: Any):
    """Plain JSON data for reports: dataclasses, enums, numpy scalars and arrays."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for extra in ("width", "chain_ok"):
            if isinstance(getattr(type(obj), extra, None), property):
                out[extra] = to_jsonable(getattr(obj, extra))
        return out
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data) -> str:
    """Canonical JSON text; equal data gives equal bytes."""
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=True) + "\n"


@dataclass
class ReportEnvelope:
    command: str
    spec: dict
    results: Any
    tool_version: str = __version__
    wall_time: Optional[float] = None

    def to_dict(self, timing=False):
        out = {"command": self.command, "spec": to_jsonable(self.spec),
               "results": to_jsonable(self.results), "tool_version": self.tool_version}
        if timing and self.wall_time is not None:
            out["wall_time"] = _float(self.wall_time)
        return out

    def to_json(self, timing=False):
        return dumps(self.to_dict(timing))


def load_schema():
    return json.loads(SCHEMA_PATH.read_text())


def validate_report(data):
    """Validate a decoded report against the shipped schema (needs ``jsonschema``)."""
    import jsonschema

    jsonschema.validate(data, load_schema())


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and all(isinstance(x, (int, float, str)) for x in v) and len(v) <= 4:
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _walk(prefix, data, lines, depth):
    if isinstance(data, dict):
        for k in sorted(data):
            _walk(f"{prefix}.{k}" if prefix else k, data[k], lines, depth + 1)
    elif isinstance(data, list) and data and not all(isinstance(x, (int, float, str)) for x in data):
        for i, v in enumerate(data):
            _walk(f"{prefix}[{i}]", v, lines, depth + 1)
    elif isinstance(data, list) and len(data) > 4:
        lines.append(f"{prefix}: {len(data)} entries")
    else:
        lines.append(f"{prefix}: {_fmt(data)}")


def render_text(envelope: ReportEnvelope, timing=False) -> str:
    """Flat ``key: value`` summary of a report."""
    data = envelope.to_dict(timing)
    lines = [f"singtrace {data['tool_version']} {data['command']}"]
    _walk("", data["results"], lines, 0)
    if "wall_time" in data:
        lines.append(f"wall_time: {_fmt(data['wall_time'])} s")
    return "\n".join(lines) + "\n"

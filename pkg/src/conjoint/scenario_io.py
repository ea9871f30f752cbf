"""
Reading and writing ``.scenario`` files.

A scenario file is a UTF-8 JSON document::

    {
      "format_version": 1,
      "metadata": {"name": "...", "description": "..."},
      "scenario": {
        "labels": {"prepared": "t_A", "measured": "t_B"},
        "preparation": {
          "dim_a": 2, "dim_b": 2,
          "amplitudes": [[re, im], ...],
          "conditional_states": [[[re, im], ...], ...]
        },
        "evolution": {"kind": "local" | "joint", "operator": [[[re, im], ...], ...]},
        "declared_local": {"kind": "local", "operator": ...},
        "basis_a": "standard" | [[[re, im], ...], ...],
        "basis_b": "standard" | [[[re, im], ...], ...]
      }
    }

``format_version`` must come first. ``metadata``, ``labels`` and
``declared_local`` are optional; ``declared_local`` is required for joint
evolutions. Complex numbers are ``[re, im]`` pairs, vectors are arrays of
complex numbers and matrices are arrays of rows. Parsing is strict: unknown
or duplicated keys, NaN/Infinity literals and any invariant violation are
errors, and every problem found is reported, not only the first.

:func:`write_scenario` emits the canonical form: fixed key order, numbers
with 17 significant digits, two-space indentation and a trailing newline.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .linalg import DEFAULT_TOL, MAX_SUBSYSTEM_DIM, Tolerance
from .model import (
    Evolution,
    EvolutionKind,
    MeasurementBasis,
    Preparation,
    Scenario,
    TimeLabels,
    validate_scenario,
)

__all__ = [
    "FORMAT_VERSION",
    "Severity",
    "ParseDiagnostic",
    "Metadata",
    "ScenarioDocument",
    "ScenarioParseError",
    "parse_scenario",
    "write_scenario",
    "load_scenario",
    "save_scenario",
]

FORMAT_VERSION = 1


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    path: str
    message: str
    residual: Optional[float] = None

    def __str__(self):
        text = f"{self.severity.value}: {self.path}: {self.message}"
        if self.residual is not None:
            text += f" (residual {self.residual:.6g})"
        return text


@dataclass(frozen=True)
class Metadata:
    name: Optional[str] = None
    description: Optional[str] = None


@dataclass(frozen=True, eq=False)
class ScenarioDocument:
    scenario: Scenario
    metadata: Metadata = Metadata()
    format_version: int = FORMAT_VERSION
    warnings: tuple = field(default=())


class ScenarioParseError(ValueError):
    """The document was rejected; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity is Severity.ERROR]
        super().__init__(f"{len(errors)} error(s) in scenario document:\n" + "\n".join(map(str, errors)))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class _Object(dict):
    """JSON object that remembers key order and duplicated keys."""

    def __init__(self, pairs):
        super().__init__()
        self.order = []
        self.duplicates = []
        for key, value in pairs:
            if key in self:
                self.duplicates.append(key)
            else:
                self.order.append(key)
            self[key] = value


def _reject_constant(name):
    raise ValueError(f"non-finite literal {name} is not allowed")


class _Reader:
    """Schema walker; records diagnostics and returns None for unusable values."""

    def __init__(self):
        self.diagnostics: list[ParseDiagnostic] = []

    def error(self, path, message, residual=None):
        self.diagnostics.append(ParseDiagnostic(Severity.ERROR, path, message, residual))

    def warn(self, path, message):
        self.diagnostics.append(ParseDiagnostic(Severity.WARNING, path, message))

    def obj(self, value, path, required, optional=()):
        if not isinstance(value, _Object):
            self.error(path, f"expected an object, got {_kind(value)}")
            return None
        for key in value.duplicates:
            self.error(f"{path}.{key}", "duplicate key")
        allowed = set(required) | set(optional)
        for key in value.order:
            if key not in allowed:
                self.error(f"{path}.{key}", "unknown field")
        for key in required:
            if key not in value:
                self.error(f"{path}.{key}", "missing required field")
        return value

    def integer(self, value, path, lo=None, hi=None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(path, f"expected an integer, got {_kind(value)}")
            return None
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            self.error(path, f"value {value} outside {lo}..{hi}")
            return None
        return value

    def string(self, value, path):
        if not isinstance(value, str):
            self.error(path, f"expected a string, got {_kind(value)}")
            return None
        return value

    def number(self, value, path):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.error(path, f"expected a number, got {_kind(value)}")
            return None
        x = float(value)
        if not np.isfinite(x):
            self.error(path, "number is not finite")
            return None
        return x

    def complex_(self, value, path):
        if not isinstance(value, list) or len(value) != 2:
            self.error(path, "expected a complex number written as [re, im]")
            return None
        re, im = self.number(value[0], f"{path}[0]"), self.number(value[1], f"{path}[1]")
        if re is None or im is None:
            return None
        return complex(re, im)

    def vector(self, value, path, length=None):
        if not isinstance(value, list) or not value:
            self.error(path, "expected a non-empty array of complex numbers")
            return None
        entries = [self.complex_(x, f"{path}[{k}]") for k, x in enumerate(value)]
        if any(e is None for e in entries):
            return None
        if length is not None and len(entries) != length:
            self.error(path, f"expected {length} entries, got {len(entries)}")
            return None
        return np.array(entries, dtype=np.complex128)

    def vectors(self, value, path, count, length):
        """Array of ``count`` vectors each of ``length`` entries."""
        if not isinstance(value, list):
            self.error(path, f"expected an array, got {_kind(value)}")
            return None
        rows = [self.vector(v, f"{path}[{k}]", length) for k, v in enumerate(value)]
        if any(r is None for r in rows):
            return None
        if count is not None and len(rows) != count:
            self.error(path, f"expected {count} rows, got {len(rows)}")
            return None
        return rows


def _kind(value) -> str:
    if isinstance(value, _Object):
        return "object"
    if isinstance(value, bool):
        return "boolean"
    if value is None:
        return "null"
    return {str: "string", int: "integer", float: "number", list: "array"}.get(type(value), type(value).__name__)


def _read_evolution(r: _Reader, value, path, dim_a, dim_b):
    obj = r.obj(value, path, ("kind", "operator"))
    if obj is None or "kind" not in obj or "operator" not in obj:
        return None
    kind = r.string(obj["kind"], f"{path}.kind")
    if kind is None:
        return None
    if kind not in ("local", "joint"):
        r.error(f"{path}.kind", f"expected 'local' or 'joint', got {kind!r}")
        return None
    if dim_a is None or dim_b is None:
        return None
    side = dim_b if kind == "local" else dim_a * dim_b
    rows = r.vectors(obj["operator"], f"{path}.operator", side, side)
    if rows is None:
        return None
    return Evolution(EvolutionKind(kind), np.vstack(rows))


def _read_basis(r: _Reader, value, path, dim):
    if isinstance(value, str):
        if value != "standard":
            r.error(path, f"expected 'standard' or an array of vectors, got {value!r}")
            return None
        return MeasurementBasis.standard(dim) if dim is not None else None
    if dim is None:
        return None
    rows = r.vectors(value, path, dim, dim)
    return None if rows is None else MeasurementBasis(tuple(rows))


def _read_preparation(r: _Reader, value, path):
    obj = r.obj(value, path, ("dim_a", "dim_b", "amplitudes", "conditional_states"))
    if obj is None:
        return None, None, None
    dim_a = r.integer(obj["dim_a"], f"{path}.dim_a", 1, MAX_SUBSYSTEM_DIM) if "dim_a" in obj else None
    dim_b = r.integer(obj["dim_b"], f"{path}.dim_b", 1, MAX_SUBSYSTEM_DIM) if "dim_b" in obj else None
    amps = states = None
    if "amplitudes" in obj and dim_a is not None:
        amps = r.vector(obj["amplitudes"], f"{path}.amplitudes", dim_a)
    if "conditional_states" in obj and dim_a is not None and dim_b is not None:
        states = r.vectors(obj["conditional_states"], f"{path}.conditional_states", dim_a, dim_b)
    if amps is None or states is None:
        return None, dim_a, dim_b
    for i, alpha in enumerate(amps):
        if alpha == 0:
            r.warn(f"{path}.amplitudes[{i}]", f"zero amplitude: outcome {i} is never prepared")
    return Preparation(amps, tuple(states)), dim_a, dim_b


def _read_labels(r: _Reader, value, path):
    obj = r.obj(value, path, ("prepared", "measured"))
    if obj is None or "prepared" not in obj or "measured" not in obj:
        return None
    prepared = r.string(obj["prepared"], f"{path}.prepared")
    measured = r.string(obj["measured"], f"{path}.measured")
    if prepared is None or measured is None:
        return None
    return TimeLabels(prepared, measured)


def _decode(text) -> tuple[Any, list[ParseDiagnostic]]:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            return None, [ParseDiagnostic(Severity.ERROR, "<document>", f"not valid UTF-8: {exc}")]
    try:
        return json.loads(text, object_pairs_hook=_Object, parse_constant=_reject_constant), []
    except json.JSONDecodeError as exc:
        return None, [ParseDiagnostic(Severity.ERROR, "<document>",
                                      f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}")]
    except ValueError as exc:
        return None, [ParseDiagnostic(Severity.ERROR, "<document>", str(exc))]


def parse_scenario(text: bytes | str, tol: Tolerance = DEFAULT_TOL) -> ScenarioDocument:
    """
    Parse and validate a scenario document.

    Raises :class:`ScenarioParseError` carrying every diagnostic when any
    error is found. Warnings are attached to the returned document.
    """
    root, diagnostics = _decode(text)
    if diagnostics:
        raise ScenarioParseError(diagnostics)

    r = _Reader()
    top = r.obj(root, "<document>", ("format_version", "scenario"), ("metadata",))
    if top is None:
        raise ScenarioParseError(r.diagnostics)
    if top.order and top.order[0] != "format_version":
        r.error("format_version", "must be the first field of the document")
    if "format_version" in top:
        version = r.integer(top["format_version"], "format_version")
        if version is not None and version != FORMAT_VERSION:
            r.error("format_version", f"unsupported format version {version}, expected {FORMAT_VERSION}")

    metadata = Metadata()
    if "metadata" in top:
        meta = r.obj(top["metadata"], "metadata", (), ("name", "description"))
        if meta is not None:
            name = r.string(meta["name"], "metadata.name") if "name" in meta else None
            desc = r.string(meta["description"], "metadata.description") if "description" in meta else None
            metadata = Metadata(name, desc)

    scenario = None
    if "scenario" in top:
        scenario = _read_scenario(r, top["scenario"], "scenario", tol)

    errors = [d for d in r.diagnostics if d.severity is Severity.ERROR]
    if errors or scenario is None:
        raise ScenarioParseError(r.diagnostics)
    warnings = tuple(d for d in r.diagnostics if d.severity is Severity.WARNING)
    return ScenarioDocument(scenario, metadata, FORMAT_VERSION, warnings)


def _read_scenario(r: _Reader, value, path, tol):
    obj = r.obj(value, path, ("preparation", "evolution", "basis_a", "basis_b"), ("labels", "declared_local"))
    if obj is None:
        return None
    prep, dim_a, dim_b = (None, None, None)
    if "preparation" in obj:
        prep, dim_a, dim_b = _read_preparation(r, obj["preparation"], f"{path}.preparation")
    evolution = _read_evolution(r, obj["evolution"], f"{path}.evolution", dim_a, dim_b) if "evolution" in obj else None
    declared = None
    if "declared_local" in obj:
        declared = _read_evolution(r, obj["declared_local"], f"{path}.declared_local", dim_a, dim_b)
    basis_a = _read_basis(r, obj["basis_a"], f"{path}.basis_a", dim_a) if "basis_a" in obj else None
    basis_b = _read_basis(r, obj["basis_b"], f"{path}.basis_b", dim_b) if "basis_b" in obj else None
    labels = _read_labels(r, obj["labels"], f"{path}.labels") if "labels" in obj else None

    if any(x is None for x in (prep, evolution, basis_a, basis_b)):
        return None
    if "declared_local" in obj and declared is None:
        return None
    scenario = Scenario(prep, evolution, basis_a, basis_b, declared, labels)
    for v in validate_scenario(scenario, tol):
        r.error(f"{path}.{v.path}", v.message, v.residual)
    return scenario


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def _fmt_number(x: float) -> str:
    # "+ 0.0" folds -0.0 into 0.0 so that the output does not depend on sign of zero
    return format(float(x) + 0.0, ".17g")


def _fmt_complex(z: complex) -> str:
    return f"[{_fmt_number(z.real)}, {_fmt_number(z.imag)}]"


def _fmt_vector(v) -> str:
    return "[" + ", ".join(_fmt_complex(complex(z)) for z in np.asarray(v).ravel()) + "]"


def _fmt_rows(rows, indent: str) -> str:
    inner = ",\n".join(indent + "  " + _fmt_vector(row) for row in rows)
    return "[\n" + inner + "\n" + indent + "]"


def _fmt_evolution(evo: Evolution, indent: str) -> str:
    pad = indent + "  "
    return (
        "{\n"
        f'{pad}"kind": {json.dumps(evo.kind.value)},\n'
        f'{pad}"operator": {_fmt_rows(evo.operator, pad)}\n'
        f"{indent}}}"
    )


def _fmt_basis(basis: MeasurementBasis, indent: str) -> str:
    if basis.is_standard():
        return '"standard"'
    return _fmt_rows(basis.vectors, indent)


def write_scenario(doc: ScenarioDocument) -> bytes:
    """Canonical UTF-8 serialization of ``doc``."""
    s = doc.scenario
    prep = s.preparation
    lines = ["{", f'  "format_version": {int(doc.format_version)},']
    meta = [(k, getattr(doc.metadata, k)) for k in ("name", "description") if getattr(doc.metadata, k) is not None]
    if meta:
        body = ",\n".join(f"    {json.dumps(k)}: {json.dumps(v, ensure_ascii=False)}" for k, v in meta)
        lines.append('  "metadata": {\n' + body + "\n  },")
    lines.append('  "scenario": {')

    fields = []
    if s.labels is not None:
        fields.append(
            '"labels": {\n'
            f'      "prepared": {json.dumps(s.labels.prepared, ensure_ascii=False)},\n'
            f'      "measured": {json.dumps(s.labels.measured, ensure_ascii=False)}\n'
            "    }"
        )
    fields.append(
        '"preparation": {\n'
        f'      "dim_a": {prep.dim_a},\n'
        f'      "dim_b": {prep.dim_b},\n'
        f'      "amplitudes": {_fmt_vector(prep.amplitudes)},\n'
        f'      "conditional_states": {_fmt_rows(prep.conditional_states, "      ")}\n'
        "    }"
    )
    fields.append(f'"evolution": {_fmt_evolution(s.evolution, "    ")}')
    if s.declared_local is not None:
        fields.append(f'"declared_local": {_fmt_evolution(s.declared_local, "    ")}')
    fields.append(f'"basis_a": {_fmt_basis(s.basis_a, "    ")}')
    fields.append(f'"basis_b": {_fmt_basis(s.basis_b, "    ")}')

    lines.append(",\n".join("    " + f for f in fields))
    lines.append("  }")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_scenario(path, tol: Tolerance = DEFAULT_TOL) -> ScenarioDocument:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read(), tol)


def save_scenario(doc: ScenarioDocument, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_scenario(doc))

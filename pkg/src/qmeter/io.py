"""JSON documents holding named states, measurements, instruments and channels.

Complex entries are stored as [re, im] pairs and matrices as row-major
nested lists, so a document written here reloads to entrywise-identical
arrays (Python floats round-trip exactly through ``repr``).

Layout::

    {"states":       {name: matrix},
     "measurements": {name: {"kraus": [matrix, ...], "labels": [...]}},
     "instruments":  {name: {"operations": [[matrix, ...], ...], "labels": [...]}},
     "channels":     {name: {"kraus": [matrix, ...]}}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import QuantumChannel, completeness_residual
from .errors import CompletenessError, SchemaError, ShapeError
from .linalg import hermiticity_residual
from .measurement import Instrument, KrausMeasurement

SECTIONS = ("states", "measurements", "instruments", "channels")
STATE_TOL = 1e-8


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(f"{where}: expected a non-empty list of rows")
    width = len(obj[0])
    if width == 0 or any(len(r) != width for r in obj):
        raise SchemaError(f"{where}: rows have inconsistent lengths")
    out = np.empty((len(obj), width), dtype=complex)
    for i, row in enumerate(obj):
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)):
                raise SchemaError(f"{where}[{i}][{j}]: expected a [re, im] pair of numbers")
            out[i, j] = complex(z[0], z[1])
    if not np.all(np.isfinite(out)):
        raise SchemaError(f"{where}: non-finite entry")
    return out


@dataclass
class Document:
    states: dict = field(default_factory=dict)
    measurements: dict = field(default_factory=dict)
    instruments: dict = field(default_factory=dict)
    channels: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "states": {k: encode_matrix(v) for k, v in self.states.items()},
            "measurements": {k: {"kraus": [encode_matrix(x) for x in m.kraus], "labels": list(m.labels)}
                             for k, m in self.measurements.items()},
            "instruments": {k: {"operations": [[encode_matrix(x) for x in op] for op in m.operations],
                                "labels": list(m.labels)}
                            for k, m in self.instruments.items()},
            "channels": {k: {"kraus": [encode_matrix(x) for x in c.kraus]}
                         for k, c in self.channels.items()},
        }

    def resolve(self, name: str, kinds=SECTIONS):
        """Look ``name`` up in the given sections, in order; KeyError if absent."""
        for kind in kinds:
            table = getattr(self, kind)
            if name in table:
                return table[name]
        raise KeyError(f"no {' or '.join(k.rstrip('s') for k in kinds)} named {name!r}")


def _check_state(name: str, rho: np.ndarray) -> float:
    if rho.shape[0] != rho.shape[1]:
        raise SchemaError(f"states.{name}: shape {rho.shape} is not square")
    herm = hermiticity_residual(rho)
    if herm > STATE_TOL:
        raise SchemaError(f"states.{name}: not Hermitian, residual {herm:.3e}")
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    trace_res = abs(float(np.trace(rho).real) - 1.0)
    if trace_res > STATE_TOL:
        raise SchemaError(f"states.{name}: trace deviates from 1 by {trace_res:.3e}")
    if w[0] < -STATE_TOL:
        raise SchemaError(f"states.{name}: negative eigenvalue {w[0]:.3e}")
    return max(herm, trace_res, max(0.0, -float(w[0])))


def _labels(entry: dict, n: int, where: str):
    labels = entry.get("labels")
    if labels is None:
        return None
    if not isinstance(labels, list) or len(labels) != n or not all(isinstance(x, str) for x in labels):
        raise SchemaError(f"{where}.labels: expected {n} strings")
    return labels


def _kraus_list(obj, where: str, allow_empty: bool = False) -> list[np.ndarray]:
    if not isinstance(obj, list) or (not obj and not allow_empty):
        raise SchemaError(f"{where}: expected a non-empty list of matrices")
    mats = [decode_matrix(k, f"{where}[{i}]") for i, k in enumerate(obj)]
    if len({m.shape for m in mats}) > 1:
        raise SchemaError(f"{where}: Kraus operators of different shapes {sorted({m.shape for m in mats})}")
    return mats


def _checked(build, where: str):
    try:
        return build()
    except (CompletenessError, ShapeError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def parse_document(data) -> Document:
    if not isinstance(data, dict):
        raise SchemaError("document root must be an object")
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise SchemaError(f"unknown top-level keys {sorted(unknown)}")
    for key in SECTIONS:
        if not isinstance(data.get(key, {}), dict):
            raise SchemaError(f"{key}: expected an object keyed by name")
    doc = Document()
    for name, obj in data.get("states", {}).items():
        rho = decode_matrix(obj, f"states.{name}")
        doc.residuals[f"states.{name}"] = _check_state(name, rho)
        doc.states[name] = rho
    for name, obj in data.get("measurements", {}).items():
        where = f"measurements.{name}"
        if not isinstance(obj, dict) or "kraus" not in obj:
            raise SchemaError(f"{where}: expected an object with a 'kraus' list")
        mats = _kraus_list(obj["kraus"], f"{where}.kraus")
        m = _checked(lambda: KrausMeasurement(mats, _labels(obj, len(mats), where)), where)
        doc.residuals[where] = m.completeness_residual
        doc.measurements[name] = m
    for name, obj in data.get("instruments", {}).items():
        where = f"instruments.{name}"
        if not isinstance(obj, dict) or not isinstance(obj.get("operations"), list) or not obj["operations"]:
            raise SchemaError(f"{where}: expected an object with a non-empty 'operations' list")
        ops = [_kraus_list(op, f"{where}.operations[{i}]", allow_empty=True)
               for i, op in enumerate(obj["operations"])]
        if len({k.shape for op in ops for k in op}) > 1:
            raise SchemaError(f"{where}: operations act between different spaces")
        m = _checked(lambda: Instrument(ops, _labels(obj, len(ops), where)), where)
        doc.residuals[where] = m.completeness_residual
        doc.instruments[name] = m
    for name, obj in data.get("channels", {}).items():
        where = f"channels.{name}"
        if not isinstance(obj, dict) or "kraus" not in obj:
            raise SchemaError(f"{where}: expected an object with a 'kraus' list")
        mats = _kraus_list(obj["kraus"], f"{where}.kraus")
        ch = _checked(lambda: QuantumChannel(mats), where)
        doc.residuals[where] = completeness_residual(ch.kraus, ch.d_in)
        doc.channels[name] = ch
    return doc


def load_document(path) -> Document:
    """Read and validate a document.

    Raises:
        SchemaError: malformed JSON, bad layout, or a state/completeness
            residual above tolerance (the message carries the residual).
        OSError: the file cannot be read.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return parse_document(data)


def dumps_document(doc: Document) -> str:
    return json.dumps(doc.to_json(), indent=1, sort_keys=True) + "\n"


def save_document(doc: Document, path) -> None:
    Path(path).write_text(dumps_document(doc), encoding="utf-8")

"""JSON and CSV artifacts.

Every JSON document written here carries a ``"schema"`` string of the form
``"sympinf.<kind>/<version>"``.  Loaders reject a mismatched kind or
version, and reject ``NaN``/``Infinity`` anywhere in the file (including
numeric literals that overflow to infinity).  Writers refuse to replace an
existing file unless ``overwrite=True``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .diffeo import TrigDiffeo, make_diffeo
from .fourier import FourierVector, modes
from .lie_algebra import CovarianceSpec

__all__ = [
    "SchemaError",
    "schema_tag",
    "dumps",
    "loads",
    "write_json",
    "read_json",
    "write_csv",
    "save_matrix",
    "load_matrix",
    "save_vector",
    "load_vector",
    "save_report",
    "load_report",
    "matrix_to_dict",
    "matrix_from_dict",
    "vector_to_dict",
    "vector_from_dict",
    "diffeo_from_dict",
    "covariance_from_dict",
    "covariance_to_dict",
    "load_diffeo",
    "load_covariance",
]

VERSION = 1


class SchemaError(ValueError):
    """A JSON document does not match the expected schema."""


def schema_tag(kind: str, version: int = VERSION) -> str:
    return f"sympinf.{kind}/{version}"


def _reject_constant(token):
    raise ValueError(f"non-finite number {token!r} is not allowed")


def _finite_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"number {text!r} overflows to a non-finite value")
    return value


def _plain(obj):
    """Convert numpy scalars/arrays into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"real": _plain(obj.real.tolist()), "imag": _plain(obj.imag.tolist())}
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    return obj


def dumps(doc: dict) -> str:
    """Deterministic JSON text; raises ``ValueError`` on NaN/Inf."""
    return json.dumps(_plain(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text: str, kind: str | None = None) -> dict:
    """Parse JSON, rejecting non-finite numbers and checking the schema tag."""
    doc = json.loads(text, parse_constant=_reject_constant, parse_float=_finite_float)
    if kind is not None:
        _check_schema(doc, kind)
    return doc


def _check_schema(doc, kind: str, required: bool = True) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"expected a JSON object for {kind!r}")
    tag = doc.get("schema")
    if tag is None and not required:
        return
    if tag != schema_tag(kind):
        raise SchemaError(f"schema mismatch: expected {schema_tag(kind)!r}, found {tag!r}")


def _open_new(path, overwrite: bool):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w" if overwrite else "x", newline="", encoding="utf-8")


def write_json(path, doc: dict, overwrite: bool = False) -> Path:
    text = dumps(doc)
    with _open_new(path, overwrite) as fh:
        fh.write(text)
    return Path(path)


def read_json(path, kind: str | None = None) -> dict:
    return loads(Path(path).read_text(encoding="utf-8"), kind)


def write_csv(path, header, rows, overwrite: bool = False) -> Path:
    """Write rows of numbers; refuses NaN/Inf so downstream tools see clean data."""
    with _open_new(path, overwrite) as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            row = [_plain(v) for v in row]
            for v in row:
                if isinstance(v, float) and not math.isfinite(v):
                    raise ValueError(f"non-finite value in CSV row {row}")
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return Path(path)


def _complex_array(payload, name: str) -> np.ndarray:
    try:
        re = np.asarray(payload["real"], dtype=float)
        im = np.asarray(payload["imag"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{name} needs 'real' and 'imag' arrays") from exc
    if re.shape != im.shape:
        raise SchemaError(f"{name}: real/imag shape mismatch {re.shape} vs {im.shape}")
    out = re + 1j * im
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains NaN or Inf")
    return out


def matrix_to_dict(A, **meta) -> dict:
    A = np.asarray(A, dtype=complex)
    return {"schema": schema_tag("matrix"), "N": A.shape[0] // 2, "real": A.real, "imag": A.imag, **meta}


def matrix_from_dict(doc: dict) -> np.ndarray:
    _check_schema(doc, "matrix")
    A = _complex_array(doc, "matrix")
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != 2 * int(doc.get("N", -1)):
        raise SchemaError(f"matrix shape {A.shape} inconsistent with N={doc.get('N')}")
    return A


def vector_to_dict(u: FourierVector, **meta) -> dict:
    return {
        "schema": schema_tag("vector"),
        "N": u.n_trunc,
        "modes": modes(u.n_trunc),
        "real": u.coeffs.real,
        "imag": u.coeffs.imag,
        **meta,
    }


def vector_from_dict(doc: dict) -> FourierVector:
    _check_schema(doc, "vector")
    c = _complex_array(doc, "vector")
    if c.ndim != 1 or c.size != 2 * int(doc.get("N", -1)):
        raise SchemaError(f"vector length {c.size} inconsistent with N={doc.get('N')}")
    return FourierVector(c)


def save_matrix(path, A, overwrite: bool = False, **meta) -> Path:
    return write_json(path, matrix_to_dict(A, **meta), overwrite)


def load_matrix(path) -> np.ndarray:
    return matrix_from_dict(read_json(path))


def save_vector(path, u: FourierVector, overwrite: bool = False, **meta) -> Path:
    return write_json(path, vector_to_dict(u, **meta), overwrite)


def load_vector(path) -> FourierVector:
    return vector_from_dict(read_json(path))


def save_report(path, kind: str, body: dict, overwrite: bool = False) -> Path:
    return write_json(path, {"schema": schema_tag(kind), **body}, overwrite)


def load_report(path, kind: str) -> dict:
    return read_json(path, kind)


def diffeo_from_dict(doc: dict) -> TrigDiffeo:
    """``{"a": [...], "b": [...], "shift": s}``; the schema tag is optional on input."""
    _check_schema(doc, "diffeo", required=False)
    unknown = set(doc) - {"schema", "a", "b", "shift"}
    if unknown:
        raise SchemaError(f"unknown diffeo fields {sorted(unknown)}")
    return make_diffeo(doc.get("a", ()), doc.get("b", ()), float(doc.get("shift", 0.0)))


def covariance_to_dict(Q: CovarianceSpec) -> dict:
    return {
        "schema": schema_tag("covariance"),
        "p": Q.p,
        "c": Q.c,
        "overrides": [{"tag": t, "m": m, "n": n, "q": q} for (t, m, n), q in sorted(Q.overrides.items())],
    }


def covariance_from_dict(doc: dict) -> CovarianceSpec:
    """``{"p": 2, "c": 1, "overrides": [{"tag", "m", "n", "q"}, ...]}``."""
    _check_schema(doc, "covariance", required=False)
    unknown = set(doc) - {"schema", "p", "c", "overrides"}
    if unknown:
        raise SchemaError(f"unknown covariance fields {sorted(unknown)}")
    overrides = {}
    for item in doc.get("overrides", []):
        try:
            overrides[(str(item["tag"]), int(item["m"]), int(item["n"]))] = float(item["q"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed override {item!r}") from exc
    return CovarianceSpec(p=float(doc.get("p", 2.0)), c=float(doc.get("c", 1.0)), overrides=overrides)


def load_diffeo(path) -> TrigDiffeo:
    return diffeo_from_dict(read_json(path))


def load_covariance(path) -> CovarianceSpec:
    return covariance_from_dict(read_json(path))

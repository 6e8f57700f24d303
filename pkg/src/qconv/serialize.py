"""JSON wire format: complex numbers as [re, im], matrices row-major, non-finite floats as strings."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .errors import ValidationError

SCHEMA_VERSION = "1.0"


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def array_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_to_json(a)
    return [array_to_json(x) for x in a]


def array_from_json(obj) -> np.ndarray:
    """Inverse of :func:`array_to_json`; the innermost axis must be a [re, im] pair."""
    a = np.asarray(obj, dtype=float)
    if a.ndim == 0 or a.shape[-1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def clean(obj):
    """Recursively convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x + 0.0
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("qconv").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def schema_names() -> list[str]:
    folder = resources.files("qconv").joinpath("schemas")
    return sorted(p.name.removesuffix(".schema.json") for p in folder.iterdir() if p.name.endswith(".schema.json"))


def validate(obj, schema_name: str) -> None:
    """Raise ValidationError naming the failing field path."""
    schema = load_schema(schema_name)
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise ValidationError(f"schema {schema_name}: {path}: {err.message}")

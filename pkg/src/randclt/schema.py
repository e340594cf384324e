"""Tiny structural validator for the shipped JSON output schemas.

Supports the subset actually used by the schema files: type, required,
properties, items.  Raises SchemaError with a JSON-pointer-ish path.
"""

from __future__ import annotations

import json
from importlib import resources

_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "boolean": bool,
}


class SchemaError(ValueError):
    pass


def load_schema(name: str) -> dict:
    with resources.files("randclt.schemas").joinpath(name).open("r") as fh:
        return json.load(fh)


def validate(obj, schema: dict, path: str = "$") -> None:
    typ = schema.get("type")
    if typ == "number":
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise SchemaError(f"{path}: expected number, got {type(obj).__name__}")
    elif typ == "integer":
        if isinstance(obj, bool) or not isinstance(obj, int):
            raise SchemaError(f"{path}: expected integer, got {type(obj).__name__}")
    elif typ in _TYPES:
        if not isinstance(obj, _TYPES[typ]):
            raise SchemaError(f"{path}: expected {typ}, got {type(obj).__name__}")
    if typ == "object":
        for key in schema.get("required", ()):
            if key not in obj:
                raise SchemaError(f"{path}: missing required key {key!r}")
        for key, sub in schema.get("properties", {}).items():
            if key in obj:
                validate(obj[key], sub, f"{path}.{key}")
    elif typ == "array" and "items" in schema:
        for i, item in enumerate(obj):
            validate(item, schema["items"], f"{path}[{i}]")

import json
import os
from typing import Dict

from models.errors import SchemaError, SdsError
from models.lattice import State
from models.local_functions import PartialFunction


def partial_function_from_dict(data: Dict) -> PartialFunction:
    """
    {"n": 2, "entries": {"00": 0, "11": 1}}: keys are state strings, values 0/1.
    """
    if not isinstance(data, dict):
        raise SchemaError("partial function: top level must be an object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError(f"partial function: field 'n' must be a positive integer, got {n!r}")
    entries = data.get("entries")
    if not isinstance(entries, dict):
        raise SchemaError("partial function: field 'entries' must be an object mapping states to 0/1")
    parsed: Dict[State, int] = {}
    for key, value in entries.items():
        try:
            X = State.parse(key)
        except SdsError as exc:
            raise SchemaError(f"partial function: entry {key!r}: {exc}") from exc
        if X.n != n:
            raise SchemaError(f"partial function: entry {key!r} has length {X.n}, expected {n}")
        if value not in (0, 1) or isinstance(value, bool):
            raise SchemaError(f"partial function: entry {key!r} must map to 0 or 1, got {value!r}")
        parsed[X] = int(value)
    return PartialFunction(n, parsed)


def partial_function_to_dict(g: PartialFunction) -> Dict[str, object]:
    return {"n": g.n, "entries": {str(X): g.entries[X] for X in g.domain}}


def parse_partial_function(file_path: str) -> PartialFunction:
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"partial function file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{os.path.basename(file_path)}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return partial_function_from_dict(data)

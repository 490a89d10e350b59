import json
import os
from typing import Dict, Optional

from models.errors import SchemaError
from models.local_functions import TABLE, THRESHOLD, LocalFunction
from models.system import Graph, SystemDescription


def _require(data: Dict, key: str, kind, where: str = "system"):
    if key not in data:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(f"{where}: field {key!r} has the wrong type ({type(value).__name__})")
    return value


def function_from_dict(spec: Dict, arity: int, vertex: int) -> LocalFunction:
    """One entry of the `functions` list; `vertex` is only used in error messages."""
    where = f"vertex {vertex}"
    if not isinstance(spec, dict):
        raise SchemaError(f"{where}: function spec must be an object")
    kind = _require(spec, "type", str, where)
    try:
        if kind == THRESHOLD:
            return LocalFunction.threshold(arity, _require(spec, "k", int, where))
        if kind == TABLE:
            return LocalFunction(arity=arity, kind=TABLE, bits=_require(spec, "bits", str, where))
    except SchemaError as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    raise SchemaError(f"{where}: unknown function type {kind!r}")


def function_to_dict(f: LocalFunction) -> Dict[str, object]:
    if f.kind == THRESHOLD:
        return {"type": THRESHOLD, "k": f.k}
    return {"type": TABLE, "bits": f.bits}


def system_from_dict(data: Dict) -> SystemDescription:
    """
    Build a validated SystemDescription from the JSON object form.

    Expected keys: "n", "edges" (list of [i, j]), "functions" (one spec per
    vertex, in vertex order). Optional "driver" and "metadata" are kept as
    metadata.
    """
    if not isinstance(data, dict):
        raise SchemaError("system: top level must be an object")
    n = _require(data, "n", int)
    edges = _require(data, "edges", list)
    functions = _require(data, "functions", list)
    for edge in edges:
        if not isinstance(edge, list) or not all(isinstance(v, int) for v in edge):
            raise SchemaError(f"system: field 'edges' entry {edge!r} must be a list of two vertex ids")
    graph = Graph.from_edges(n, edges)
    if len(functions) != n:
        raise SchemaError(f"system: field 'functions' has {len(functions)} entries, expected {n}")
    parsed = tuple(function_from_dict(spec, len(graph.closed_neighborhood(i)), i)
                   for i, spec in enumerate(functions, start=1))

    raw_metadata = data.get("metadata")
    if raw_metadata is not None and not isinstance(raw_metadata, dict):
        raise SchemaError(f"system: field 'metadata' must be an object, got {type(raw_metadata).__name__}")
    metadata = dict(raw_metadata or {})
    if "driver" in data:
        metadata["driver"] = data["driver"]
    return SystemDescription(graph, parsed, metadata=metadata)


def system_to_dict(sys: SystemDescription) -> Dict[str, object]:
    out: Dict[str, object] = {
        "n": sys.n,
        "edges": [list(e) for e in sorted(sys.graph.edges)],
        "functions": [function_to_dict(f) for f in sys.functions],
    }
    metadata = dict(sys.metadata)
    if "driver" in metadata:
        out["driver"] = metadata.pop("driver")
    if metadata:
        out["metadata"] = metadata
    return out


def parse_system(file_path: str) -> SystemDescription:
    """Read a system JSON file; the monotonicity verdicts are computed on load."""
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"system file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{os.path.basename(file_path)}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    sys = system_from_dict(data)
    _ = sys.monotonicity
    return sys


def emit_system(sys: SystemDescription, file_path: Optional[str] = None) -> str:
    text = json.dumps(system_to_dict(sys), indent=2)
    if file_path is not None:
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    return text


def driver_hint(sys: SystemDescription) -> Optional[str]:
    """The driver a system file asks for, if it names one."""
    value = sys.metadata.get("driver")
    return value if isinstance(value, str) else None

